use std::io::Read;
use std::path::Path;

use super::{DataError, Dataset, EntityRow};
use crate::features::FeatureCatalog;

/// Reads the data CSV: `entity_id,row_id,label,<catalog columns in order>`.
/// Empty cells are missing values; an empty label marks an unlabeled row.
pub fn ingest(reader: impl Read, catalog: &FeatureCatalog) -> Result<Dataset, DataError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    let expected: Vec<&str> = ["entity_id", "row_id", "label"]
        .into_iter()
        .chain(catalog.names())
        .collect();
    if header.iter().ne(expected.iter().copied()) {
        let got: Vec<&str> = header.iter().collect();
        return Err(DataError::Schema(format!(
            "header `{}` does not match catalog order `{}`",
            got.join(","),
            expected.join(",")
        )));
    }
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |message: String| DataError::Malformed { line, message };
        if record.len() != expected.len() {
            return Err(bad(format!(
                "expected {} fields, found {}",
                expected.len(),
                record.len()
            )));
        }
        let entity_id = record[0].trim();
        if entity_id.is_empty() {
            return Err(bad("empty entity_id".into()));
        }
        let row_id: i64 = record[1]
            .trim()
            .parse()
            .map_err(|_| bad(format!("row_id {:?} is not an integer timestamp", &record[1])))?;
        let label = match record[2].trim() {
            "" => None,
            "0" => Some(false),
            "1" => Some(true),
            other => return Err(bad(format!("label {other:?} is not 0, 1 or empty"))),
        };
        let values = record
            .iter()
            .skip(3)
            .zip(catalog.names())
            .map(|(cell, name)| match cell.trim() {
                "" => Ok(None),
                s => match s.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(Some(v)),
                    _ => Err(bad(format!("column {name}: {s:?} is not a finite number"))),
                },
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(EntityRow {
            entity_id: entity_id.to_string(),
            row_id,
            values,
            label,
        });
    }
    Dataset::new(catalog, rows)
}

pub fn ingest_file(path: impl AsRef<Path>, catalog: &FeatureCatalog) -> Result<Dataset, DataError> {
    ingest(std::fs::File::open(path)?, catalog)
}

/// Writes `dataset` in the format [`ingest`] reads. Values use the shortest
/// representation that parses back to the same bits.
pub fn write_csv(dataset: &Dataset) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<&str> = ["entity_id", "row_id", "label"]
        .into_iter()
        .chain(dataset.columns().iter().map(String::as_str))
        .collect();
    w.write_record(&header).expect("in-memory write");
    for row in dataset.rows() {
        let mut record = vec![
            row.entity_id.clone(),
            row.row_id.to_string(),
            match row.label {
                None => String::new(),
                Some(true) => "1".into(),
                Some(false) => "0".into(),
            },
        ];
        record.extend(row.values.iter().map(|v| v.map_or_else(String::new, |v| v.to_string())));
        w.write_record(&record).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
}
