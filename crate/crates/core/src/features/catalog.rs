use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::FeatureError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueType {
    Numeric,
    Categorical,
    Boolean,
}

impl ValueType {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "numeric" => Some(ValueType::Numeric),
            "categorical" => Some(ValueType::Categorical),
            "boolean" => Some(ValueType::Boolean),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureInfo {
    pub name: String,
    pub display_name: String,
    pub category: String,
    #[serde(rename = "type")]
    pub value_type: ValueType,
    pub unit: Option<String>,
}

/// Ordered per-column metadata. Column `i` of the model and of every dataset
/// row is described by entry `i`.
///
/// Construction does not reject duplicate names or empty display names;
/// [`super::validate_catalog`] reports them.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureCatalog {
    features: Vec<FeatureInfo>,
    by_name: HashMap<String, usize>,
}

impl FeatureCatalog {
    pub fn new(features: Vec<FeatureInfo>) -> Self {
        let mut by_name = HashMap::with_capacity(features.len());
        for (i, f) in features.iter().enumerate() {
            by_name.entry(f.name.clone()).or_insert(i);
        }
        FeatureCatalog { features, by_name }
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn features(&self) -> &[FeatureInfo] {
        &self.features
    }

    pub fn get(&self, index: usize) -> Option<&FeatureInfo> {
        self.features.get(index)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.features.iter().map(|f| f.name.as_str())
    }

    pub fn value_types(&self) -> Vec<ValueType> {
        self.features.iter().map(|f| f.value_type).collect()
    }

    /// Writes the catalog CSV (`name,display_name,category,type,unit`).
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "display_name", "category", "type", "unit"])
            .expect("in-memory write");
        for f in &self.features {
            let ty = match f.value_type {
                ValueType::Numeric => "numeric",
                ValueType::Categorical => "categorical",
                ValueType::Boolean => "boolean",
            };
            w.write_record([
                f.name.as_str(),
                &f.display_name,
                &f.category,
                ty,
                f.unit.as_deref().unwrap_or(""),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }
}

const HEADER: [&str; 5] = ["name", "display_name", "category", "type", "unit"];

pub fn load_catalog(reader: impl Read) -> Result<FeatureCatalog, FeatureError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().ne(HEADER) {
        return Err(FeatureError::Catalog {
            line: 1,
            message: format!("header must be `{}`", HEADER.join(",")),
        });
    }
    let mut features = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != HEADER.len() {
            return Err(FeatureError::Catalog {
                line,
                message: format!("expected {} fields, found {}", HEADER.len(), record.len()),
            });
        }
        let value_type = ValueType::parse(&record[3]).ok_or_else(|| FeatureError::Catalog {
            line,
            message: format!("unknown type {:?}", &record[3]),
        })?;
        features.push(FeatureInfo {
            name: record[0].to_string(),
            display_name: record[1].to_string(),
            category: record[2].to_string(),
            value_type,
            unit: Some(record[4].to_string()).filter(|u| !u.is_empty()),
        });
    }
    Ok(FeatureCatalog::new(features))
}

pub fn load_catalog_file(path: impl AsRef<Path>) -> Result<FeatureCatalog, FeatureError> {
    load_catalog(std::fs::File::open(path)?)
}
