//! Historic turbine readings.
//!
//! A [`Dataset`] is an immutable, in-memory collection of [`EntityRow`]s keyed
//! by `(entity_id, row_id)`, where `row_id` is an epoch-seconds timestamp.
//! Column order always follows the feature catalog.

mod ingest;
mod synthetic;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{FeatureCatalog, ValueType};

pub use ingest::{ingest, ingest_file, write_csv};
pub use synthetic::{
    generate_synthetic, synthetic_catalog, synthetic_transforms, FailureEpisode, SyntheticFleet, SyntheticParams,
};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("data io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("duplicate row key ({entity_id}, {row_id})")]
    Conflict { entity_id: String, row_id: i64 },
    #[error("no row ({entity_id}, {row_id})")]
    NotFound { entity_id: String, row_id: i64 },
    #[error("invalid synthetic parameters: {0}")]
    Params(String),
}

/// Row key. Orders by entity id, then timestamp.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RowRef {
    pub entity_id: String,
    pub row_id: i64,
}

impl RowRef {
    pub fn new(entity_id: impl Into<String>, row_id: i64) -> Self {
        RowRef {
            entity_id: entity_id.into(),
            row_id,
        }
    }
}

impl fmt::Display for RowRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.entity_id, self.row_id)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntityRow {
    pub entity_id: String,
    pub row_id: i64,
    /// One value per catalog column; `None` is a missing reading.
    pub values: Vec<Option<f64>>,
    /// `Some(true)` when the brakepad failed within the prediction window.
    pub label: Option<bool>,
}

impl EntityRow {
    pub fn key(&self) -> RowRef {
        RowRef::new(self.entity_id.clone(), self.row_id)
    }
}

/// Mean and population standard deviation over the present values of one column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeatureStats {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    columns: Vec<String>,
    value_types: Vec<ValueType>,
    rows: Vec<EntityRow>,
    index: HashMap<RowRef, usize>,
    stats: Vec<Option<FeatureStats>>,
}

impl Dataset {
    /// Builds a dataset over the catalog's columns, rejecting duplicate keys
    /// and rows of the wrong width.
    pub fn new(catalog: &FeatureCatalog, rows: Vec<EntityRow>) -> Result<Self, DataError> {
        let columns: Vec<String> = catalog.names().map(str::to_string).collect();
        let mut index = HashMap::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            if row.values.len() != columns.len() {
                return Err(DataError::Schema(format!(
                    "row ({}, {}) has {} values, catalog has {} columns",
                    row.entity_id,
                    row.row_id,
                    row.values.len(),
                    columns.len()
                )));
            }
            if index.insert(row.key(), i).is_some() {
                return Err(DataError::Conflict {
                    entity_id: row.entity_id.clone(),
                    row_id: row.row_id,
                });
            }
        }
        let stats = column_stats(&rows, columns.len());
        Ok(Dataset {
            columns,
            value_types: catalog.value_types(),
            rows,
            index,
            stats,
        })
    }

    pub fn empty(catalog: &FeatureCatalog) -> Self {
        Dataset::new(catalog, Vec::new()).expect("no rows to conflict")
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn value_types(&self) -> &[ValueType] {
        &self.value_types
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn rows(&self) -> &[EntityRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `None` for columns with no present value.
    pub fn stats(&self) -> &[Option<FeatureStats>] {
        &self.stats
    }

    pub fn get_row(&self, entity_id: &str, row_id: i64) -> Result<&EntityRow, DataError> {
        self.index
            .get(&RowRef::new(entity_id, row_id))
            .map(|&i| &self.rows[i])
            .ok_or_else(|| DataError::NotFound {
                entity_id: entity_id.to_string(),
                row_id,
            })
    }

    pub fn get(&self, key: &RowRef) -> Result<&EntityRow, DataError> {
        self.get_row(&key.entity_id, key.row_id)
    }

    /// Entity ids with their row counts, sorted by id.
    pub fn entities(&self) -> BTreeMap<&str, usize> {
        let mut out = BTreeMap::new();
        for row in &self.rows {
            *out.entry(row.entity_id.as_str()).or_insert(0) += 1;
        }
        out
    }

    /// Rows of one entity in timestamp order.
    pub fn entity_rows(&self, entity_id: &str) -> Vec<&EntityRow> {
        let mut rows: Vec<&EntityRow> = self.rows.iter().filter(|r| r.entity_id == entity_id).collect();
        rows.sort_by_key(|r| r.row_id);
        rows
    }
}

fn column_stats(rows: &[EntityRow], n_columns: usize) -> Vec<Option<FeatureStats>> {
    (0..n_columns)
        .map(|c| {
            let present: Vec<f64> = rows.iter().filter_map(|r| r.values[c]).collect();
            if present.is_empty() {
                return None;
            }
            let n = present.len() as f64;
            let mean = present.iter().sum::<f64>() / n;
            let var = present.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            Some(FeatureStats {
                mean,
                std: var.sqrt(),
                count: present.len(),
            })
        })
        .collect()
}
