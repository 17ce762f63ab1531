//! Human-facing feature space.
//!
//! A [`FeatureCatalog`] names and describes every model column. A
//! [`TransformSpec`] groups one-hot indicator columns, rescales raw units for
//! display and renames columns. [`FeatureSpace`] combines the two and projects
//! model-space contributions onto interpretable features. Contributions are
//! never rescaled: they stay on the model's margin scale whatever the display
//! units are.

mod catalog;
mod transform;

use thiserror::Error;

pub use catalog::{load_catalog, load_catalog_file, FeatureCatalog, FeatureInfo, ValueType};
pub use transform::{
    load_transform_file, load_transforms, to_interpretable, validate_catalog, Diagnostic, FeatureSpace,
    InterpretableFeature, Members, Transform, TransformSpec, NO_READING,
};

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("catalog io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("catalog csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("transform spec is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("catalog line {line}: {message}")]
    Catalog { line: u64, message: String },
    #[error("invalid transform spec: {0}")]
    Spec(String),
    #[error("unknown feature {0:?}")]
    UnknownFeature(String),
    #[error("contribution set has {got} features, expected {expected}")]
    Dimension { expected: usize, got: usize },
}
