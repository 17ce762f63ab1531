use serde::Serialize;

use super::{dataset_contributions, ContributionSet, ExplainError};
use crate::data::{Dataset, RowRef};
use crate::model::{logistic, TreeEnsemble};

/// One dataset row in a feature-vs-contribution plot. A missing reading keeps
/// its point with `value: None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterPoint {
    pub row: RowRef,
    pub value: Option<f64>,
    pub contribution: f64,
    pub probability: f64,
}

pub fn feature_scatter(
    model: &TreeEnsemble,
    dataset: &Dataset,
    feature: usize,
    background: &[Vec<Option<f64>>],
) -> Result<Vec<ScatterPoint>, ExplainError> {
    if feature >= dataset.n_features() {
        return Err(ExplainError::UnknownFeature(feature));
    }
    if dataset.is_empty() {
        return Err(ExplainError::Config("dataset is empty".into()));
    }
    let sets = dataset_contributions(model, dataset, background)?;
    scatter_from_contributions(dataset, feature, &sets)
}

/// Builds the scatter series from contribution sets aligned with
/// `dataset.rows()`.
pub fn scatter_from_contributions(
    dataset: &Dataset,
    feature: usize,
    sets: &[ContributionSet],
) -> Result<Vec<ScatterPoint>, ExplainError> {
    if feature >= dataset.n_features() {
        return Err(ExplainError::UnknownFeature(feature));
    }
    if sets.len() != dataset.len() {
        return Err(ExplainError::Config(format!(
            "{} contribution sets for {} rows",
            sets.len(),
            dataset.len()
        )));
    }
    Ok(dataset
        .rows()
        .iter()
        .zip(sets)
        .map(|(row, set)| ScatterPoint {
            row: row.key(),
            value: row.values[feature],
            contribution: set.contributions[feature],
            probability: logistic(set.predicted_margin),
        })
        .collect())
}
