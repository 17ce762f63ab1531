use serde::Serialize;

use super::{local_contributions, ContributionSet, ExplainError};
use crate::data::{EntityRow, RowRef};
use crate::model::{logistic, TreeEnsemble};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prediction {
    pub margin: f64,
    pub probability: f64,
}

impl Prediction {
    pub fn from_margin(margin: f64) -> Self {
        Prediction {
            margin,
            probability: logistic(margin),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureComparison {
    pub value_a: Option<f64>,
    pub value_b: Option<f64>,
    pub contribution_a: f64,
    pub contribution_b: f64,
    /// `contribution_b - contribution_a`.
    pub delta_contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub rows: (RowRef, RowRef),
    pub features: Vec<FeatureComparison>,
    pub predictions: (Prediction, Prediction),
}

/// `b - a` per feature.
pub fn contribution_deltas(a: &ContributionSet, b: &ContributionSet) -> Vec<f64> {
    a.contributions
        .iter()
        .zip(&b.contributions)
        .map(|(ca, cb)| cb - ca)
        .collect()
}

/// Explains both rows against the same background and lines them up.
pub fn compare_rows(
    model: &TreeEnsemble,
    row_a: &EntityRow,
    row_b: &EntityRow,
    background: &[Vec<Option<f64>>],
) -> Result<ComparisonReport, ExplainError> {
    let a = local_contributions(model, &row_a.values, background)?;
    let b = local_contributions(model, &row_b.values, background)?;
    let deltas = contribution_deltas(&a, &b);
    let features = (0..model.n_features())
        .map(|i| FeatureComparison {
            value_a: row_a.values[i],
            value_b: row_b.values[i],
            contribution_a: a.contributions[i],
            contribution_b: b.contributions[i],
            delta_contribution: deltas[i],
        })
        .collect();
    Ok(ComparisonReport {
        rows: (row_a.key(), row_b.key()),
        features,
        predictions: (
            Prediction::from_margin(a.predicted_margin),
            Prediction::from_margin(b.predicted_margin),
        ),
    })
}
