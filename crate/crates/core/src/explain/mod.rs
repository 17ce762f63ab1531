//! Explanations for tree-ensemble predictions.
//!
//! All attributions are interventional Shapley values of the ensemble margin
//! with respect to a fixed background sample: a feature outside the
//! coalition takes its value from a background row, and the game value is the
//! mean margin over the background. Attributions live on the margin scale, so
//! `base_value + sum(contributions) == predicted_margin` up to rounding.

mod compare;
mod distribution;
mod importance;
mod neighbors;
pub mod oracle;
mod scatter;
mod shap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::data::{DataError, Dataset, RowRef};
use crate::model::ModelError;

pub use compare::{compare_rows, contribution_deltas, ComparisonReport, FeatureComparison, Prediction};
pub use distribution::{feature_distribution, BoxStats};
pub use importance::{global_importance, importance_from_contributions, ImportanceMethod, ImportanceTable};
pub use neighbors::{nearest_neighbors, row_distance, DistanceConfig, Neighbor};
pub use oracle::shapley_oracle;
pub use scatter::{feature_scatter, scatter_from_contributions, ScatterPoint};
pub use shap::{dataset_contributions, local_contributions};

#[derive(Debug, Error)]
pub enum ExplainError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("row has {got} values but the model expects {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("oracle refuses {features} participating features (cap {cap})")]
    OracleRefusal { features: usize, cap: usize },
    #[error("unknown feature index {0}")]
    UnknownFeature(usize),
    #[error("feature {0} has no present values")]
    EmptyDistribution(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Data(#[from] DataError),
}

/// A local explanation on the margin scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContributionSet {
    pub row: Option<RowRef>,
    /// Mean margin over the background rows.
    pub base_value: f64,
    pub predicted_margin: f64,
    pub contributions: Vec<f64>,
}

impl ContributionSet {
    pub fn with_row(mut self, row: RowRef) -> Self {
        self.row = Some(row);
        self
    }

    /// `base_value + sum(contributions) - predicted_margin`.
    pub fn accuracy_gap(&self) -> f64 {
        self.base_value + self.contributions.iter().sum::<f64>() - self.predicted_margin
    }
}

/// Deterministic background sample of at most `size` dataset rows. Rows are
/// drawn without replacement and returned in key order.
pub fn sample_background(dataset: &Dataset, size: usize, seed: u64) -> Vec<Vec<Option<f64>>> {
    let mut keyed: Vec<_> = dataset.rows().iter().collect();
    keyed.sort_by(|a, b| (&a.entity_id, a.row_id).cmp(&(&b.entity_id, b.row_id)));
    if keyed.len() <= size {
        return keyed.into_iter().map(|r| r.values.clone()).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, keyed.len(), size).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| keyed[i].values.clone()).collect()
}

pub(crate) fn check_background(n_features: usize, background: &[Vec<Option<f64>>]) -> Result<(), ExplainError> {
    if background.is_empty() {
        return Err(ExplainError::Config("background set is empty".into()));
    }
    if let Some(bad) = background.iter().find(|b| b.len() != n_features) {
        return Err(ExplainError::Dimension {
            expected: n_features,
            got: bad.len(),
        });
    }
    Ok(())
}
