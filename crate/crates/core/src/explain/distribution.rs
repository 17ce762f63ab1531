use serde::Serialize;

use super::ExplainError;
use crate::data::Dataset;

/// Five-number summary over the present values of a feature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub count: usize,
}

impl BoxStats {
    /// Quartiles interpolate linearly between order statistics at position
    /// `p * (n - 1)`.
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Some(BoxStats {
            min: sorted[0],
            q1: quantile_sorted(&sorted, 0.25),
            median: quantile_sorted(&sorted, 0.5),
            q3: quantile_sorted(&sorted, 0.75),
            max: sorted[sorted.len() - 1],
            count: sorted.len(),
        })
    }
}

fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let (a, b) = (sorted[lo], sorted[hi]);
    (a + (h - lo as f64) * (b - a)).clamp(a, b)
}

pub fn feature_distribution(dataset: &Dataset, feature: usize) -> Result<BoxStats, ExplainError> {
    if feature >= dataset.n_features() {
        return Err(ExplainError::UnknownFeature(feature));
    }
    let present: Vec<f64> = dataset.rows().iter().filter_map(|r| r.values[feature]).collect();
    BoxStats::from_values(&present).ok_or(ExplainError::EmptyDistribution(feature))
}
