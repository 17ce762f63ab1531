use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use serde::{Deserialize, Serialize};

use super::ExplainError;
use crate::data::{Dataset, FeatureStats, RowRef};
use crate::features::ValueType;

/// Distance between turbine readings.
///
/// `d(x, y) = sqrt(sum_i w_i * t_i)` over the selected features, where for a
/// numeric or boolean feature `t_i` is the squared difference (divided by the
/// feature's training standard deviation when standardizing; zero-deviation
/// features contribute 0) and for a categorical feature `t_i` is 1 on a
/// mismatch. A value missing on exactly one side costs 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DistanceConfig {
    /// Column indices; `None` selects every non-categorical column.
    pub features: Option<Vec<usize>>,
    /// Per-column weights; unlisted columns weigh 1.
    pub weights: BTreeMap<usize, f64>,
    pub standardize: bool,
}

impl Default for DistanceConfig {
    fn default() -> Self {
        DistanceConfig {
            features: None,
            weights: BTreeMap::new(),
            standardize: true,
        }
    }
}

impl DistanceConfig {
    /// Resolves the feature subset and weights for `dataset`.
    pub fn resolve(&self, dataset: &Dataset) -> Result<Vec<(usize, f64)>, ExplainError> {
        let n = dataset.n_features();
        let subset: Vec<usize> = match &self.features {
            Some(list) => list.clone(),
            None => (0..n)
                .filter(|&i| dataset.value_types()[i] != ValueType::Categorical)
                .collect(),
        };
        if subset.is_empty() {
            return Err(ExplainError::Config("distance uses no features".into()));
        }
        if let Some(&bad) = subset.iter().find(|&&i| i >= n) {
            return Err(ExplainError::UnknownFeature(bad));
        }
        if let Some((&bad, _)) = self.weights.iter().find(|(&i, _)| i >= n) {
            return Err(ExplainError::UnknownFeature(bad));
        }
        if let Some((&i, w)) = self.weights.iter().find(|(_, w)| !(w.is_finite() && **w >= 0.0)) {
            return Err(ExplainError::Config(format!(
                "weight {w} for feature {i} is not a finite non-negative number"
            )));
        }
        let resolved: Vec<(usize, f64)> = subset
            .into_iter()
            .map(|i| (i, self.weights.get(&i).copied().unwrap_or(1.0)))
            .collect();
        if resolved.iter().all(|&(_, w)| w == 0.0) {
            return Err(ExplainError::Config("all distance weights are zero".into()));
        }
        Ok(resolved)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Neighbor {
    pub row: RowRef,
    pub distance: f64,
    pub label: Option<bool>,
}

/// Distance between two rows under resolved `(feature, weight)` pairs.
pub fn row_distance(
    a: &[Option<f64>],
    b: &[Option<f64>],
    features: &[(usize, f64)],
    types: &[ValueType],
    stats: Option<&[Option<FeatureStats>]>,
) -> f64 {
    let mut total = 0.0;
    for &(i, w) in features {
        let term = match (a[i], b[i]) {
            (None, None) => 0.0,
            (None, Some(_)) | (Some(_), None) => 1.0,
            (Some(x), Some(y)) => match types[i] {
                ValueType::Categorical => {
                    if x == y {
                        0.0
                    } else {
                        1.0
                    }
                }
                ValueType::Numeric | ValueType::Boolean => match stats {
                    None => (x - y) * (x - y),
                    Some(stats) => match stats[i] {
                        Some(s) if s.std > 0.0 => {
                            let z = (x - y) / s.std;
                            z * z
                        }
                        _ => 0.0,
                    },
                },
            },
        };
        total += w * term;
    }
    total.sqrt()
}

/// Heap entry ordered by distance, then row key.
struct Ranked<'a> {
    distance: f64,
    entity_id: &'a str,
    row_id: i64,
    index: usize,
}

impl Ord for Ranked<'_> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then_with(|| self.entity_id.cmp(other.entity_id))
            .then(self.row_id.cmp(&other.row_id))
    }
}

impl PartialOrd for Ranked<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Ranked<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ranked<'_> {}

/// The `k` closest dataset rows to `query`, nearest first, ties broken by
/// `(entity_id, row_id)`. Returns every row when `k` exceeds the dataset.
pub fn nearest_neighbors(
    dataset: &Dataset,
    query: &[Option<f64>],
    k: usize,
    config: &DistanceConfig,
) -> Result<Vec<Neighbor>, ExplainError> {
    if k == 0 {
        return Err(ExplainError::Config("k must be at least 1".into()));
    }
    if dataset.is_empty() {
        return Err(ExplainError::Config("dataset is empty".into()));
    }
    if query.len() != dataset.n_features() {
        return Err(ExplainError::Dimension {
            expected: dataset.n_features(),
            got: query.len(),
        });
    }
    let features = config.resolve(dataset)?;
    let stats = config.standardize.then(|| dataset.stats());

    // max-heap holding the k best rows seen so far
    let mut heap = BinaryHeap::with_capacity(k + 1);
    for (index, row) in dataset.rows().iter().enumerate() {
        let candidate = Ranked {
            distance: row_distance(query, &row.values, &features, dataset.value_types(), stats),
            entity_id: &row.entity_id,
            row_id: row.row_id,
            index,
        };
        if heap.len() < k {
            heap.push(candidate);
        } else if heap.peek().is_some_and(|worst| candidate < *worst) {
            heap.pop();
            heap.push(candidate);
        }
    }
    Ok(heap
        .into_sorted_vec()
        .into_iter()
        .map(|r| {
            let row = &dataset.rows()[r.index];
            Neighbor {
                row: row.key(),
                distance: r.distance,
                label: row.label,
            }
        })
        .collect())
}
