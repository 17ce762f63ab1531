use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{dataset_contributions, ContributionSet, ExplainError};
use crate::data::Dataset;
use crate::model::TreeEnsemble;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImportanceMethod {
    /// Total split gain per feature, normalized to sum to one.
    Gain,
    /// Mean absolute contribution, normalized to sum to one.
    MeanAbsShap,
    /// Mean signed contribution, not normalized.
    SignedMeanShap,
}

impl ImportanceMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ImportanceMethod::Gain => "gain",
            ImportanceMethod::MeanAbsShap => "mean_abs_shap",
            ImportanceMethod::SignedMeanShap => "signed_mean_shap",
        }
    }
}

impl fmt::Display for ImportanceMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ImportanceMethod {
    type Err = ExplainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gain" => Ok(ImportanceMethod::Gain),
            "mean_abs_shap" => Ok(ImportanceMethod::MeanAbsShap),
            "signed_mean_shap" => Ok(ImportanceMethod::SignedMeanShap),
            other => Err(ExplainError::Config(format!("unknown importance method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImportanceTable {
    pub method: ImportanceMethod,
    pub scores: Vec<f64>,
    pub normalized: bool,
}

impl ImportanceTable {
    /// Feature indices from most to least important; ties by index.
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.scores.len()).collect();
        order.sort_by(|&a, &b| self.scores[b].total_cmp(&self.scores[a]).then(a.cmp(&b)));
        order
    }
}

pub fn global_importance(
    model: &TreeEnsemble,
    dataset: &Dataset,
    background: &[Vec<Option<f64>>],
    method: ImportanceMethod,
) -> Result<ImportanceTable, ExplainError> {
    match method {
        ImportanceMethod::Gain => Ok(gain_table(model.gain_totals())),
        _ => {
            if dataset.is_empty() {
                return Err(ExplainError::Config(format!(
                    "{method} importance needs a non-empty dataset"
                )));
            }
            let sets = dataset_contributions(model, dataset, background)?;
            importance_from_contributions(&sets, method)
        }
    }
}

/// SHAP-based importance over precomputed contribution sets. `Gain` is not
/// derivable from contributions and is rejected.
pub fn importance_from_contributions(
    sets: &[ContributionSet],
    method: ImportanceMethod,
) -> Result<ImportanceTable, ExplainError> {
    let Some(first) = sets.first() else {
        return Err(ExplainError::Config(format!(
            "{method} importance needs a non-empty dataset"
        )));
    };
    let n = first.contributions.len();
    let mut totals = vec![0.0; n];
    for set in sets {
        if set.contributions.len() != n {
            return Err(ExplainError::Dimension {
                expected: n,
                got: set.contributions.len(),
            });
        }
        for (t, &phi) in totals.iter_mut().zip(&set.contributions) {
            *t += match method {
                ImportanceMethod::MeanAbsShap => phi.abs(),
                ImportanceMethod::SignedMeanShap => phi,
                ImportanceMethod::Gain => {
                    return Err(ExplainError::Config(
                        "gain importance comes from the model, not contributions".into(),
                    ))
                }
            };
        }
    }
    let count = sets.len() as f64;
    let means: Vec<f64> = totals.into_iter().map(|t| t / count).collect();
    Ok(match method {
        ImportanceMethod::SignedMeanShap => ImportanceTable {
            method,
            scores: means,
            normalized: false,
        },
        _ => ImportanceTable {
            method,
            scores: normalize(means),
            normalized: true,
        },
    })
}

/// Normalized table from raw per-feature gain totals.
pub(crate) fn gain_table(totals: Vec<f64>) -> ImportanceTable {
    ImportanceTable {
        method: ImportanceMethod::Gain,
        scores: normalize(totals),
        normalized: true,
    }
}

fn normalize(scores: Vec<f64>) -> Vec<f64> {
    let total: f64 = scores.iter().sum();
    if total > 0.0 {
        scores.into_iter().map(|s| s / total).collect()
    } else {
        scores
    }
}
