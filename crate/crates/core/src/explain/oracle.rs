//! Brute-force Shapley values by enumerating every coalition of the features
//! the model actually splits on. Exponential in that count; meant for checking
//! [`super::local_contributions`], not for serving.

use super::{check_background, ContributionSet, ExplainError};
use crate::model::TreeEnsemble;

/// Most participating features the oracle will enumerate (2^14 coalitions).
pub const ORACLE_FEATURE_CAP: usize = 14;

pub fn shapley_oracle(
    model: &TreeEnsemble,
    row: &[Option<f64>],
    background: &[Vec<Option<f64>>],
) -> Result<ContributionSet, ExplainError> {
    if row.len() != model.n_features() {
        return Err(ExplainError::Dimension {
            expected: model.n_features(),
            got: row.len(),
        });
    }
    check_background(model.n_features(), background)?;
    let players: Vec<usize> = model
        .used_features()
        .iter()
        .enumerate()
        .filter_map(|(i, &u)| u.then_some(i))
        .collect();
    let m = players.len();
    if m > ORACLE_FEATURE_CAP {
        return Err(ExplainError::OracleRefusal {
            features: m,
            cap: ORACLE_FEATURE_CAP,
        });
    }

    // v(S) for every coalition S, indexed by bitmask over `players`
    let mut value = vec![0.0; 1 << m];
    let mut composite = vec![None; row.len()];
    for (mask, v) in value.iter_mut().enumerate() {
        let mut total = 0.0;
        for b in background {
            composite.copy_from_slice(b);
            for (bit, &f) in players.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    composite[f] = row[f];
                }
            }
            total += model.predict_margin(&composite)?;
        }
        *v = total / background.len() as f64;
    }

    let factorial: Vec<f64> = (0..=m)
        .scan(1.0, |acc, k| {
            if k > 0 {
                *acc *= k as f64;
            }
            Some(*acc)
        })
        .collect();
    let mut phi = vec![0.0; row.len()];
    for (bit, &f) in players.iter().enumerate() {
        let mut total = 0.0;
        for mask in 0..(1usize << m) {
            if mask & (1 << bit) != 0 {
                continue;
            }
            let s = mask.count_ones() as usize;
            let weight = factorial[s] * factorial[m - s - 1] / factorial[m];
            total += weight * (value[mask | (1 << bit)] - value[mask]);
        }
        phi[f] = total;
    }
    Ok(ContributionSet {
        row: None,
        base_value: value[0],
        predicted_margin: model.predict_margin(row)?,
        contributions: phi,
    })
}
