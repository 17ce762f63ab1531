//! Reference trainer: second-order gradient boosting for logistic loss with
//! exact greedy split search. Single-threaded and free of sampling, so the
//! same data and parameters always produce the same model bits.

use serde::{Deserialize, Serialize};

use super::{logistic, MissingDirection, ModelError, NodeKind, Split, Tree, TreeEnsemble, TreeNode};
use crate::data::Dataset;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub l2_lambda: f64,
    pub gamma: f64,
    pub min_child_weight: f64,
    /// Recorded for reproducibility; exact greedy search draws no randomness.
    pub seed: u64,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            n_trees: 30,
            max_depth: 3,
            learning_rate: 0.3,
            l2_lambda: 1.0,
            gamma: 0.0,
            min_child_weight: 1.0,
            seed: 0,
        }
    }
}

impl TrainParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: &str| Err(ModelError::Training(m.to_string()));
        if self.n_trees < 1 {
            return bad("n_trees must be at least 1");
        }
        if self.max_depth < 1 {
            return bad("max_depth must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return bad("learning_rate must lie in (0, 1]");
        }
        if [self.l2_lambda, self.gamma, self.min_child_weight]
            .iter()
            .any(|v| v.is_nan() || *v < 0.0)
        {
            return bad("l2_lambda, gamma and min_child_weight must be non-negative");
        }
        Ok(())
    }
}

/// Trains on every row of `dataset`; each row must carry a label.
pub fn train_reference(dataset: &Dataset, params: &TrainParams) -> Result<TreeEnsemble, ModelError> {
    let mut rows = Vec::with_capacity(dataset.len());
    let mut labels = Vec::with_capacity(dataset.len());
    for row in dataset.rows() {
        let label = row
            .label
            .ok_or_else(|| ModelError::Training(format!("row ({}, {}) has no label", row.entity_id, row.row_id)))?;
        rows.push(row.values.as_slice());
        labels.push(label);
    }
    train_matrix(&rows, &labels, dataset.n_features(), params).map(|(m, _)| m)
}

/// Trains on raw rows and binary labels. Also returns the mean training
/// log-loss before the first round and after every round.
pub fn train_matrix(
    rows: &[&[Option<f64>]],
    labels: &[bool],
    n_features: usize,
    params: &TrainParams,
) -> Result<(TreeEnsemble, Vec<f64>), ModelError> {
    params.validate()?;
    if rows.is_empty() {
        return Err(ModelError::Training("empty dataset".into()));
    }
    if rows.len() != labels.len() {
        return Err(ModelError::Training("row and label counts differ".into()));
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != n_features) {
        return Err(ModelError::Training(format!(
            "row {bad} has {} values, expected {n_features}",
            rows[bad].len()
        )));
    }
    let positives = labels.iter().filter(|&&y| y).count();
    if positives == 0 || positives == labels.len() {
        return Err(ModelError::Training("labels contain a single class".into()));
    }
    let p = positives as f64 / labels.len() as f64;
    let base_score = (p / (1.0 - p)).ln();
    let targets: Vec<f64> = labels.iter().map(|&y| if y { 1.0 } else { 0.0 }).collect();

    let mut margins = vec![base_score; rows.len()];
    let mut losses = vec![log_loss(&margins, &targets)];
    let mut trees = Vec::with_capacity(params.n_trees);
    let mut grad = vec![0.0; rows.len()];
    let mut hess = vec![0.0; rows.len()];

    for ti in 0..params.n_trees {
        for i in 0..rows.len() {
            let s = logistic(margins[i]);
            grad[i] = s - targets[i];
            hess[i] = s * (1.0 - s);
        }
        let mut builder = TreeBuilder {
            rows,
            grad: &grad,
            hess: &hess,
            n_features,
            params,
            nodes: Vec::new(),
            next_id: 1,
            leaf_of_row: vec![0.0; rows.len()],
        };
        let all: Vec<usize> = (0..rows.len()).collect();
        builder.grow(0, all, 0);
        let TreeBuilder {
            mut nodes, leaf_of_row, ..
        } = builder;
        for (m, leaf) in margins.iter_mut().zip(&leaf_of_row) {
            *m += leaf;
        }
        nodes.sort_by_key(|n| n.node_id);
        trees.push(Tree::new(ti, nodes)?);
        losses.push(log_loss(&margins, &targets));
    }
    Ok((TreeEnsemble::new(trees, base_score, n_features)?, losses))
}

pub(crate) fn log_loss(margins: &[f64], targets: &[f64]) -> f64 {
    // log(1 + e^m) - y m, written to stay finite for large |m|
    let total: f64 = margins
        .iter()
        .zip(targets)
        .map(|(&m, &y)| m.max(0.0) + (-m.abs()).exp().ln_1p() - y * m)
        .sum();
    total / margins.len() as f64
}

struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
    missing: MissingDirection,
}

struct TreeBuilder<'a> {
    rows: &'a [&'a [Option<f64>]],
    grad: &'a [f64],
    hess: &'a [f64],
    n_features: usize,
    params: &'a TrainParams,
    nodes: Vec<TreeNode>,
    next_id: u32,
    leaf_of_row: Vec<f64>,
}

impl TreeBuilder<'_> {
    fn grow(&mut self, id: u32, members: Vec<usize>, depth: usize) {
        let (g, h) = self.sums(&members);
        if depth < self.params.max_depth {
            if let Some(best) = self.best_split(&members, g, h) {
                let (left_id, right_id) = (self.next_id, self.next_id + 1);
                self.next_id += 2;
                let split = Split {
                    feature: best.feature,
                    threshold: best.threshold,
                    left: left_id,
                    right: right_id,
                    missing: best.missing,
                    gain: best.gain,
                };
                let (left, right): (Vec<usize>, Vec<usize>) = members
                    .into_iter()
                    .partition(|&i| split.route(self.rows[i][best.feature]) == left_id);
                self.nodes.push(TreeNode {
                    node_id: id,
                    kind: NodeKind::Split(split),
                });
                self.grow(left_id, left, depth + 1);
                self.grow(right_id, right, depth + 1);
                return;
            }
        }
        let denom = h + self.params.l2_lambda;
        let weight = if denom > 0.0 {
            -g / denom * self.params.learning_rate
        } else {
            0.0
        };
        for &i in &members {
            self.leaf_of_row[i] = weight;
        }
        self.nodes.push(TreeNode::leaf(id, weight));
    }

    fn sums(&self, members: &[usize]) -> (f64, f64) {
        members
            .iter()
            .fold((0.0, 0.0), |(g, h), &i| (g + self.grad[i], h + self.hess[i]))
    }

    fn score(&self, g: f64, h: f64) -> f64 {
        let denom = h + self.params.l2_lambda;
        if denom > 0.0 {
            g * g / denom
        } else {
            0.0
        }
    }

    /// Exhaustive search; ties keep the earliest candidate, i.e. lowest
    /// feature index, then lowest threshold, then missing-left.
    fn best_split(&self, members: &[usize], g: f64, h: f64) -> Option<Candidate> {
        let parent = self.score(g, h);
        let mcw = self.params.min_child_weight;
        let mut best: Option<Candidate> = None;
        let mut present: Vec<(f64, usize)> = Vec::with_capacity(members.len());
        for feature in 0..self.n_features {
            present.clear();
            let (mut gm, mut hm) = (0.0, 0.0);
            for &i in members {
                match self.rows[i][feature] {
                    Some(v) => present.push((v, i)),
                    None => {
                        gm += self.grad[i];
                        hm += self.hess[i];
                    }
                }
            }
            let has_missing = present.len() < members.len();
            present.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let (mut gl, mut hl) = (0.0, 0.0);
            for k in 0..present.len() {
                let i = present[k].1;
                gl += self.grad[i];
                hl += self.hess[i];
                let Some(&(next, _)) = present.get(k + 1) else { break };
                if next == present[k].0 {
                    continue;
                }
                let directions: &[MissingDirection] = if has_missing {
                    &[MissingDirection::Left, MissingDirection::Right]
                } else {
                    &[MissingDirection::Left]
                };
                for &dir in directions {
                    let (gl2, hl2) = match dir {
                        MissingDirection::Left => (gl + gm, hl + hm),
                        MissingDirection::Right => (gl, hl),
                    };
                    let (gr2, hr2) = (g - gl2, h - hl2);
                    if hl2 < mcw || hr2 < mcw {
                        continue;
                    }
                    let gain = 0.5 * (self.score(gl2, hl2) + self.score(gr2, hr2) - parent) - self.params.gamma;
                    if gain > 0.0 && best.as_ref().is_none_or(|b| gain > b.gain) {
                        best = Some(Candidate {
                            gain,
                            feature,
                            threshold: next,
                            missing: dir,
                        });
                    }
                }
            }
        }
        best
    }
}
