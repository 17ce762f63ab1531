//! Exact interventional Shapley values for tree ensembles.
//!
//! For one tree, one explained row `x` and one background row `b`, walk the
//! tree following both rows at once. Where they disagree on a split, the
//! split's feature is assigned to either `x` or `b` and both branches are
//! explored; a feature that was already assigned keeps its side. A leaf
//! reached with `a` features taken from `x` and `c` taken from `b` is only
//! reached by coalitions containing all `a` and none of the `c`, which gives
//! each `x` feature `(a-1)! c! / (a+c)!` of the leaf value and each `b` feature
//! minus `a! (c-1)! / (a+c)!` of it. Averaging over background rows and
//! summing over trees yields the attribution of the ensemble margin.

use super::{check_background, ContributionSet, ExplainError};
use crate::data::Dataset;
use crate::model::{NodeKind, Tree, TreeEnsemble};

/// Interventional Shapley attribution of `row` against `background`.
pub fn local_contributions(
    model: &TreeEnsemble,
    row: &[Option<f64>],
    background: &[Vec<Option<f64>>],
) -> Result<ContributionSet, ExplainError> {
    model.check_row(row).map_err(|_| ExplainError::Dimension {
        expected: model.n_features(),
        got: row.len(),
    })?;
    check_background(model.n_features(), background)?;

    let max_depth = model.trees().iter().map(Tree::depth).max().unwrap_or(0);
    let weights = Weights::new(max_depth);
    let mut phi = vec![0.0; model.n_features()];
    let mut background_total = 0.0;
    let mut walk = Walk {
        x: row,
        b: &[],
        from_x: Vec::with_capacity(max_depth),
        from_b: Vec::with_capacity(max_depth),
        weights: &weights,
        phi: &mut phi,
    };
    for b in background {
        walk.b = b;
        for tree in model.trees() {
            background_total += tree.leaf_value(b);
            walk.descend(tree, 0);
        }
    }
    let n = background.len() as f64;
    for p in phi.iter_mut() {
        *p /= n;
    }
    Ok(ContributionSet {
        row: None,
        base_value: model.base_score() + background_total / n,
        predicted_margin: model.predict_margin(row)?,
        contributions: phi,
    })
}

/// Contributions for every dataset row, in dataset order.
pub fn dataset_contributions(
    model: &TreeEnsemble,
    dataset: &Dataset,
    background: &[Vec<Option<f64>>],
) -> Result<Vec<ContributionSet>, ExplainError> {
    dataset
        .rows()
        .iter()
        .map(|r| local_contributions(model, &r.values, background).map(|c| c.with_row(r.key())))
        .collect()
}

/// `pos[a][c] = (a-1)! c! / (a+c)!`, `neg[a][c] = a! (c-1)! / (a+c)!`.
struct Weights {
    pos: Vec<Vec<f64>>,
    neg: Vec<Vec<f64>>,
}

impl Weights {
    fn new(max_depth: usize) -> Self {
        let n = max_depth + 1;
        let mut pos = vec![vec![0.0; n]; n];
        let mut neg = vec![vec![0.0; n]; n];
        for a in 0..n {
            for c in 0..n {
                if a + c == 0 || a + c > max_depth {
                    continue;
                }
                let total = (a + c) as f64;
                if a > 0 {
                    pos[a][c] = 1.0 / (total * binomial(a + c - 1, c));
                }
                if c > 0 {
                    neg[a][c] = 1.0 / (total * binomial(a + c - 1, a));
                }
            }
        }
        Weights { pos, neg }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

struct Walk<'a> {
    x: &'a [Option<f64>],
    b: &'a [Option<f64>],
    from_x: Vec<usize>,
    from_b: Vec<usize>,
    weights: &'a Weights,
    phi: &'a mut [f64],
}

impl Walk<'_> {
    fn descend(&mut self, tree: &Tree, id: u32) {
        match &tree.node(id).kind {
            NodeKind::Leaf(value) => {
                let (a, c) = (self.from_x.len(), self.from_b.len());
                if a > 0 {
                    let share = value * self.weights.pos[a][c];
                    for &f in &self.from_x {
                        self.phi[f] += share;
                    }
                }
                if c > 0 {
                    let share = value * self.weights.neg[a][c];
                    for &f in &self.from_b {
                        self.phi[f] -= share;
                    }
                }
            }
            NodeKind::Split(s) => {
                let via_x = s.route(self.x[s.feature]);
                let via_b = s.route(self.b[s.feature]);
                if via_x == via_b || self.from_x.contains(&s.feature) {
                    self.descend(tree, via_x);
                } else if self.from_b.contains(&s.feature) {
                    self.descend(tree, via_b);
                } else {
                    self.from_x.push(s.feature);
                    self.descend(tree, via_x);
                    self.from_x.pop();
                    self.from_b.push(s.feature);
                    self.descend(tree, via_b);
                    self.from_b.pop();
                }
            }
        }
    }
}
