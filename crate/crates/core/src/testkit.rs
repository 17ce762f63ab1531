//! Random models and rows for property tests and benchmarks.
//!
//! Thresholds and row values share a small grid so rows regularly land
//! exactly on split thresholds; some values are missing.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{MissingDirection, Tree, TreeEnsemble, TreeNode};

/// Values drawn for thresholds and (mostly) for row cells.
pub const GRID: [f64; 7] = [-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5];

#[derive(Debug, Clone, Copy)]
pub struct ModelShape {
    pub n_features: usize,
    pub max_used_features: usize,
    pub max_trees: usize,
    pub max_depth: usize,
}

impl Default for ModelShape {
    fn default() -> Self {
        ModelShape {
            n_features: 12,
            max_used_features: 10,
            max_trees: 5,
            max_depth: 3,
        }
    }
}

pub fn random_ensemble(rng: &mut impl Rng, shape: ModelShape) -> TreeEnsemble {
    let mut pool: Vec<usize> = (0..shape.n_features).collect();
    pool.shuffle(rng);
    pool.truncate(rng.gen_range(1..=shape.max_used_features.min(shape.n_features)));
    let n_trees = rng.gen_range(1..=shape.max_trees);
    let trees = (0..n_trees)
        .map(|ti| {
            let depth = rng.gen_range(1..=shape.max_depth);
            let mut nodes = Vec::new();
            let mut next = 1;
            grow(rng, &pool, depth, 0, &mut next, &mut nodes, true);
            Tree::new(ti, nodes).expect("generated tree is well formed")
        })
        .collect();
    let base = rng.gen_range(-1.0..1.0);
    TreeEnsemble::new(trees, base, shape.n_features).expect("features in range")
}

fn grow(
    rng: &mut impl Rng,
    pool: &[usize],
    depth_left: usize,
    id: u32,
    next: &mut u32,
    nodes: &mut Vec<TreeNode>,
    force: bool,
) {
    if depth_left == 0 || !(force || rng.gen_bool(0.75)) {
        nodes.push(TreeNode::leaf(id, rng.gen_range(-2.0..2.0)));
        return;
    }
    let (left, right) = (*next, *next + 1);
    *next += 2;
    let feature = *pool.choose(rng).expect("non-empty pool");
    let threshold = *GRID.choose(rng).expect("non-empty grid");
    let missing = if rng.gen_bool(0.5) {
        MissingDirection::Left
    } else {
        MissingDirection::Right
    };
    nodes.push(
        TreeNode::split(id, feature, threshold, left, right)
            .with_missing(missing)
            .with_gain(rng.gen_range(0.0..5.0)),
    );
    grow(rng, pool, depth_left - 1, left, next, nodes, false);
    grow(rng, pool, depth_left - 1, right, next, nodes, false);
}

/// A row mixing grid values, off-grid values and ~10% missing cells.
pub fn random_row(rng: &mut impl Rng, n_features: usize) -> Vec<Option<f64>> {
    (0..n_features)
        .map(|_| {
            let p: f64 = rng.gen();
            if p < 0.1 {
                None
            } else if p < 0.6 {
                Some(*GRID.choose(rng).expect("non-empty grid"))
            } else {
                Some(rng.gen_range(-2.0..2.0))
            }
        })
        .collect()
}

pub fn random_rows(rng: &mut impl Rng, count: usize, n_features: usize) -> Vec<Vec<Option<f64>>> {
    (0..count).map(|_| random_row(rng, n_features)).collect()
}
