//! Gradient-boosted tree ensembles for binary failure prediction.
//!
//! Trees route a row with a strict comparison: `value < threshold` goes left,
//! anything else goes right, and a missing value follows the node's stored
//! missing direction. The ensemble output is a log-odds margin; the
//! probability is the logistic of that margin.

mod format;
mod train;

use std::collections::HashMap;

use thiserror::Error;

pub use format::{load_model, load_model_file, save_model, save_model_file};
pub use train::{train_matrix, train_reference, TrainParams};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model document is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("model io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("tree {tree}, node {node}: {message}")]
    Structure { tree: usize, node: u32, message: String },
    #[error("row has {got} values but the model expects {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("training error: {0}")]
    Training(String),
}

/// Where a missing value is routed at a split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingDirection {
    #[default]
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub left: u32,
    pub right: u32,
    pub missing: MissingDirection,
    pub gain: f64,
}

impl Split {
    /// Child id taken by `value`.
    #[inline]
    pub fn route(&self, value: Option<f64>) -> u32 {
        match value {
            Some(v) if v < self.threshold => self.left,
            Some(_) => self.right,
            None => match self.missing {
                MissingDirection::Left => self.left,
                MissingDirection::Right => self.right,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Split(Split),
    Leaf(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    pub node_id: u32,
    pub kind: NodeKind,
}

impl TreeNode {
    pub fn leaf(node_id: u32, value: f64) -> Self {
        TreeNode {
            node_id,
            kind: NodeKind::Leaf(value),
        }
    }

    pub fn split(node_id: u32, feature: usize, threshold: f64, left: u32, right: u32) -> Self {
        TreeNode {
            node_id,
            kind: NodeKind::Split(Split {
                feature,
                threshold,
                left,
                right,
                missing: MissingDirection::Left,
                gain: 0.0,
            }),
        }
    }

    pub fn with_gain(mut self, gain: f64) -> Self {
        if let NodeKind::Split(s) = &mut self.kind {
            s.gain = gain;
        }
        self
    }

    pub fn with_missing(mut self, missing: MissingDirection) -> Self {
        if let NodeKind::Split(s) = &mut self.kind {
            s.missing = missing;
        }
        self
    }
}

/// A validated binary tree. Node ids are preserved from the source document;
/// lookups go through a position table built once at construction.
#[derive(Debug, Clone)]
pub struct Tree {
    nodes: Vec<TreeNode>,
    positions: HashMap<u32, usize>,
}

impl PartialEq for Tree {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes
    }
}

impl Tree {
    /// Validates the node list of tree number `index` (used only in errors).
    pub fn new(index: usize, nodes: Vec<TreeNode>) -> Result<Self, ModelError> {
        let structural = |node: u32, message: String| ModelError::Structure {
            tree: index,
            node,
            message,
        };
        let mut positions = HashMap::with_capacity(nodes.len());
        for (pos, node) in nodes.iter().enumerate() {
            if positions.insert(node.node_id, pos).is_some() {
                return Err(structural(node.node_id, "duplicate node id".into()));
            }
        }
        if !positions.contains_key(&0) {
            return Err(structural(0, "tree has no root node with id 0".into()));
        }
        let mut parents: HashMap<u32, u32> = HashMap::new();
        for node in &nodes {
            match &node.kind {
                NodeKind::Leaf(v) => {
                    if !v.is_finite() {
                        return Err(structural(node.node_id, "leaf value is not finite".into()));
                    }
                }
                NodeKind::Split(s) => {
                    if !s.threshold.is_finite() {
                        return Err(structural(node.node_id, "threshold is not finite".into()));
                    }
                    if !s.gain.is_finite() || s.gain < 0.0 {
                        return Err(structural(
                            node.node_id,
                            format!("split gain {} is negative or not finite", s.gain),
                        ));
                    }
                    if s.left == s.right {
                        return Err(structural(
                            node.node_id,
                            "left and right child are the same node".into(),
                        ));
                    }
                    for child in [s.left, s.right] {
                        if !positions.contains_key(&child) {
                            return Err(structural(node.node_id, format!("dangling child id {child}")));
                        }
                        if child == 0 {
                            return Err(structural(node.node_id, "root node used as a child".into()));
                        }
                        if let Some(prev) = parents.insert(child, node.node_id) {
                            return Err(structural(
                                child,
                                format!("node has two parents ({prev} and {})", node.node_id),
                            ));
                        }
                    }
                }
            }
        }
        // Every non-root node has exactly one parent; reachability from the
        // root then rules out detached cycles.
        let mut seen = vec![false; nodes.len()];
        let mut stack = vec![positions[&0]];
        while let Some(pos) = stack.pop() {
            if std::mem::replace(&mut seen[pos], true) {
                return Err(structural(nodes[pos].node_id, "cycle detected".into()));
            }
            if let NodeKind::Split(s) = &nodes[pos].kind {
                stack.push(positions[&s.left]);
                stack.push(positions[&s.right]);
            }
        }
        if let Some(pos) = seen.iter().position(|s| !s) {
            return Err(structural(
                nodes[pos].node_id,
                "node is unreachable from the root".into(),
            ));
        }
        Ok(Tree { nodes, positions })
    }

    /// One split on `feature` with two leaves.
    pub fn stump(feature: usize, threshold: f64, left: f64, right: f64) -> Self {
        Tree::new(
            0,
            vec![
                TreeNode::split(0, feature, threshold, 1, 2),
                TreeNode::leaf(1, left),
                TreeNode::leaf(2, right),
            ],
        )
        .expect("stump is well formed")
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    #[inline]
    pub fn node(&self, id: u32) -> &TreeNode {
        &self.nodes[self.positions[&id]]
    }

    pub fn root(&self) -> &TreeNode {
        self.node(0)
    }

    /// Leaf value reached by `row`. The row length is not checked here.
    pub fn leaf_value(&self, row: &[Option<f64>]) -> f64 {
        let mut node = self.root();
        loop {
            match &node.kind {
                NodeKind::Leaf(v) => return *v,
                NodeKind::Split(s) => node = self.node(s.route(row[s.feature])),
            }
        }
    }

    pub fn splits(&self) -> impl Iterator<Item = &Split> {
        self.nodes.iter().filter_map(|n| match &n.kind {
            NodeKind::Split(s) => Some(s),
            NodeKind::Leaf(_) => None,
        })
    }

    pub fn depth(&self) -> usize {
        fn walk(tree: &Tree, id: u32) -> usize {
            match &tree.node(id).kind {
                NodeKind::Leaf(_) => 0,
                NodeKind::Split(s) => 1 + walk(tree, s.left).max(walk(tree, s.right)),
            }
        }
        walk(self, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Objective {
    #[default]
    BinaryLogistic,
}

/// An additive ensemble of trees on the log-odds scale.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeEnsemble {
    trees: Vec<Tree>,
    base_score: f64,
    n_features: usize,
    objective: Objective,
}

impl TreeEnsemble {
    pub fn new(trees: Vec<Tree>, base_score: f64, n_features: usize) -> Result<Self, ModelError> {
        if !base_score.is_finite() {
            return Err(ModelError::Schema("base_score is not finite".into()));
        }
        for (ti, tree) in trees.iter().enumerate() {
            for node in tree.nodes() {
                if let NodeKind::Split(s) = &node.kind {
                    if s.feature >= n_features {
                        return Err(ModelError::Structure {
                            tree: ti,
                            node: node.node_id,
                            message: format!("feature index {} out of range for {n_features} features", s.feature),
                        });
                    }
                }
            }
        }
        Ok(TreeEnsemble {
            trees,
            base_score,
            n_features,
            objective: Objective::BinaryLogistic,
        })
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn base_score(&self) -> f64 {
        self.base_score
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    /// Same trees, different base score.
    pub fn with_base_score(&self, base_score: f64) -> Self {
        TreeEnsemble {
            base_score,
            ..self.clone()
        }
    }

    pub fn check_row(&self, row: &[Option<f64>]) -> Result<(), ModelError> {
        if row.len() != self.n_features {
            return Err(ModelError::Dimension {
                expected: self.n_features,
                got: row.len(),
            });
        }
        Ok(())
    }

    pub fn predict_margin(&self, row: &[Option<f64>]) -> Result<f64, ModelError> {
        self.check_row(row)?;
        Ok(self.margin_unchecked(row))
    }

    pub fn predict_proba(&self, row: &[Option<f64>]) -> Result<f64, ModelError> {
        self.predict_margin(row).map(logistic)
    }

    pub(crate) fn margin_unchecked(&self, row: &[Option<f64>]) -> f64 {
        self.trees
            .iter()
            .fold(self.base_score, |acc, t| acc + t.leaf_value(row))
    }

    /// Total recorded split gain per feature, summed over every tree.
    pub fn gain_totals(&self) -> Vec<f64> {
        let mut totals = vec![0.0; self.n_features];
        for s in self.trees.iter().flat_map(Tree::splits) {
            totals[s.feature] += s.gain;
        }
        totals
    }

    /// Whether each feature appears in at least one split.
    pub fn used_features(&self) -> Vec<bool> {
        let mut used = vec![false; self.n_features];
        for s in self.trees.iter().flat_map(Tree::splits) {
            used[s.feature] = true;
        }
        used
    }
}

#[inline]
pub fn logistic(margin: f64) -> f64 {
    1.0 / (1.0 + (-margin).exp())
}

/// Wraps every value as present.
pub fn dense(values: &[f64]) -> Vec<Option<f64>> {
    values.iter().copied().map(Some).collect()
}
