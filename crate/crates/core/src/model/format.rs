use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{MissingDirection, ModelError, NodeKind, Split, Tree, TreeEnsemble, TreeNode};

const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    version: u32,
    objective: String,
    base_score: f64,
    n_features: usize,
    trees: Vec<TreeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeDoc {
    nodes: Vec<NodeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    feature: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    left: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    right: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    missing: Option<MissingDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gain: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    leaf: Option<f64>,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum MissingDoc {
    Left,
    Right,
}

impl NodeDoc {
    fn into_node(self, tree: usize) -> Result<TreeNode, ModelError> {
        let err = |message: &str| ModelError::Structure {
            tree,
            node: self.id,
            message: message.to_string(),
        };
        let split_fields = [
            self.feature.is_some(),
            self.threshold.is_some(),
            self.left.is_some(),
            self.right.is_some(),
        ];
        let any_split = split_fields.iter().any(|&b| b) || self.missing.is_some() || self.gain.is_some();
        match (self.leaf, any_split) {
            (Some(_), true) => Err(err("node carries both a leaf value and split fields")),
            (Some(value), false) => Ok(TreeNode::leaf(self.id, value)),
            (None, false) => Err(err("node has neither a leaf value nor split fields")),
            (None, true) => {
                let (Some(feature), Some(threshold), Some(left), Some(right)) =
                    (self.feature, self.threshold, self.left, self.right)
                else {
                    return Err(err("split node needs feature, threshold, left and right"));
                };
                let missing = match self.missing {
                    Some(MissingDoc::Right) => MissingDirection::Right,
                    Some(MissingDoc::Left) | None => MissingDirection::Left,
                };
                Ok(TreeNode {
                    node_id: self.id,
                    kind: NodeKind::Split(Split {
                        feature,
                        threshold,
                        left,
                        right,
                        missing,
                        gain: self.gain.unwrap_or(0.0),
                    }),
                })
            }
        }
    }

    fn from_node(node: &TreeNode) -> Self {
        match &node.kind {
            NodeKind::Leaf(v) => NodeDoc {
                id: node.node_id,
                feature: None,
                threshold: None,
                left: None,
                right: None,
                missing: None,
                gain: None,
                leaf: Some(*v),
            },
            NodeKind::Split(s) => NodeDoc {
                id: node.node_id,
                feature: Some(s.feature),
                threshold: Some(s.threshold),
                left: Some(s.left),
                right: Some(s.right),
                missing: Some(match s.missing {
                    MissingDirection::Left => MissingDoc::Left,
                    MissingDirection::Right => MissingDoc::Right,
                }),
                gain: Some(s.gain),
                leaf: None,
            },
        }
    }
}

/// Parses and validates a model document.
pub fn load_model(document: &str) -> Result<TreeEnsemble, ModelError> {
    let doc: ModelDoc = serde_json::from_str(document)?;
    if doc.version != FORMAT_VERSION {
        return Err(ModelError::Schema(format!(
            "unsupported model version {} (expected {FORMAT_VERSION})",
            doc.version
        )));
    }
    if doc.objective != "binary_logistic" {
        return Err(ModelError::Schema(format!("unsupported objective {:?}", doc.objective)));
    }
    let trees = doc
        .trees
        .into_iter()
        .enumerate()
        .map(|(ti, t)| {
            let nodes = t
                .nodes
                .into_iter()
                .map(|n| n.into_node(ti))
                .collect::<Result<Vec<_>, _>>()?;
            Tree::new(ti, nodes)
        })
        .collect::<Result<Vec<_>, _>>()?;
    TreeEnsemble::new(trees, doc.base_score, doc.n_features)
}

/// Serializes a model to its JSON document. Output is deterministic.
pub fn save_model(model: &TreeEnsemble) -> String {
    let doc = ModelDoc {
        version: FORMAT_VERSION,
        objective: "binary_logistic".into(),
        base_score: model.base_score(),
        n_features: model.n_features(),
        trees: model
            .trees()
            .iter()
            .map(|t| TreeDoc {
                nodes: t.nodes().iter().map(NodeDoc::from_node).collect(),
            })
            .collect(),
    };
    serde_json::to_string(&doc).expect("model document serializes")
}

pub fn load_model_file(path: impl AsRef<Path>) -> Result<TreeEnsemble, ModelError> {
    load_model(&std::fs::read_to_string(path)?)
}

pub fn save_model_file(model: &TreeEnsemble, path: impl AsRef<Path>) -> Result<(), ModelError> {
    std::fs::write(path, save_model(model))?;
    Ok(())
}
