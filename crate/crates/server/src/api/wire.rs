//! Response bodies.

use brakewatch_core::explain::{BoxStats, Prediction};
use brakewatch_core::features::ValueType;
use brakewatch_core::kpi::Event;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowOut {
    pub entity_id: String,
    pub row_id: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureOut {
    pub name: String,
    pub display_name: String,
    pub category: String,
    #[serde(rename = "type")]
    pub value_type: ValueType,
    pub unit: Option<String>,
    /// Model columns behind the feature.
    pub columns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeaturesResponse {
    pub features: Vec<FeatureOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntityOut {
    pub entity_id: String,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntitiesResponse {
    pub entities: Vec<EntityOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowSummary {
    pub row_id: i64,
    pub label: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntityRowsResponse {
    pub entity_id: String,
    pub rows: Vec<RowSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictResponse {
    pub row: Option<RowOut>,
    pub margin: f64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContributionOut {
    pub feature: String,
    pub display_name: String,
    pub category: String,
    pub value: String,
    pub contribution: f64,
}

/// `base_value + sum(contributions[].contribution) == predicted_margin`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContributionsResponse {
    pub row: Option<RowOut>,
    pub base_value: f64,
    pub predicted_margin: f64,
    pub probability: f64,
    pub contributions: Vec<ContributionOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeighborOut {
    pub entity_id: String,
    pub row_id: i64,
    pub distance: f64,
    pub label: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarResponse {
    pub query: Option<RowOut>,
    pub neighbors: Vec<NeighborOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareFeatureOut {
    pub feature: String,
    pub display_name: String,
    pub category: String,
    pub value_a: String,
    pub value_b: String,
    pub contribution_a: f64,
    pub contribution_b: f64,
    /// `contribution_b - contribution_a`.
    pub delta_contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareResponse {
    pub rows: (RowOut, RowOut),
    pub predictions: (Prediction, Prediction),
    pub base_value: f64,
    pub features: Vec<CompareFeatureOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImportanceOut {
    pub feature: String,
    pub display_name: String,
    pub category: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImportanceResponse {
    pub method: &'static str,
    pub normalized: bool,
    pub features: Vec<ImportanceOut>,
}

/// `value` is the raw model value of a single-column feature and null for
/// groups; `missing` marks rows with no reading.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterPointOut {
    pub entity_id: String,
    pub row_id: i64,
    pub value: Option<f64>,
    pub display_value: String,
    pub missing: bool,
    pub contribution: f64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterResponse {
    pub feature: String,
    pub display_name: String,
    pub points: Vec<ScatterPointOut>,
}

/// Statistics are in display units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionResponse {
    pub feature: String,
    pub display_name: String,
    pub unit: Option<String>,
    #[serde(flatten)]
    pub stats: BoxStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventResponse {
    pub index: usize,
    pub event: Event,
}
