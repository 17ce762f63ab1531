//! Core library for brakepad failure triage.
//!
//! * [`model`] holds the gradient-boosted tree format, inference and a small
//!   reference trainer.
//! * [`explain`] computes local Shapley contributions, global importances,
//!   nearest historic cases, row comparisons and per-feature summaries.
//! * [`features`] maps model columns into the human-facing feature space.
//! * [`data`] loads turbine readings and generates synthetic fleets.
//! * [`kpi`] records alert/decision/outcome events and computes deployment KPIs.

pub mod data;
pub mod explain;
pub mod features;
pub mod kpi;
pub mod model;
pub mod testkit;

pub use data::{Dataset, EntityRow, RowRef};
pub use explain::ContributionSet;
pub use features::{FeatureCatalog, TransformSpec};
pub use model::{TrainParams, TreeEnsemble};
