//! Writes a self-contained demo bundle: a synthetic stand-in fleet, its
//! catalog and transform spec, a model trained on it and a service config
//! pointing at all of them.

use std::fmt;
use std::path::{Path, PathBuf};

use brakewatch_core::data::{generate_synthetic, synthetic_catalog, synthetic_transforms, write_csv, SyntheticParams};
use brakewatch_core::model::{save_model, train_reference, TrainParams};
use serde::Deserialize;

use crate::config::AppConfig;
use crate::error::StartupError;

/// Params file layout:
///
/// ```toml
/// output_dir = "demo"
/// [data]
/// n_turbines = 10
/// n_days = 60
/// [train]
/// n_trees = 30
/// ```
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleParams {
    pub output_dir: PathBuf,
    #[serde(default)]
    pub data: SyntheticParams,
    #[serde(default)]
    pub train: TrainParams,
    #[serde(default)]
    pub port: Option<u16>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BundleSummary {
    pub output_dir: PathBuf,
    pub rows: usize,
    pub positive_rows: usize,
    pub episodes: usize,
    pub trees: usize,
}

impl fmt::Display for BundleSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "wrote {}: {} rows ({} labeled positive), {} failure episodes, {} trees",
            self.output_dir.display(),
            self.rows,
            self.positive_rows,
            self.episodes,
            self.trees
        )
    }
}

pub const DATASET_FILE: &str = "dataset.csv";
pub const CATALOG_FILE: &str = "catalog.csv";
pub const TRANSFORMS_FILE: &str = "transforms.json";
pub const MODEL_FILE: &str = "model.json";
pub const CONFIG_FILE: &str = "config.toml";
pub const EVENTS_FILE: &str = "events.ndjson";

/// Reads the params file; a relative `output_dir` is taken relative to it.
pub fn generate_bundle_file(params_path: &Path) -> Result<BundleSummary, StartupError> {
    let fail = |message: String| StartupError::Config {
        path: params_path.to_path_buf(),
        message,
    };
    let text = std::fs::read_to_string(params_path).map_err(|e| fail(e.to_string()))?;
    let mut params: BundleParams = toml::from_str(&text).map_err(|e| fail(e.to_string()))?;
    if params.output_dir.is_relative() {
        params.output_dir = params_path.parent().unwrap_or(Path::new("")).join(&params.output_dir);
    }
    generate_bundle(&params)
}

pub fn generate_bundle(params: &BundleParams) -> Result<BundleSummary, StartupError> {
    let catalog = synthetic_catalog();
    let fleet = generate_synthetic(&params.data, &catalog).map_err(|e| StartupError::Generate(e.to_string()))?;
    if fleet.episodes.is_empty() {
        return Err(StartupError::Generate(
            "the synthetic fleet has no failure episodes to learn from; raise failure_rate_per_month or n_days, or change the seed"
                .into(),
        ));
    }
    let model = train_reference(&fleet.dataset, &params.train).map_err(|e| StartupError::Generate(e.to_string()))?;

    let dir = &params.output_dir;
    std::fs::create_dir_all(dir).map_err(|source| StartupError::Write {
        path: dir.clone(),
        source,
    })?;
    let mut config = AppConfig::with_paths(MODEL_FILE, DATASET_FILE, CATALOG_FILE);
    config.transforms_path = Some(TRANSFORMS_FILE.into());
    config.event_log_path = Some(EVENTS_FILE.into());
    if let Some(port) = params.port {
        config.port = port;
    }
    let transforms = serde_json::to_string_pretty(&synthetic_transforms()).expect("transform spec serializes") + "\n";
    let config_text = toml::to_string(&config).map_err(|e| StartupError::Generate(e.to_string()))?;

    for (name, contents) in [
        (DATASET_FILE, write_csv(&fleet.dataset)),
        (CATALOG_FILE, catalog.to_csv()),
        (TRANSFORMS_FILE, transforms),
        (MODEL_FILE, save_model(&model)),
        (CONFIG_FILE, config_text),
    ] {
        let path = dir.join(name);
        std::fs::write(&path, contents).map_err(|source| StartupError::Write { path, source })?;
    }
    Ok(BundleSummary {
        output_dir: dir.clone(),
        rows: fleet.dataset.len(),
        positive_rows: fleet.dataset.rows().iter().filter(|r| r.label == Some(true)).count(),
        episodes: fleet.episodes.len(),
        trees: model.trees().len(),
    })
}
