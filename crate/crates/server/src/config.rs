use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::StartupError;

/// Service configuration, read from TOML. Relative paths are resolved
/// against the directory holding the config file.
///
/// ```toml
/// model_path = "model.json"
/// dataset_path = "dataset.csv"
/// catalog_path = "catalog.csv"
/// transforms_path = "transforms.json"
/// background_size = 64
/// background_seed = 0
/// listen_addr = "127.0.0.1"
/// port = 8080
/// event_log_path = "events.ndjson"
///
/// [distance]
/// standardize = true
/// weights = { brake_caliper_temp = 2.0 }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppConfig {
    pub model_path: PathBuf,
    pub dataset_path: PathBuf,
    pub catalog_path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transforms_path: Option<PathBuf>,
    #[serde(default = "default_background_size")]
    pub background_size: usize,
    #[serde(default)]
    pub background_seed: u64,
    #[serde(default = "default_listen_addr")]
    pub listen_addr: String,
    #[serde(default = "default_port")]
    pub port: u16,
    /// Appended to on every accepted event and replayed at startup.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event_log_path: Option<PathBuf>,
    #[serde(default)]
    pub distance: DistanceDefaults,
}

/// Default similarity settings, by feature name. A name may be a model
/// column or an interpretable feature, which stands for all its columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DistanceDefaults {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub features: Option<Vec<String>>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub weights: BTreeMap<String, f64>,
    pub standardize: bool,
}

impl Default for DistanceDefaults {
    fn default() -> Self {
        DistanceDefaults {
            features: None,
            weights: BTreeMap::new(),
            standardize: true,
        }
    }
}

fn default_background_size() -> usize {
    64
}

fn default_listen_addr() -> String {
    "127.0.0.1".to_string()
}

fn default_port() -> u16 {
    8080
}

impl AppConfig {
    /// Config with default settings for the given artifact paths.
    pub fn with_paths(model: impl Into<PathBuf>, dataset: impl Into<PathBuf>, catalog: impl Into<PathBuf>) -> Self {
        AppConfig {
            model_path: model.into(),
            dataset_path: dataset.into(),
            catalog_path: catalog.into(),
            transforms_path: None,
            background_size: default_background_size(),
            background_seed: 0,
            listen_addr: default_listen_addr(),
            port: default_port(),
            event_log_path: None,
            distance: DistanceDefaults::default(),
        }
    }

    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, String> {
        let mut config: AppConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        if config.background_size < 1 {
            return Err("background_size must be at least 1".into());
        }
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base_dir.join(&*p);
            }
        };
        resolve(&mut config.model_path);
        resolve(&mut config.dataset_path);
        resolve(&mut config.catalog_path);
        config.transforms_path.as_mut().map(resolve);
        config.event_log_path.as_mut().map(resolve);
        Ok(config)
    }
}

/// Reads and checks the config file. Artifacts are loaded and
/// cross-validated by [`crate::AppState::load`].
pub fn load_config(path: impl AsRef<Path>) -> Result<AppConfig, StartupError> {
    let path = path.as_ref();
    let fail = |message: String| StartupError::Config {
        path: path.to_path_buf(),
        message,
    };
    let text = std::fs::read_to_string(path).map_err(|e| fail(e.to_string()))?;
    let base = path.parent().unwrap_or(Path::new(""));
    AppConfig::parse(&text, base).map_err(fail)
}
