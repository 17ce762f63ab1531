use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::sync::{PoisonError, RwLock, RwLockReadGuard};

use brakewatch_core::data::{ingest_file, Dataset};
use brakewatch_core::explain::{dataset_contributions, sample_background, ContributionSet, DistanceConfig};
use brakewatch_core::features::{
    load_catalog_file, load_transform_file, to_interpretable, validate_catalog, FeatureCatalog, FeatureSpace, Members,
    TransformSpec,
};
use brakewatch_core::kpi::{load_log_file, Event, EventLog, KpiError};
use brakewatch_core::model::{load_model_file, TreeEnsemble};

use crate::config::{AppConfig, DistanceDefaults};
use crate::error::StartupError;

/// Loaded artifacts plus the event log. Everything except the log is
/// immutable once built.
#[derive(Debug)]
pub struct AppState {
    pub config: AppConfig,
    pub model: TreeEnsemble,
    pub dataset: Dataset,
    pub space: FeatureSpace,
    pub background: Vec<Vec<Option<f64>>>,
    pub distance: DistanceConfig,
    /// Interpretable contributions for every dataset row, aligned with
    /// `dataset.rows()`.
    explained: Vec<ContributionSet>,
    events: RwLock<EventLog>,
}

/// Why an event was not appended.
#[derive(Debug)]
pub enum AppendError {
    Rejected(KpiError),
    Io(std::io::Error),
}

impl AppState {
    /// Loads every artifact named in `config` and checks that they agree.
    pub fn load(config: AppConfig) -> Result<Self, StartupError> {
        let catalog =
            load_catalog_file(&config.catalog_path).map_err(|e| artifact("catalog", &config.catalog_path, e))?;
        let model = load_model_file(&config.model_path).map_err(|e| artifact("model", &config.model_path, e))?;
        let spec = match &config.transforms_path {
            Some(p) => load_transform_file(p).map_err(|e| artifact("transform spec", p, e))?,
            None => TransformSpec::default(),
        };
        let dataset =
            ingest_file(&config.dataset_path, &catalog).map_err(|e| artifact("dataset", &config.dataset_path, e))?;
        let events = match &config.event_log_path {
            Some(p) if p.exists() => load_log_file(p).map_err(|e| artifact("event log", p, e))?,
            _ => EventLog::new(),
        };
        Self::from_parts(config, model, &catalog, &spec, dataset, events)
    }

    /// Builds the state from artifacts already in memory.
    pub fn from_parts(
        config: AppConfig,
        model: TreeEnsemble,
        catalog: &FeatureCatalog,
        spec: &TransformSpec,
        dataset: Dataset,
        events: EventLog,
    ) -> Result<Self, StartupError> {
        if model.n_features() != catalog.len() {
            return Err(StartupError::Mismatch(format!(
                "model has {} features but the catalog lists {}",
                model.n_features(),
                catalog.len()
            )));
        }
        if dataset.columns().iter().map(String::as_str).ne(catalog.names()) {
            return Err(StartupError::Mismatch("dataset columns differ from the catalog".into()));
        }
        let diagnostics = validate_catalog(catalog, spec, &dataset);
        if !diagnostics.is_empty() {
            return Err(StartupError::Catalog(
                diagnostics.iter().map(ToString::to_string).collect(),
            ));
        }
        if dataset.is_empty() {
            return Err(StartupError::Mismatch(
                "dataset has no rows to draw a background from".into(),
            ));
        }
        if config.background_size < 1 {
            return Err(StartupError::Mismatch("background_size must be at least 1".into()));
        }
        let space = FeatureSpace::build(catalog, spec).map_err(|e| StartupError::Mismatch(e.to_string()))?;
        let distance = resolve_distance(&config.distance, &space, &dataset)
            .map_err(|e| StartupError::Mismatch(format!("distance defaults: {e}")))?;

        let background = sample_background(&dataset, config.background_size, config.background_seed);
        let sets =
            dataset_contributions(&model, &dataset, &background).map_err(|e| StartupError::Mismatch(e.to_string()))?;
        let explained = sets
            .iter()
            .map(|s| to_interpretable(s, &space))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| StartupError::Mismatch(e.to_string()))?;

        Ok(AppState {
            config,
            model,
            dataset,
            space,
            background,
            distance,
            explained,
            events: RwLock::new(events),
        })
    }

    pub fn explained(&self) -> &[ContributionSet] {
        &self.explained
    }

    /// Model columns a feature name stands for: the column itself, or every
    /// member column of an interpretable feature.
    pub fn columns_for(&self, name: &str) -> Option<Vec<usize>> {
        columns_for(&self.space, name)
    }

    pub fn events(&self) -> RwLockReadGuard<'_, EventLog> {
        self.events.read().unwrap_or_else(PoisonError::into_inner)
    }

    /// Validates and appends `event`, writing it to the configured log file
    /// first. Appends are serialized; readers see the log before or after,
    /// never in between. Returns the new log length.
    pub fn append_event(&self, event: Event) -> Result<usize, AppendError> {
        let mut log = self.events.write().unwrap_or_else(PoisonError::into_inner);
        log.check(&event).map_err(AppendError::Rejected)?;
        if let Some(path) = &self.config.event_log_path {
            append_line(path, &event.to_json_line()).map_err(AppendError::Io)?;
        }
        log.record_event(event).map_err(AppendError::Rejected)?;
        Ok(log.len())
    }
}

fn append_line(path: &Path, line: &str) -> std::io::Result<()> {
    let mut file = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
    file.write_all(format!("{line}\n").as_bytes())?;
    file.flush()
}

fn artifact(what: &'static str, path: &Path, e: impl std::fmt::Display) -> StartupError {
    StartupError::Artifact {
        what,
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn columns_for(space: &FeatureSpace, name: &str) -> Option<Vec<usize>> {
    if let Some(c) = space.catalog().index_of(name) {
        return Some(vec![c]);
    }
    space.index_of(name).map(|i| match &space.features()[i].members {
        Members::Column { column } => vec![*column],
        Members::Group { columns } => columns.clone(),
    })
}

/// Turns name-based distance settings into a column-based config and checks
/// it against the dataset.
pub fn resolve_distance(
    defaults: &DistanceDefaults,
    space: &FeatureSpace,
    dataset: &Dataset,
) -> Result<DistanceConfig, UnknownName> {
    let features = match &defaults.features {
        Some(names) => {
            let mut cols = Vec::new();
            for name in names {
                for c in columns_for(space, name).ok_or_else(|| UnknownName::feature(name))? {
                    if !cols.contains(&c) {
                        cols.push(c);
                    }
                }
            }
            Some(cols)
        }
        None => None,
    };
    let mut weights = BTreeMap::new();
    for (name, &w) in &defaults.weights {
        for c in columns_for(space, name).ok_or_else(|| UnknownName::weight(name))? {
            weights.insert(c, w);
        }
    }
    let config = DistanceConfig {
        features,
        weights,
        standardize: defaults.standardize,
    };
    config.resolve(dataset).map_err(|e| UnknownName {
        field: "weights".into(),
        message: e.to_string(),
    })?;
    Ok(config)
}

/// A distance setting that does not resolve, with the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct UnknownName {
    pub field: String,
    pub message: String,
}

impl UnknownName {
    fn feature(name: &str) -> Self {
        UnknownName {
            field: "features".into(),
            message: format!("unknown feature {name:?}"),
        }
    }

    fn weight(name: &str) -> Self {
        UnknownName {
            field: format!("weights.{name}"),
            message: format!("unknown feature {name:?}"),
        }
    }
}

impl std::fmt::Display for UnknownName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}
