//! Routes under `/api/v1`.

mod request;
mod wire;

use std::collections::BTreeMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::{PathRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use brakewatch_core::data::EntityRow;
use brakewatch_core::explain::{
    contribution_deltas, importance_from_contributions, local_contributions, nearest_neighbors, BoxStats,
    ContributionSet, DistanceConfig, ImportanceMethod, Prediction,
};
use brakewatch_core::features::{to_interpretable, InterpretableFeature, Members, ValueType};
use brakewatch_core::kpi::{baseline_report, Event, KpiError, KpiReport, Window};
use brakewatch_core::model::logistic;

pub use request::{parse_body, CompareRequest, RowKey, RowRequest, SimilarRequest};
pub use wire::*;

use crate::config::DistanceDefaults;
use crate::error::ApiError;
use crate::state::{resolve_distance, AppState, AppendError};
use request::{query_map, required_i64, row_source, RowSource};

type Shared = Arc<AppState>;
type ApiResult<T> = Result<Json<T>, ApiError>;

pub fn router(state: AppState) -> Router {
    let api = Router::new()
        .route("/entities", get(entities))
        .route("/entities/{entity_id}/rows", get(entity_rows))
        .route("/features", get(features))
        .route("/predict", post(predict))
        .route("/contributions", post(contributions))
        .route("/similar", post(similar))
        .route("/compare", post(compare))
        .route("/importance", get(importance))
        .route("/feature/{name}/scatter", get(scatter))
        .route("/feature/{name}/distribution", get(distribution))
        .route("/events", post(events))
        .route("/kpi/report", get(kpi_report));
    Router::new()
        .nest("/api/v1", api)
        .fallback(|| async { ApiError::not_found("no such endpoint") })
        .with_state(Arc::new(state))
}

fn row_out(row: &EntityRow) -> RowOut {
    RowOut {
        entity_id: row.entity_id.clone(),
        row_id: row.row_id,
    }
}

fn lookup<'a>(state: &'a AppState, key: &RowKey) -> Result<&'a EntityRow, ApiError> {
    state
        .dataset
        .get_row(&key.entity_id, key.row_id)
        .map_err(|_| ApiError::row_not_found(&key.entity_id, key.row_id))
}

/// The model-space values to explain and the stored row they came from.
fn resolve_row(state: &AppState, source: RowSource) -> Result<(Vec<Option<f64>>, Option<RowOut>), ApiError> {
    match source {
        RowSource::Stored(key) => {
            let row = lookup(state, &key)?;
            Ok((row.values.clone(), Some(row_out(row))))
        }
        RowSource::Values(values) => {
            let catalog = state.space.catalog();
            let mut row = vec![None; catalog.len()];
            for (name, value) in values {
                let column = catalog.index_of(&name).ok_or_else(|| {
                    ApiError::invalid(&format!("values.{name}"), format!("unknown model column {name:?}"))
                })?;
                if value.is_some_and(|v| !v.is_finite()) {
                    return Err(ApiError::invalid(&format!("values.{name}"), "value is not finite"));
                }
                row[column] = value;
            }
            Ok((row, None))
        }
    }
}

fn explain(state: &AppState, values: &[Option<f64>]) -> Result<ContributionSet, ApiError> {
    let set =
        local_contributions(&state.model, values, &state.background).map_err(|e| ApiError::internal(e.to_string()))?;
    to_interpretable(&set, &state.space).map_err(|e| ApiError::internal(e.to_string()))
}

fn feature_named<'a>(state: &'a AppState, name: &str) -> Result<(usize, &'a InterpretableFeature), ApiError> {
    state
        .space
        .index_of(name)
        .map(|i| (i, &state.space.features()[i]))
        .ok_or_else(|| ApiError::not_found(format!("unknown feature {name:?}")).with_field("name"))
}

fn query_pairs(query: Result<Query<Vec<(String, String)>>, QueryRejection>) -> Result<Vec<(String, String)>, ApiError> {
    query
        .map(|Query(pairs)| pairs)
        .map_err(|e| ApiError::bad_request(None, e.body_text()))
}

fn path_param(path: Result<Path<String>, PathRejection>) -> Result<String, ApiError> {
    path.map(|Path(p)| p)
        .map_err(|e| ApiError::bad_request(None, e.body_text()))
}

async fn entities(State(state): State<Shared>) -> ApiResult<EntitiesResponse> {
    let entities = state
        .dataset
        .entities()
        .into_iter()
        .map(|(entity_id, rows)| EntityOut {
            entity_id: entity_id.to_string(),
            rows,
        })
        .collect();
    Ok(Json(EntitiesResponse { entities }))
}

async fn entity_rows(
    State(state): State<Shared>,
    path: Result<Path<String>, PathRejection>,
) -> ApiResult<EntityRowsResponse> {
    let entity_id = path_param(path)?;
    let mut rows: Vec<RowSummary> = state
        .dataset
        .entity_rows(&entity_id)
        .into_iter()
        .map(|r| RowSummary {
            row_id: r.row_id,
            label: r.label,
        })
        .collect();
    if rows.is_empty() {
        let mut e = ApiError::not_found(format!("unknown entity {entity_id:?}"));
        e.body.entity_id = Some(entity_id);
        return Err(e);
    }
    rows.sort_by_key(|r| r.row_id);
    Ok(Json(EntityRowsResponse { entity_id, rows }))
}

async fn features(State(state): State<Shared>) -> ApiResult<FeaturesResponse> {
    let catalog = state.space.catalog();
    let features = state
        .space
        .features()
        .iter()
        .map(|f| FeatureOut {
            name: f.name.clone(),
            display_name: f.display_name.clone(),
            category: f.category.clone(),
            value_type: f.value_type,
            unit: f.unit.clone(),
            columns: member_columns(&f.members)
                .into_iter()
                .map(|c| catalog.features()[c].name.clone())
                .collect(),
        })
        .collect();
    Ok(Json(FeaturesResponse { features }))
}

fn member_columns(members: &Members) -> Vec<usize> {
    match members {
        Members::Column { column } => vec![*column],
        Members::Group { columns } => columns.clone(),
    }
}

async fn predict(State(state): State<Shared>, body: Bytes) -> ApiResult<PredictResponse> {
    let req: RowRequest = parse_body(&body)?;
    let (values, row) = resolve_row(&state, row_source(req.entity_id, req.row_id, req.values)?)?;
    let margin = state
        .model
        .predict_margin(&values)
        .map_err(|e| ApiError::internal(e.to_string()))?;
    Ok(Json(PredictResponse {
        row,
        margin,
        probability: logistic(margin),
    }))
}

async fn contributions(State(state): State<Shared>, body: Bytes) -> ApiResult<ContributionsResponse> {
    let req: RowRequest = parse_body(&body)?;
    let (values, row) = resolve_row(&state, row_source(req.entity_id, req.row_id, req.values)?)?;
    let set = explain(&state, &values)?;
    let contributions = state
        .space
        .features()
        .iter()
        .enumerate()
        .map(|(i, f)| ContributionOut {
            feature: f.name.clone(),
            display_name: f.display_name.clone(),
            category: f.category.clone(),
            value: state.space.display_value(i, &values),
            contribution: set.contributions[i],
        })
        .collect();
    Ok(Json(ContributionsResponse {
        row,
        base_value: set.base_value,
        predicted_margin: set.predicted_margin,
        probability: logistic(set.predicted_margin),
        contributions,
    }))
}

async fn similar(State(state): State<Shared>, body: Bytes) -> ApiResult<SimilarResponse> {
    let req: SimilarRequest = parse_body(&body)?;
    if req.k < 1 {
        return Err(ApiError::invalid("k", format!("k must be at least 1, got {}", req.k)));
    }
    let k = usize::try_from(req.k).unwrap_or(usize::MAX);
    let (values, query) = resolve_row(&state, row_source(req.entity_id, req.row_id, req.values)?)?;
    let config = request_distance(&state, req.features, req.weights, req.standardize)?;
    let neighbors = nearest_neighbors(&state.dataset, &values, k, &config)
        .map_err(|e| ApiError::bad_request(None, e.to_string()))?
        .into_iter()
        .map(|n| NeighborOut {
            entity_id: n.row.entity_id,
            row_id: n.row.row_id,
            distance: n.distance,
            label: n.label,
        })
        .collect();
    Ok(Json(SimilarResponse { query, neighbors }))
}

/// Request overrides layered over the configured distance defaults.
fn request_distance(
    state: &AppState,
    features: Option<Vec<String>>,
    weights: Option<BTreeMap<String, f64>>,
    standardize: Option<bool>,
) -> Result<DistanceConfig, ApiError> {
    if features.is_none() && weights.is_none() && standardize.is_none() {
        return Ok(state.distance.clone());
    }
    let base = &state.config.distance;
    let merged = DistanceDefaults {
        features: features.or_else(|| base.features.clone()),
        weights: weights.unwrap_or_else(|| base.weights.clone()),
        standardize: standardize.unwrap_or(base.standardize),
    };
    resolve_distance(&merged, &state.space, &state.dataset).map_err(|e| ApiError::invalid(&e.field, e.message))
}

async fn compare(State(state): State<Shared>, body: Bytes) -> ApiResult<CompareResponse> {
    let req: CompareRequest = parse_body(&body)?;
    let row_a = lookup(&state, &req.a)?;
    let row_b = lookup(&state, &req.b)?;
    let a = explain(&state, &row_a.values)?;
    let b = explain(&state, &row_b.values)?;
    let deltas = contribution_deltas(&a, &b);
    let features = state
        .space
        .features()
        .iter()
        .enumerate()
        .map(|(i, f)| CompareFeatureOut {
            feature: f.name.clone(),
            display_name: f.display_name.clone(),
            category: f.category.clone(),
            value_a: state.space.display_value(i, &row_a.values),
            value_b: state.space.display_value(i, &row_b.values),
            contribution_a: a.contributions[i],
            contribution_b: b.contributions[i],
            delta_contribution: deltas[i],
        })
        .collect();
    Ok(Json(CompareResponse {
        rows: (row_out(row_a), row_out(row_b)),
        predictions: (
            Prediction::from_margin(a.predicted_margin),
            Prediction::from_margin(b.predicted_margin),
        ),
        base_value: a.base_value,
        features,
    }))
}

async fn importance(
    State(state): State<Shared>,
    query: Result<Query<Vec<(String, String)>>, QueryRejection>,
) -> ApiResult<ImportanceResponse> {
    let query = query_map(query_pairs(query)?, &["method"])?;
    let method: ImportanceMethod = match query.get("method") {
        None => ImportanceMethod::Gain,
        Some(m) => m.parse().map_err(|_| {
            ApiError::invalid(
                "method",
                format!("unknown method {m:?}; use gain, mean_abs_shap or signed_mean_shap"),
            )
        })?,
    };
    let (scores, normalized) = match method {
        ImportanceMethod::Gain => {
            let totals = state.model.gain_totals();
            let mut scores = vec![0.0; state.space.len()];
            for (column, g) in totals.iter().enumerate() {
                scores[state.space.feature_of_column(column)] += g;
            }
            let sum: f64 = scores.iter().sum();
            if sum > 0.0 {
                scores.iter_mut().for_each(|s| *s /= sum);
            }
            (scores, true)
        }
        _ => {
            let table = importance_from_contributions(state.explained(), method)
                .map_err(|e| ApiError::unprocessable(e.to_string()))?;
            (table.scores, table.normalized)
        }
    };
    let features = state
        .space
        .features()
        .iter()
        .zip(scores)
        .map(|(f, score)| ImportanceOut {
            feature: f.name.clone(),
            display_name: f.display_name.clone(),
            category: f.category.clone(),
            score,
        })
        .collect();
    Ok(Json(ImportanceResponse {
        method: method.as_str(),
        normalized,
        features,
    }))
}

async fn scatter(State(state): State<Shared>, path: Result<Path<String>, PathRejection>) -> ApiResult<ScatterResponse> {
    let name = path_param(path)?;
    let (index, feature) = feature_named(&state, &name)?;
    let columns = member_columns(&feature.members);
    let points = state
        .dataset
        .rows()
        .iter()
        .zip(state.explained())
        .map(|(row, set)| {
            let value = match feature.members {
                Members::Column { column } => row.values[column],
                Members::Group { .. } => None,
            };
            ScatterPointOut {
                entity_id: row.entity_id.clone(),
                row_id: row.row_id,
                value,
                display_value: state.space.display_value(index, &row.values),
                missing: columns.iter().all(|&c| row.values[c].is_none()),
                contribution: set.contributions[index],
                probability: logistic(set.predicted_margin),
            }
        })
        .collect();
    Ok(Json(ScatterResponse {
        feature: feature.name.clone(),
        display_name: feature.display_name.clone(),
        points,
    }))
}

async fn distribution(
    State(state): State<Shared>,
    path: Result<Path<String>, PathRejection>,
) -> ApiResult<DistributionResponse> {
    let name = path_param(path)?;
    let (_, feature) = feature_named(&state, &name)?;
    let column = match feature.members {
        Members::Column { column } if feature.value_type != ValueType::Categorical => column,
        _ => {
            return Err(ApiError::invalid(
                "name",
                format!("{name:?} is categorical and has no quartiles"),
            ))
        }
    };
    let shown: Vec<f64> = state
        .dataset
        .rows()
        .iter()
        .filter_map(|r| r.values[column])
        .map(|v| feature.affine.map_or(v, |(a, b)| a * v + b))
        .collect();
    let stats = BoxStats::from_values(&shown)
        .ok_or_else(|| ApiError::unprocessable(format!("{name:?} has no readings in the dataset")))?;
    Ok(Json(DistributionResponse {
        feature: feature.name.clone(),
        display_name: feature.display_name.clone(),
        unit: feature.unit.clone(),
        stats,
    }))
}

async fn events(State(state): State<Shared>, body: Bytes) -> Result<(StatusCode, Json<EventResponse>), ApiError> {
    let event: Event = parse_body(&body)?;
    let index = match state.append_event(event.clone()) {
        Ok(len) => len - 1,
        Err(AppendError::Rejected(e)) => return Err(kpi_error(e)),
        Err(AppendError::Io(e)) => return Err(ApiError::internal(format!("event log write failed: {e}"))),
    };
    tracing::info!(index, kind = event_kind(&event), "event recorded");
    Ok((StatusCode::CREATED, Json(EventResponse { index, event })))
}

fn event_kind(event: &Event) -> &'static str {
    match event {
        Event::Alert(_) => "alert",
        Event::Decision(_) => "decision",
        Event::Outcome(_) => "outcome",
    }
}

fn kpi_error(e: KpiError) -> ApiError {
    let message = e.to_string();
    match e {
        KpiError::DuplicateAlert { .. } => ApiError::conflict("alert_id", message),
        KpiError::UnknownAlert { .. } => ApiError::invalid("alert_id", message),
        KpiError::InvalidEvent(m) if m.contains("downtime_hours") => ApiError::invalid("downtime_hours", message),
        KpiError::InvalidEvent(m) if m.contains("score") => ApiError::invalid("score", message),
        KpiError::InvalidEvent(m) if m.contains("alert_id") => ApiError::invalid("alert_id", message),
        _ => ApiError::bad_request(None, message),
    }
}

async fn kpi_report(
    State(state): State<Shared>,
    query: Result<Query<Vec<(String, String)>>, QueryRejection>,
) -> ApiResult<KpiReport> {
    let query = query_map(query_pairs(query)?, &["start", "end", "baselines"])?;
    let start = required_i64(&query, "start")?;
    let end = required_i64(&query, "end")?;
    let eval = Window::new(start, end).map_err(|e| ApiError::invalid("end", e.to_string()))?;
    let baselines = match query.get("baselines").map(String::as_str) {
        None | Some("") => Vec::new(),
        Some(list) => list
            .split(',')
            .map(parse_window)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|m| ApiError::invalid("baselines", m))?,
    };
    let log = state.events();
    baseline_report(&log, eval, &baselines)
        .map(Json)
        .map_err(|e| ApiError::invalid("baselines", e.to_string()))
}

/// `start:end` in epoch seconds.
fn parse_window(text: &str) -> Result<Window, String> {
    let (s, e) = text
        .split_once(':')
        .ok_or_else(|| format!("baseline {text:?} is not start:end"))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<i64>()
            .map_err(|_| format!("baseline {text:?} is not start:end"))
    };
    Window::new(parse(s)?, parse(e)?).map_err(|e| format!("baseline {text:?}: {e}"))
}
