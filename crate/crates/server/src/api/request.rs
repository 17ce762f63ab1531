//! Strict request decoding: unknown fields are rejected and every error names
//! the offending field where one exists.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_path_to_error::Segment;

use crate::error::ApiError;

/// Decodes a JSON body into `T`, which is expected to deny unknown fields.
pub fn parse_body<T: DeserializeOwned>(bytes: &[u8]) -> Result<T, ApiError> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let segments: Vec<String> = e
            .path()
            .iter()
            .filter_map(|seg| match seg {
                Segment::Map { key } => Some(key.clone()),
                Segment::Seq { index } => Some(index.to_string()),
                _ => None,
            })
            .collect();
        let message = e.into_inner().to_string();
        let prefix = (!segments.is_empty()).then(|| segments.join("."));
        let field = match (quoted_field(&message), prefix) {
            (Some(name), Some(p)) if !p.ends_with(&name) => Some(format!("{p}.{name}")),
            (Some(name), None) => Some(name),
            (_, p) => p,
        };
        ApiError::bad_request(field, message)
    })?;
    de.end().map_err(|e| ApiError::bad_request(None, e.to_string()))?;
    Ok(value)
}

/// The field named in serde's "unknown field `x`" / "missing field `x`"
/// messages.
fn quoted_field(message: &str) -> Option<String> {
    for marker in ["unknown field `", "missing field `"] {
        if let Some(start) = message.find(marker) {
            let rest = &message[start + marker.len()..];
            return rest.find('`').map(|end| rest[..end].to_string());
        }
    }
    None
}

/// Checks query parameters against an allow-list, rejecting unknown and
/// repeated keys.
pub fn query_map(pairs: Vec<(String, String)>, allowed: &[&str]) -> Result<BTreeMap<String, String>, ApiError> {
    let mut out = BTreeMap::new();
    for (key, value) in pairs {
        if !allowed.contains(&key.as_str()) {
            return Err(ApiError::invalid(&key, format!("unknown query parameter {key:?}")));
        }
        if out.insert(key.clone(), value).is_some() {
            return Err(ApiError::invalid(
                &key,
                format!("query parameter {key:?} given more than once"),
            ));
        }
    }
    Ok(out)
}

pub fn required_i64(query: &BTreeMap<String, String>, key: &str) -> Result<i64, ApiError> {
    let raw = query
        .get(key)
        .ok_or_else(|| ApiError::invalid(key, format!("missing query parameter {key:?}")))?;
    raw.parse()
        .map_err(|_| ApiError::invalid(key, format!("{key} must be an integer, got {raw:?}")))
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowKey {
    pub entity_id: String,
    pub row_id: i64,
}

/// A dataset row by key, or an ad-hoc reading given as model column values.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowRequest {
    pub entity_id: Option<String>,
    pub row_id: Option<i64>,
    pub values: Option<BTreeMap<String, Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimilarRequest {
    pub entity_id: Option<String>,
    pub row_id: Option<i64>,
    pub values: Option<BTreeMap<String, Option<f64>>>,
    pub k: i64,
    pub features: Option<Vec<String>>,
    pub weights: Option<BTreeMap<String, f64>>,
    pub standardize: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareRequest {
    pub a: RowKey,
    pub b: RowKey,
}

/// Where the row to explain comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum RowSource {
    Stored(RowKey),
    Values(BTreeMap<String, Option<f64>>),
}

pub fn row_source(
    entity_id: Option<String>,
    row_id: Option<i64>,
    values: Option<BTreeMap<String, Option<f64>>>,
) -> Result<RowSource, ApiError> {
    match (entity_id, row_id, values) {
        (None, None, Some(values)) => Ok(RowSource::Values(values)),
        (Some(_), _, Some(_)) | (_, Some(_), Some(_)) => Err(ApiError::invalid(
            "values",
            "give either entity_id and row_id or values, not both",
        )),
        (Some(entity_id), Some(row_id), None) => Ok(RowSource::Stored(RowKey { entity_id, row_id })),
        (None, _, None) => Err(ApiError::invalid("entity_id", "missing field `entity_id`")),
        (Some(_), None, None) => Err(ApiError::invalid("row_id", "missing field `row_id`")),
    }
}
