#![allow(dead_code)]

use std::path::Path;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use brakewatch_core::data::SyntheticParams;
use brakewatch_core::model::TrainParams;
use brakewatch_server::bundle::{generate_bundle, BundleParams, CONFIG_FILE};
use brakewatch_server::{load_config, router, AppState};
use http_body_util::BodyExt;
use tower::ServiceExt;

pub const T0: i64 = 1_700_000_000;

/// Writes a small synthetic bundle into `dir`.
pub fn write_fixture(dir: &Path) {
    let params = BundleParams {
        output_dir: dir.to_path_buf(),
        data: SyntheticParams {
            n_turbines: 3,
            n_days: 12,
            readings_per_day: 4,
            failure_rate_per_month: 5.0,
            seed: 2,
            ..Default::default()
        },
        train: TrainParams {
            n_trees: 10,
            ..Default::default()
        },
        port: None,
    };
    generate_bundle(&params).unwrap();
    let config = dir.join(CONFIG_FILE);
    let text = std::fs::read_to_string(&config).unwrap();
    std::fs::write(&config, text.replace("background_size = 64", "background_size = 16")).unwrap();
}

pub fn load_fixture(dir: &Path) -> AppState {
    AppState::load(load_config(dir.join(CONFIG_FILE)).unwrap()).unwrap()
}

pub struct Fixture {
    pub dir: tempfile::TempDir,
    pub app: Router,
}

pub fn fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    let app = router(load_fixture(dir.path()));
    Fixture { dir, app }
}

pub async fn call(app: &Router, method: &str, uri: &str, body: Option<&str>) -> (StatusCode, Vec<u8>) {
    let request = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, bytes)
}

pub async fn call_json(app: &Router, method: &str, uri: &str, body: Option<&str>) -> (StatusCode, serde_json::Value) {
    let (status, bytes) = call(app, method, uri, body).await;
    let value =
        serde_json::from_slice(&bytes).unwrap_or_else(|e| panic!("{uri}: {e}: {}", String::from_utf8_lossy(&bytes)));
    (status, value)
}

pub fn row_body(entity: &str, row_id: i64) -> String {
    format!(r#"{{"entity_id":"{entity}","row_id":{row_id}}}"#)
}
