//! HTTP service over the brakewatch core: predictions, explanations, the
//! feature catalog, dataset access and KPI reports under `/api/v1`.
//!
//! Every explanation leaves the service in the interpretable feature space,
//! and every response body is a deterministic function of the loaded
//! artifacts and the request.

pub mod api;
pub mod bundle;
pub mod config;
pub mod error;
pub mod state;

pub use api::router;
pub use config::{load_config, AppConfig, DistanceDefaults};
pub use error::StartupError;
pub use state::AppState;

use tokio::net::TcpListener;

/// Binds the listening socket, turning an occupied port into a startup error.
pub async fn bind(addr: &str, port: u16) -> Result<TcpListener, StartupError> {
    TcpListener::bind((addr, port))
        .await
        .map_err(|source| StartupError::Bind {
            addr: format!("{addr}:{port}"),
            source,
        })
}

/// Serves until ctrl-c.
pub async fn serve(listener: TcpListener, state: AppState) -> std::io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
