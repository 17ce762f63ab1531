use std::path::PathBuf;
use std::process::ExitCode;

use brakewatch_server::{bind, bundle, load_config, serve, AppState};
use clap::Parser;
use tracing_subscriber::EnvFilter;

/// Brakepad failure triage service.
#[derive(Debug, Parser)]
#[command(name = "brakewatch", version)]
struct Cli {
    /// Service config (TOML).
    #[arg(long, value_name = "PATH", required_unless_present = "generate_synthetic")]
    config: Option<PathBuf>,
    /// Overrides the port from the config.
    #[arg(long, value_name = "PORT")]
    port: Option<u16>,
    /// Writes a synthetic demo bundle described by a TOML params file and exits.
    #[arg(long, value_name = "PARAMS", conflicts_with_all = ["config", "port"])]
    generate_synthetic: Option<PathBuf>,
}

#[tokio::main]
async fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    match run(cli).await {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

async fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    if let Some(params) = cli.generate_synthetic {
        let summary = bundle::generate_bundle_file(&params)?;
        println!("{summary}");
        return Ok(());
    }
    let path = cli.config.expect("clap requires --config");
    let mut config = load_config(&path)?;
    if let Some(port) = cli.port {
        config.port = port;
    }
    let (addr, port) = (config.listen_addr.clone(), config.port);
    let state = AppState::load(config)?;
    tracing::info!(
        rows = state.dataset.len(),
        features = state.space.len(),
        background = state.background.len(),
        "artifacts loaded"
    );
    let listener = bind(&addr, port).await?;
    tracing::info!("listening on http://{}/api/v1", listener.local_addr()?);
    serve(listener, state).await?;
    Ok(())
}
