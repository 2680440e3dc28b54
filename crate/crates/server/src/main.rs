use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use relgraph_core::config::ServiceConfig;

/// Serve a graph over HTTP.
#[derive(Parser)]
#[command(version)]
struct Args {
    /// Service configuration file (TOML).
    #[arg(long)]
    config: PathBuf,
}

#[tokio::main]
async fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info,tower_http=warn".into()),
        )
        .init();
    let args = Args::parse();
    let result = match ServiceConfig::load(&args.config) {
        Ok(config) => relgraph_server::serve(config).await,
        Err(e) => Err(e.into()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            tracing::error!("{e}");
            ExitCode::FAILURE
        }
    }
}
