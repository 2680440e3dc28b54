//! `relgraph`: ingest corpora, generate synthetic graphs, serve, and run
//! one-shot queries. Results go to standard output, logs and errors to
//! standard error. Exit status is 0 on success, 1 for input errors and 2
//! when the language model backend fails.

mod table;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use relgraph_core::config::{LlmSettings, ServiceConfig};
use relgraph_core::cypher::ExecOptions;
use relgraph_core::graph::PropertyGraph;
use relgraph_core::ingest::{export_graph_json, generate_synthetic, import_conll04, load_graph_json, SyntheticConfig};
use relgraph_core::linker::LinkIndex;
use relgraph_core::nl::{MockLlm, Pipeline, PipelineConfig, PromptTemplates};
use relgraph_core::response::{run_cypher, ApiError, QueryResponse};

#[derive(Parser)]
#[command(name = "relgraph", version, about = "Explore a property graph with Cypher or plain questions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    Json,
    Conll04,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a graph document or CoNLL04 file and write the canonical JSON.
    Ingest {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: InputFormat,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic corpus.
    Generate {
        /// TOML generator settings; defaults reproduce the 600/3000/13000 corpus.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run one query against a graph document.
    Query {
        graph: PathBuf,
        #[arg(long, conflicts_with = "cypher", required_unless_present = "cypher")]
        nl: Option<String>,
        #[arg(long)]
        cypher: Option<String>,
        /// Directory of recorded model replies.
        #[arg(long, conflicts_with = "config")]
        mock: Option<PathBuf>,
        /// Service config naming a live or mock backend.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
    },
    /// Print element and property totals.
    Stats {
        graph: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "warn".into()))
        .init();
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e.position {
                Some(p) => eprintln!("error[{}]: {} ({p})", e.kind, e.message),
                None => eprintln!("error[{}]: {}", e.kind, e.message),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn input_error(kind: &str, message: impl Into<String>) -> ApiError {
    ApiError::new(400, kind, message)
}

fn read(path: &Path) -> Result<String, ApiError> {
    std::fs::read_to_string(path).map_err(|e| input_error("Io", format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), ApiError> {
    std::fs::write(path, text).map_err(|e| input_error("Io", format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<PropertyGraph, ApiError> {
    load_graph_json(&read(path)?).map_err(|e| located(path, &e))
}

fn located(path: &Path, e: &relgraph_core::ingest::IngestError) -> ApiError {
    let mut err = ApiError::from(e);
    err.message = format!("{}: {}", path.display(), err.message);
    err
}

fn run(command: Command) -> Result<(), ApiError> {
    match command {
        Command::Ingest { input, format, out } => {
            let graph = match format {
                InputFormat::Json => load(&input)?,
                InputFormat::Conll04 => import_conll04(&read(&input)?).map_err(|e| located(&input, &e))?,
            };
            write(&out, &export_graph_json(&graph))?;
            tracing::info!(nodes = graph.node_count(), relationships = graph.relationship_count(), "ingested");
            Ok(())
        }
        Command::Generate { config, seed, out } => {
            let mut settings = match config {
                Some(path) => SyntheticConfig::from_toml_str(&read(&path)?).map_err(|e| ApiError::from(&e))?,
                None => SyntheticConfig::default(),
            };
            if let Some(seed) = seed {
                settings.seed = seed;
            }
            let graph = generate_synthetic(&settings).map_err(|e| ApiError::from(&e))?;
            write(&out, &export_graph_json(&graph))
        }
        Command::Serve { config } => {
            let config = ServiceConfig::load(&config).map_err(|e| input_error("InvalidConfig", e.to_string()))?;
            let runtime = tokio::runtime::Runtime::new().map_err(|e| ApiError::new(500, "Internal", e.to_string()))?;
            runtime.block_on(relgraph_server::serve(config)).map_err(|e| input_error("StartupError", e.0))
        }
        Command::Query { graph, nl, cypher, mock, config, format } => {
            let graph = load(&graph)?;
            let response = match (nl, cypher) {
                (_, Some(query)) => {
                    let (exec, max_nodes) = match &config {
                        Some(path) => {
                            let c = service_config(path)?;
                            (c.pipeline_config().exec, c.limits.max_subgraph_nodes)
                        }
                        None => (ExecOptions::default(), relgraph_core::config::DEFAULT_MAX_SUBGRAPH_NODES),
                    };
                    run_cypher(&query, &graph, &exec, max_nodes)?
                }
                (Some(question), None) => ask(&graph, &question, mock.as_deref(), config.as_deref())?,
                (None, None) => unreachable!("clap requires one of --nl or --cypher"),
            };
            match format {
                OutputFormat::Json => {
                    println!("{}", serde_json::to_string_pretty(&response).expect("response serializes"))
                }
                OutputFormat::Table => print!("{}", table::render(&response)),
            }
            Ok(())
        }
        Command::Stats { graph, json } => {
            let stats = load(&graph)?.stats();
            if json {
                println!("{}", serde_json::to_string_pretty(&stats).expect("stats serialize"));
            } else {
                print!("{}", table::stats(&stats));
            }
            Ok(())
        }
    }
}

fn service_config(path: &Path) -> Result<ServiceConfig, ApiError> {
    ServiceConfig::load(path).map_err(|e| input_error("InvalidConfig", e.to_string()))
}

/// NL path. Needs an explicit backend: `--mock` or a config file; there is
/// no implicit default, so tests can never reach a paid endpoint.
fn ask(
    graph: &PropertyGraph,
    question: &str,
    mock: Option<&Path>,
    config: Option<&Path>,
) -> Result<QueryResponse, ApiError> {
    let (backend, templates, pipeline_config, max_nodes) = match (mock, config) {
        (Some(dir), _) => {
            let mock = MockLlm::from_dir(dir).map_err(|e| input_error("InvalidFixtures", e))?;
            let backend: relgraph_server::SharedBackend = std::sync::Arc::new(mock);
            (
                backend,
                PromptTemplates::default(),
                PipelineConfig::default(),
                relgraph_core::config::DEFAULT_MAX_SUBGRAPH_NODES,
            )
        }
        (None, Some(path)) => {
            let c = service_config(path)?;
            if let LlmSettings::Live { url, .. } = &c.llm {
                tracing::info!(%url, "using live backend");
            }
            let backend = c.llm.build_backend().map_err(|e| input_error("InvalidConfig", e.to_string()))?;
            let templates = c.llm.templates().map_err(|e| input_error("InvalidConfig", e.to_string()))?;
            (backend, templates, c.pipeline_config(), c.limits.max_subgraph_nodes)
        }
        (None, None) => {
            return Err(input_error("MissingBackend", "--nl needs --mock <dir> or --config <file>"));
        }
    };
    let index = LinkIndex::build(graph, &pipeline_config.linker);
    let pipeline = Pipeline::new(backend, templates, pipeline_config);
    let answer = pipeline.answer_question(question, graph, &index).map_err(|e| ApiError::from(&e))?;
    Ok(QueryResponse::from_nl(answer.without_timings(), max_nodes))
}
