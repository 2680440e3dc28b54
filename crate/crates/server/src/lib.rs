//! HTTP facade over a loaded graph.
//!
//! | method | path                    | body / result                          |
//! |--------|-------------------------|----------------------------------------|
//! | POST   | `/api/query/nl`         | `{question}` → query response + answer |
//! | POST   | `/api/query/cypher`     | `{query}` → query response             |
//! | GET    | `/api/schema`           | labels, types and property keys        |
//! | GET    | `/api/stats`            | distribution report                    |
//! | GET    | `/api/provenance/{id}`  | source sentence and paragraph          |
//! | GET    | `/api/node/{id}`        | node with its incident relationships   |
//! | GET    | `/api/health`           | liveness and graph summary             |
//!
//! Every body is wrapped as `{"ok": true, "data": ..}` or
//! `{"ok": false, "error": {kind, message, ..}}`. The graph is immutable
//! once loaded, so handlers share it without locks. Static UI files are
//! served under `/app` when a directory is configured.

use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Redirect, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use relgraph_core::config::{ConfigError, Limits, ServiceConfig};
use relgraph_core::cypher::ExecOptions;
use relgraph_core::graph::PropertyGraph;
use relgraph_core::ingest::load_graph_json;
use relgraph_core::linker::LinkIndex;
use relgraph_core::nl::{LlmBackend, Pipeline, PromptTemplates};
use relgraph_core::response::{envelope, node_detail, provenance, run_cypher, ApiError, QueryResponse};
use serde::Deserialize;
use serde_json::json;
use tower_http::services::ServeDir;
use tower_http::trace::TraceLayer;

pub type SharedBackend = Arc<dyn LlmBackend>;

struct Loaded {
    graph: PropertyGraph,
    index: LinkIndex,
}

/// Everything a request needs; cheap to clone.
#[derive(Clone)]
pub struct AppState {
    loaded: Option<Arc<Loaded>>,
    pipeline: Arc<Pipeline<SharedBackend>>,
    limits: Limits,
    static_dir: Option<PathBuf>,
}

impl AppState {
    pub fn new(
        graph: Option<PropertyGraph>,
        backend: SharedBackend,
        templates: PromptTemplates,
        config: &ServiceConfig,
    ) -> Self {
        let pipeline_config = config.pipeline_config();
        let loaded = graph.map(|graph| {
            let index = LinkIndex::build(&graph, &pipeline_config.linker);
            Arc::new(Loaded { graph, index })
        });
        AppState {
            loaded,
            pipeline: Arc::new(Pipeline::new(backend, templates, pipeline_config)),
            limits: config.limits.clone(),
            static_dir: config.static_dir.clone(),
        }
    }

    /// Loads the graph and backend named in `config`.
    pub fn from_config(config: &ServiceConfig) -> Result<Self, StartupError> {
        let text = std::fs::read_to_string(&config.graph)
            .map_err(|e| StartupError(format!("cannot read graph {}: {e}", config.graph.display())))?;
        let graph = load_graph_json(&text).map_err(|e| StartupError(format!("{}: {e}", config.graph.display())))?;
        let backend = config.llm.build_backend()?;
        let templates = config.llm.templates()?;
        Ok(Self::new(Some(graph), backend, templates, config))
    }

    pub fn graph(&self) -> Option<&PropertyGraph> {
        self.loaded.as_deref().map(|l| &l.graph)
    }

    fn require(&self) -> Result<Arc<Loaded>, ApiError> {
        self.loaded.clone().ok_or_else(ApiError::no_graph)
    }

    fn exec(&self) -> ExecOptions {
        self.pipeline.config().exec
    }
}

#[derive(Debug)]
pub struct StartupError(pub String);

impl std::fmt::Display for StartupError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for StartupError {}

impl From<ConfigError> for StartupError {
    fn from(e: ConfigError) -> Self {
        StartupError(e.to_string())
    }
}

pub fn router(state: AppState) -> Router {
    let mut app = Router::new()
        .route("/api/query/nl", post(nl_query))
        .route("/api/query/cypher", post(cypher_query))
        .route("/api/schema", get(schema))
        .route("/api/stats", get(stats))
        .route("/api/provenance/{id}", get(provenance_of))
        .route("/api/node/{id}", get(node_of))
        .route("/api/health", get(health))
        .fallback(not_found);
    if let Some(dir) = &state.static_dir {
        app = app
            .route("/", get(|| async { Redirect::temporary("/app/") }))
            .nest_service("/app", ServeDir::new(dir).append_index_html_on_directories(true));
    }
    app.layer(TraceLayer::new_for_http()).with_state(state)
}

fn reply<T: serde::Serialize>(result: Result<T, ApiError>) -> Response {
    let status = match &result {
        Ok(_) => StatusCode::OK,
        Err(e) => StatusCode::from_u16(e.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR),
    };
    if let Err(e) = &result {
        tracing::debug!(kind = %e.kind, status = e.status, "request failed");
    }
    (status, Json(envelope(&result))).into_response()
}

fn body<T: for<'de> Deserialize<'de>>(bytes: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::new(400, "InvalidRequest", e.to_string()))
}

/// Runs CPU- or network-bound work off the async executor.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .unwrap_or_else(|e| Err(ApiError::new(500, "Internal", format!("worker failed: {e}"))))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NlRequest {
    question: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CypherRequest {
    query: String,
}

async fn nl_query(State(state): State<AppState>, bytes: Bytes) -> Response {
    let result = async {
        let request: NlRequest = body(&bytes)?;
        let loaded = state.require()?;
        let pipeline = state.pipeline.clone();
        let max_nodes = state.limits.max_subgraph_nodes;
        blocking(move || {
            pipeline
                .answer_question(&request.question, &loaded.graph, &loaded.index)
                .map(|r| QueryResponse::from_nl(r, max_nodes))
                .map_err(|e| ApiError::from(&e))
        })
        .await
    }
    .await;
    reply(result)
}

async fn cypher_query(State(state): State<AppState>, bytes: Bytes) -> Response {
    let result = async {
        let request: CypherRequest = body(&bytes)?;
        let loaded = state.require()?;
        let exec = state.exec();
        let max_nodes = state.limits.max_subgraph_nodes;
        blocking(move || run_cypher(&request.query, &loaded.graph, &exec, max_nodes)).await
    }
    .await;
    reply(result)
}

async fn schema(State(state): State<AppState>) -> Response {
    reply(state.require().map(|l| l.graph.schema()))
}

async fn stats(State(state): State<AppState>) -> Response {
    reply(state.require().map(|l| l.graph.stats()))
}

async fn provenance_of(State(state): State<AppState>, Path(id): Path<String>) -> Response {
    reply(state.require().and_then(|l| provenance(&l.graph, &id)))
}

async fn node_of(State(state): State<AppState>, Path(id): Path<String>) -> Response {
    reply(state.require().and_then(|l| node_detail(&l.graph, &id)))
}

async fn health(State(state): State<AppState>) -> Response {
    let graph = state.graph().map(|g| {
        json!({
            "nodes": g.node_count(),
            "relationships": g.relationship_count(),
            "content_hash": g.content_hash(),
        })
    });
    reply::<serde_json::Value>(Ok(json!({ "status": "ok", "graph": graph })))
}

async fn not_found() -> Response {
    reply::<()>(Err(ApiError::new(404, "NotFound", "no such endpoint")))
}

/// Binds `config.listen` and serves until Ctrl-C.
pub async fn serve(config: ServiceConfig) -> Result<(), StartupError> {
    let state = AppState::from_config(&config)?;
    if let Some(g) = state.graph() {
        tracing::info!(nodes = g.node_count(), relationships = g.relationship_count(), "graph loaded");
    }
    let listener = tokio::net::TcpListener::bind(&config.listen)
        .await
        .map_err(|e| StartupError(format!("cannot listen on {}: {e}", config.listen)))?;
    tracing::info!(address = %config.listen, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| StartupError(e.to_string()))
}
