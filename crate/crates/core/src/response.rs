//! Response shaping shared by the HTTP service and the CLI, so both report
//! the same rows, subgraphs and error taxonomy.

use serde::Serialize;
use serde_json::{json, Value};

use crate::cypher::{execute_with, parse, pretty_print, validate, CypherError, ExecOptions, Position, ResultValue};
use crate::graph::{
    Direction, Node, NodeRecord, PropertyGraph, RelationshipRecord, ResultSubgraph, Scalar, SOURCE_PARAGRAPH_KEY,
};
use crate::ingest::IngestError;
use crate::nl::{NlQueryResponse, PipelineError, PipelineErrorKind, Stage};

/// Body of a successful query, from either the NL or the expert path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryResponse {
    pub cypher: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<ResultValue>>,
    pub subgraph: ResultSubgraph,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub answer: Option<String>,
    pub diagnostics: Value,
}

impl QueryResponse {
    pub fn from_nl(response: NlQueryResponse, max_nodes: usize) -> Self {
        let mut subgraph = response.result.subgraph;
        subgraph.cap_nodes(max_nodes);
        QueryResponse {
            cypher: response.generated_cypher,
            columns: response.result.columns,
            rows: response.result.rows,
            subgraph,
            answer: response.answer_text,
            diagnostics: serde_json::to_value(&response.diagnostics).expect("diagnostics serialize"),
        }
    }
}

/// An error as reported to clients: HTTP status, stable kind name, message,
/// and where known the failing stage and query position.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage: Option<Stage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position: Option<Position>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Value>,
}

impl ApiError {
    pub fn new(status: u16, kind: impl Into<String>, message: impl Into<String>) -> Self {
        ApiError { status, kind: kind.into(), message: message.into(), stage: None, position: None, diagnostics: None }
    }

    pub fn not_found(id: &str) -> Self {
        Self::new(404, "NotFound", format!("no node or relationship with id {id:?}"))
    }

    pub fn no_graph() -> Self {
        Self::new(503, "GraphNotLoaded", "no graph is loaded")
    }

    /// CLI exit status for this error: 2 for backend failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.status == 502 {
            2
        } else {
            1
        }
    }
}

impl From<&CypherError> for ApiError {
    fn from(e: &CypherError) -> Self {
        let status = match e {
            CypherError::ResourceLimit { .. } => 413,
            _ => 400,
        };
        let mut err = ApiError::new(status, e.kind(), e.to_string());
        err.position = e.position();
        if let CypherError::Invalid(findings) = e {
            err.diagnostics = Some(json!({ "findings": findings }));
        }
        err
    }
}

impl From<&PipelineError> for ApiError {
    fn from(e: &PipelineError) -> Self {
        let mut err = match &e.kind {
            PipelineErrorKind::Execution(inner) => ApiError::from(inner),
            kind => {
                let status = match kind {
                    PipelineErrorKind::EmptyQuestion => 400,
                    PipelineErrorKind::UngeneratableQuery { .. } => 422,
                    _ => 502,
                };
                ApiError::new(status, e.kind_name(), e.to_string())
            }
        };
        err.stage = Some(e.stage);
        err.diagnostics = Some(serde_json::to_value(&*e.diagnostics).expect("diagnostics serialize"));
        err
    }
}

impl From<&IngestError> for ApiError {
    fn from(e: &IngestError) -> Self {
        ApiError::new(400, e.kind(), e.to_string())
    }
}

/// `{ok, data}` / `{ok, error}` envelope used by every endpoint.
pub fn envelope<T: Serialize>(result: &Result<T, ApiError>) -> Value {
    match result {
        Ok(data) => json!({ "ok": true, "data": data }),
        Err(error) => json!({ "ok": false, "error": error }),
    }
}

/// Expert path: parse, validate and execute a query typed by the user.
pub fn run_cypher(
    text: &str,
    graph: &PropertyGraph,
    exec: &ExecOptions,
    max_nodes: usize,
) -> Result<QueryResponse, ApiError> {
    let ast = parse(text).map_err(|e| ApiError::from(&e))?;
    let report = validate(&ast, &graph.schema());
    let result = execute_with(&ast, graph, exec).map_err(|e| ApiError::from(&e))?;
    let mut subgraph = result.subgraph;
    subgraph.cap_nodes(max_nodes);
    Ok(QueryResponse {
        cypher: pretty_print(&ast),
        columns: result.columns,
        rows: result.rows,
        subgraph,
        answer: None,
        diagnostics: json!({ "validation_warnings": report.warnings }),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParagraphRecord {
    pub id: String,
    pub text: String,
    pub metadata: crate::graph::Properties,
}

fn paragraph_record(graph: &PropertyGraph, id: &str) -> Option<ParagraphRecord> {
    graph.node(id).and_then(Node::as_paragraph).map(|p| ParagraphRecord {
        id: p.id.clone(),
        text: p.text.clone(),
        metadata: p.metadata.clone(),
    })
}

/// Source anchors of an element. Relationships always report their
/// sentence; nodes report the paragraph they were extracted from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "element", rename_all = "lowercase")]
pub enum Provenance {
    Relationship { id: String, sentence: String, paragraph: Option<ParagraphRecord> },
    Node { id: String, source_paragraph: Option<ParagraphRecord> },
}

pub fn provenance(graph: &PropertyGraph, id: &str) -> Result<Provenance, ApiError> {
    if let Some(rel) = graph.relationship(id) {
        return Ok(Provenance::Relationship {
            id: rel.id.clone(),
            sentence: rel.sentence.clone(),
            paragraph: rel.paragraph_id.as_deref().and_then(|p| paragraph_record(graph, p)),
        });
    }
    match graph.node(id) {
        Some(Node::Paragraph(p)) => {
            Ok(Provenance::Node { id: p.id.clone(), source_paragraph: paragraph_record(graph, &p.id) })
        }
        Some(Node::Entity(e)) => {
            let source = match e.properties.get(SOURCE_PARAGRAPH_KEY) {
                Some(Scalar::Text(pid)) => paragraph_record(graph, pid),
                _ => None,
            };
            Ok(Provenance::Node { id: e.id.clone(), source_paragraph: source })
        }
        None => Err(ApiError::not_found(id)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeDetail {
    pub node: NodeRecord,
    /// Incident relationships in id order.
    pub relationships: Vec<RelationshipRecord>,
}

pub fn node_detail(graph: &PropertyGraph, id: &str) -> Result<NodeDetail, ApiError> {
    let node = graph.node(id).ok_or_else(|| ApiError::not_found(id))?;
    let neighbors = graph.neighbors(id, Direction::Both, None).map_err(|_| ApiError::not_found(id))?;
    Ok(NodeDetail {
        node: NodeRecord::from(node),
        relationships: neighbors.iter().map(|n| RelationshipRecord::from(n.relationship)).collect(),
    })
}
