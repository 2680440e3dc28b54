//! Graph ingestion: the JSON interchange document, the CoNLL04 adapter and
//! the synthetic corpus generator. Every entry point returns a finalized,
//! immutable [`crate::graph::PropertyGraph`].

mod conll04;
mod document;
mod synthetic;

pub use conll04::{detokenize, import_conll04, relation_type};
pub use document::{
    export_graph, export_graph_json, load_graph, load_graph_json, GraphDocument, NodeDocument, RelationshipDocument,
};
pub use synthetic::{apportion, generate_synthetic, LabelWeight, RelationshipTypeSpec, SyntheticConfig};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("schema violation at `{path}`: {message}")]
    SchemaViolation { path: String, message: String },
    #[error("dangling reference to {0:?}")]
    DanglingReference(String),
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("malformed record at line {line}: {message}")]
    MalformedRecord { line: usize, message: String },
    #[error("unachievable targets: {0}")]
    UnachievableTargets(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

impl IngestError {
    /// Input line for line-oriented formats.
    pub fn line(&self) -> Option<usize> {
        match self {
            IngestError::MalformedRecord { line, .. } => Some(*line),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            IngestError::Io(_) => "Io",
            IngestError::SchemaViolation { .. } => "SchemaViolation",
            IngestError::DanglingReference(_) => "DanglingReference",
            IngestError::DuplicateId(_) => "DuplicateId",
            IngestError::InvariantViolation(_) => "InvariantViolation",
            IngestError::MalformedRecord { .. } => "MalformedRecord",
            IngestError::UnachievableTargets(_) => "UnachievableTargets",
            IngestError::InvalidConfig(_) => "InvalidConfig",
        }
    }
}
