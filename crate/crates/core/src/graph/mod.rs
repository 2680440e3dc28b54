//! Embedded property graph: entity and paragraph nodes, typed relationships
//! carrying provenance sentences, and schema / distribution introspection.
//!
//! A graph is assembled through [`GraphBuilder`] and frozen with
//! [`GraphBuilder::finalize`]; the resulting [`PropertyGraph`] is immutable
//! and can be shared freely between readers.

mod id;
mod model;
mod schema;
mod store;
mod subgraph;

pub use id::compare_ids;
pub use model::{
    EntityNode, Node, ParagraphNode, Properties, Relationship, Scalar, PARAGRAPH_LABEL, SOURCE_PARAGRAPH_KEY,
};
pub use schema::{DistributionReport, GraphSchema};
pub use store::{Direction, GraphBuilder, Neighbor, NodeSpec, PropertyGraph, RelationshipSpec};
pub use subgraph::{NodeRecord, RelationshipRecord, ResultSubgraph};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("duplicate element id {0:?}")]
    DuplicateId(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("relationship endpoint {0:?} does not exist")]
    UnknownEndpoint(String),
    #[error("paragraph {0:?} does not exist")]
    UnknownParagraph(String),
    #[error("unknown node {0:?}")]
    UnknownNode(String),
}
