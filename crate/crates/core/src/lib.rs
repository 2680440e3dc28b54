//! Natural-language exploration of provenance-anchored relational graphs.
//!
//! * [`graph`] holds the immutable property graph.
//! * [`cypher`] parses, validates and executes a Cypher subset over it.
//! * [`linker`] resolves entity mentions to graph nodes with trigram similarity.
//! * [`nl`] drives the LLM question pipeline.
//! * [`ingest`] loads, adapts and synthesizes graphs.
//! * [`response`] shapes query answers for the HTTP service and the CLI.
//! * [`config`] reads the service configuration both of them share.

pub mod config;
pub mod cypher;
pub mod demo;
pub mod graph;
pub mod ingest;
pub mod linker;
pub mod nl;
pub mod par;
pub mod response;

pub use par::Parallelism;
