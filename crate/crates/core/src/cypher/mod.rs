//! Cypher subset: lexer, parser, canonical printer, schema-aware validator
//! and executor over a [`crate::graph::PropertyGraph`].
//!
//! Supported: one MATCH clause with comma-separated patterns of direct
//! relationships (any direction, type alternatives), WHERE with
//! AND/OR/NOT, comparisons, string predicates, `IN [..]` and label tests,
//! RETURN with DISTINCT / aliases / `count`, ORDER BY, SKIP, LIMIT.
//! The full grammar lives in `docs/cypher-subset.md`.
//!
//! Comparisons use two-valued logic: a comparison touching null, a missing
//! property, or operands of different types is false, so `NOT` of it is true.

mod ast;
mod error;
mod exec;
mod lexer;
mod parser;
mod printer;
mod validate;
mod value;

pub use ast::*;
pub use error::{CypherError, Position};
pub use exec::{execute, execute_with, ExecOptions, QueryResult, DEFAULT_MAX_BINDINGS};
pub use lexer::{tokenize, Keyword, Spanned, Token};
pub use parser::parse;
pub use printer::{ident, literal_text, pattern_text, pretty_print, projection_text};
pub use validate::{check_scope, validate, Finding, FindingKind, Severity, ValidationReport};
pub use value::ResultValue;
