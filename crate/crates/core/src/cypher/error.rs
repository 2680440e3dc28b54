use std::fmt;

use super::validate::Finding;

/// 1-based line and column (in characters) of a point in the query text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
pub struct Position {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CypherError {
    #[error("lex error at {position}: {message}")]
    Lex { position: Position, message: String },
    #[error("parse error at {position}: expected {}, found {found}", expected.join(" or "))]
    Parse { position: Position, expected: Vec<String>, found: String },
    #[error("unsupported feature at {position}: {feature}")]
    UnsupportedFeature { position: Position, feature: String },
    #[error("invalid query: {}", .0.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Finding>),
    #[error("query exceeded the limit of {limit} intermediate bindings")]
    ResourceLimit { limit: usize },
}

impl CypherError {
    pub fn position(&self) -> Option<Position> {
        match self {
            CypherError::Lex { position, .. }
            | CypherError::Parse { position, .. }
            | CypherError::UnsupportedFeature { position, .. } => Some(*position),
            _ => None,
        }
    }

    /// Stable machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            CypherError::Lex { .. } => "LexError",
            CypherError::Parse { .. } => "ParseError",
            CypherError::UnsupportedFeature { .. } => "UnsupportedFeature",
            CypherError::Invalid(_) => "InvalidQuery",
            CypherError::ResourceLimit { .. } => "ResourceLimit",
        }
    }
}
