//! Syntax tree for the supported Cypher subset.
//!
//! Patterns have no variable-length form: the type system makes transitive
//! paths unrepresentable, and the parser rejects them as unsupported.

/// A parsed query: one MATCH clause, optional WHERE, RETURN with optional
/// ORDER BY / SKIP / LIMIT.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub patterns: Vec<Pattern>,
    pub where_clause: Option<Expr>,
    pub distinct: bool,
    pub return_items: Vec<ReturnItem>,
    pub order_by: Vec<SortItem>,
    pub skip: Option<u64>,
    pub limit: Option<u64>,
}

/// `(a)-[r]->(b)<-[s]-(c)`: a start node followed by (relationship, node) hops.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub start: NodePattern,
    pub steps: Vec<(RelPattern, NodePattern)>,
}

impl Pattern {
    pub fn nodes(&self) -> impl Iterator<Item = &NodePattern> {
        std::iter::once(&self.start).chain(self.steps.iter().map(|(_, n)| n))
    }

    pub fn relationships(&self) -> impl Iterator<Item = &RelPattern> {
        self.steps.iter().map(|(r, _)| r)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NodePattern {
    pub variable: Option<String>,
    /// All listed labels must be present on a matching node.
    pub labels: Vec<String>,
    /// Property-equality constraints, in source order.
    pub properties: Vec<(String, Literal)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelDirection {
    /// `-[]->`
    Right,
    /// `<-[]-`
    Left,
    /// `-[]-`, matching either orientation.
    Undirected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelPattern {
    pub variable: Option<String>,
    /// Type alternatives (`:A|B`); empty means any type.
    pub types: Vec<String>,
    pub direction: RelDirection,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
}

/// A variable or a property of a variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ValueExpr {
    Variable(String),
    Property { variable: String, key: String },
}

impl ValueExpr {
    pub fn variable(&self) -> &str {
        match self {
            ValueExpr::Variable(v) | ValueExpr::Property { variable: v, .. } => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operand {
    Literal(Literal),
    Value(ValueExpr),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    Contains,
    StartsWith,
    EndsWith,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::Neq => "<>",
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
            CompareOp::Contains => "CONTAINS",
            CompareOp::StartsWith => "STARTS WITH",
            CompareOp::EndsWith => "ENDS WITH",
        }
    }
}

/// WHERE expression under two-valued logic.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Or(Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Compare {
        left: Operand,
        op: CompareOp,
        right: Operand,
    },
    In {
        operand: Operand,
        list: Vec<Literal>,
    },
    /// `x:Label1:Label2`
    HasLabels {
        variable: String,
        labels: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Projection {
    Value(ValueExpr),
    /// `count(*)` when `argument` is `None`.
    Count {
        distinct: bool,
        argument: Option<ValueExpr>,
    },
}

impl Projection {
    pub fn is_aggregate(&self) -> bool {
        matches!(self, Projection::Count { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnItem {
    pub projection: Projection,
    pub alias: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SortItem {
    /// A bare variable here may name a RETURN alias.
    pub projection: Projection,
    pub descending: bool,
}

impl Query {
    pub fn is_aggregating(&self) -> bool {
        self.return_items.iter().any(|i| i.projection.is_aggregate())
    }

    /// Output column names: the alias when given, otherwise the canonical
    /// text of the projection.
    pub fn column_names(&self) -> Vec<String> {
        self.return_items
            .iter()
            .map(|item| match &item.alias {
                Some(alias) => alias.clone(),
                None => super::printer::projection_text(&item.projection),
            })
            .collect()
    }
}
