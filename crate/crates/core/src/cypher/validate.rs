use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::ast::*;
use super::printer::{projection_text, value_text};
use crate::graph::GraphSchema;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "name")]
pub enum FindingKind {
    UnboundVariable(String),
    /// Same name used for a node and a relationship.
    VariableKindConflict(String),
    /// A relationship variable appearing in more than one relationship pattern.
    RepeatedRelationshipVariable(String),
    LabelOnRelationship(String),
    DuplicateColumn(String),
    /// ORDER BY key that is not a RETURN column, in an aggregating or DISTINCT query.
    OrderByNotProjected(String),
    UnknownLabel(String),
    UnknownRelType(String),
    UnknownPropertyKey(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub severity: Severity,
    #[serde(flatten)]
    pub kind: FindingKind,
    /// Human-readable location inside the query, e.g. `RETURN item 2`.
    pub location: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (what, name) = match &self.kind {
            FindingKind::UnboundVariable(n) => ("unbound variable", n),
            FindingKind::VariableKindConflict(n) => ("variable used as both node and relationship", n),
            FindingKind::RepeatedRelationshipVariable(n) => ("relationship variable bound twice", n),
            FindingKind::LabelOnRelationship(n) => ("label predicate on relationship variable", n),
            FindingKind::DuplicateColumn(n) => ("duplicate column name", n),
            FindingKind::OrderByNotProjected(n) => ("ORDER BY key must be a RETURN column", n),
            FindingKind::UnknownLabel(n) => ("label not in schema", n),
            FindingKind::UnknownRelType(n) => ("relationship type not in schema", n),
            FindingKind::UnknownPropertyKey(n) => ("property key not in schema", n),
        };
        write!(f, "{what} `{name}` ({})", self.location)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub errors: Vec<Finding>,
    pub warnings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.errors.is_empty() && self.warnings.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum VarKind {
    Node,
    Relationship,
}

/// Variables bound by the MATCH patterns, with their element kind.
pub(crate) fn bound_variables(query: &Query) -> BTreeMap<String, VarKind> {
    let mut vars = BTreeMap::new();
    for pattern in &query.patterns {
        for node in pattern.nodes() {
            if let Some(v) = &node.variable {
                vars.entry(v.clone()).or_insert(VarKind::Node);
            }
        }
        for rel in pattern.relationships() {
            if let Some(v) = &rel.variable {
                vars.entry(v.clone()).or_insert(VarKind::Relationship);
            }
        }
    }
    vars
}

fn error(kind: FindingKind, location: impl Into<String>) -> Finding {
    Finding { severity: Severity::Error, kind, location: location.into() }
}

fn warning(kind: FindingKind, location: impl Into<String>) -> Finding {
    Finding { severity: Severity::Warning, kind, location: location.into() }
}

/// Scoping errors only; these make a query non-executable.
pub fn check_scope(query: &Query) -> Vec<Finding> {
    let mut errors = Vec::new();
    let vars = bound_variables(query);

    let mut node_vars = BTreeSet::new();
    let mut rel_seen = BTreeSet::new();
    for (pi, pattern) in query.patterns.iter().enumerate() {
        for node in pattern.nodes() {
            if let Some(v) = &node.variable {
                node_vars.insert(v.clone());
            }
        }
        for (si, rel) in pattern.relationships().enumerate() {
            if let Some(v) = &rel.variable {
                let at = format!("MATCH pattern {}, relationship {}", pi + 1, si + 1);
                if !rel_seen.insert(v.clone()) {
                    errors.push(error(FindingKind::RepeatedRelationshipVariable(v.clone()), at.clone()));
                }
                if node_vars.contains(v) {
                    errors.push(error(FindingKind::VariableKindConflict(v.clone()), at));
                }
            }
        }
    }
    // node variables appearing after a same-named relationship
    for v in node_vars.intersection(&rel_seen) {
        if !errors.iter().any(|f| f.kind == FindingKind::VariableKindConflict(v.clone())) {
            errors.push(error(FindingKind::VariableKindConflict(v.clone()), "MATCH"));
        }
    }

    let require = |name: &str, at: &str, errors: &mut Vec<Finding>| {
        if !vars.contains_key(name) {
            errors.push(error(FindingKind::UnboundVariable(name.to_string()), at));
        }
    };

    if let Some(expr) = &query.where_clause {
        visit_expr(expr, &mut |e| match e {
            Expr::Compare { left, right, .. } => {
                for op in [left, right] {
                    if let Operand::Value(v) = op {
                        require(v.variable(), "WHERE", &mut errors);
                    }
                }
            }
            Expr::In { operand: Operand::Value(v), .. } => require(v.variable(), "WHERE", &mut errors),
            Expr::HasLabels { variable, .. } => {
                require(variable, "WHERE", &mut errors);
                if vars.get(variable) == Some(&VarKind::Relationship) {
                    errors.push(error(FindingKind::LabelOnRelationship(variable.clone()), "WHERE"));
                }
            }
            _ => {}
        });
    }

    let columns = query.column_names();
    let mut seen_columns = BTreeSet::new();
    for (i, item) in query.return_items.iter().enumerate() {
        let at = format!("RETURN item {}", i + 1);
        if let Some(v) = projection_variable(&item.projection) {
            require(v, &at, &mut errors);
        }
        if !seen_columns.insert(columns[i].clone()) {
            errors.push(error(FindingKind::DuplicateColumn(columns[i].clone()), at));
        }
    }

    let restricted = query.is_aggregating() || query.distinct;
    for (i, sort) in query.order_by.iter().enumerate() {
        let at = format!("ORDER BY item {}", i + 1);
        match resolve_sort_key(query, &sort.projection) {
            SortKey::Column(_) => {}
            SortKey::Expression if restricted => {
                errors.push(error(FindingKind::OrderByNotProjected(projection_text(&sort.projection)), at))
            }
            SortKey::Expression => {
                if let Some(v) = projection_variable(&sort.projection) {
                    require(v, &at, &mut errors);
                }
                if sort.projection.is_aggregate() {
                    errors.push(error(FindingKind::OrderByNotProjected(projection_text(&sort.projection)), at));
                }
            }
        }
    }
    errors
}

fn projection_variable(p: &Projection) -> Option<&str> {
    match p {
        Projection::Value(v) => Some(v.variable()),
        Projection::Count { argument: Some(v), .. } => Some(v.variable()),
        Projection::Count { argument: None, .. } => None,
    }
}

pub(crate) enum SortKey {
    /// Index of the RETURN column the key refers to.
    Column(usize),
    /// Evaluated against the underlying binding.
    Expression,
}

/// A sort key names a column when it is a bare alias or repeats a RETURN
/// projection verbatim.
pub(crate) fn resolve_sort_key(query: &Query, projection: &Projection) -> SortKey {
    if let Projection::Value(ValueExpr::Variable(name)) = projection {
        if let Some(i) = query.return_items.iter().position(|it| it.alias.as_deref() == Some(name.as_str())) {
            return SortKey::Column(i);
        }
    }
    match query.return_items.iter().position(|it| &it.projection == projection) {
        Some(i) => SortKey::Column(i),
        None => SortKey::Expression,
    }
}

pub(crate) fn visit_expr(expr: &Expr, f: &mut impl FnMut(&Expr)) {
    f(expr);
    match expr {
        Expr::Or(l, r) | Expr::And(l, r) => {
            visit_expr(l, f);
            visit_expr(r, f);
        }
        Expr::Not(inner) => visit_expr(inner, f),
        _ => {}
    }
}

/// Scoping errors plus schema warnings for labels, relationship types and
/// property keys the graph does not contain.
pub fn validate(query: &Query, schema: &GraphSchema) -> ValidationReport {
    let errors = check_scope(query);
    let mut warnings = Vec::new();
    let warn_key = |key: &str, at: String, warnings: &mut Vec<Finding>| {
        if !schema.has_property_key(key) {
            warnings.push(warning(FindingKind::UnknownPropertyKey(key.to_string()), at));
        }
    };

    for (pi, pattern) in query.patterns.iter().enumerate() {
        for (ni, node) in pattern.nodes().enumerate() {
            let at = format!("MATCH pattern {}, node {}", pi + 1, ni + 1);
            for label in &node.labels {
                if !schema.has_label(label) {
                    warnings.push(warning(FindingKind::UnknownLabel(label.clone()), at.clone()));
                }
            }
            for (key, _) in &node.properties {
                warn_key(key, at.clone(), &mut warnings);
            }
        }
        for (ri, rel) in pattern.relationships().enumerate() {
            let at = format!("MATCH pattern {}, relationship {}", pi + 1, ri + 1);
            for ty in &rel.types {
                if !schema.has_rel_type(ty) {
                    warnings.push(warning(FindingKind::UnknownRelType(ty.clone()), at.clone()));
                }
            }
        }
    }
    if let Some(expr) = &query.where_clause {
        visit_expr(expr, &mut |e| match e {
            Expr::Compare { left, right, .. } => {
                for op in [left, right] {
                    if let Operand::Value(ValueExpr::Property { key, .. }) = op {
                        warn_key(key, "WHERE".into(), &mut warnings);
                    }
                }
            }
            Expr::In { operand: Operand::Value(ValueExpr::Property { key, .. }), .. } => {
                warn_key(key, "WHERE".into(), &mut warnings)
            }
            Expr::HasLabels { labels, .. } => {
                for label in labels {
                    if !schema.has_label(label) {
                        warnings.push(warning(FindingKind::UnknownLabel(label.clone()), "WHERE"));
                    }
                }
            }
            _ => {}
        });
    }
    for (i, item) in query.return_items.iter().enumerate() {
        let value = match &item.projection {
            Projection::Value(v) | Projection::Count { argument: Some(v), .. } => v,
            Projection::Count { argument: None, .. } => continue,
        };
        if let ValueExpr::Property { key, .. } = value {
            warn_key(key, format!("RETURN item {} ({})", i + 1, value_text(value)), &mut warnings);
        }
    }
    ValidationReport { errors, warnings }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn schema() -> GraphSchema {
        let mut s = GraphSchema::default();
        s.node_labels.insert("Person".into(), 3);
        s.relationship_types.insert("ACCUSES".into(), 1);
        s.label_property_keys.insert("Person".into(), ["name".to_string()].into());
        s
    }

    #[test]
    fn known_label_is_clean() {
        let report = validate(&parse("MATCH (p:Person) RETURN p.name").unwrap(), &schema());
        assert!(report.is_empty(), "{report:?}");
    }

    #[test]
    fn unknown_label_warns() {
        let report = validate(&parse("MATCH (p:Persn) RETURN p").unwrap(), &schema());
        assert!(report.is_ok());
        assert_eq!(report.warnings[0].kind, FindingKind::UnknownLabel("Persn".into()));
        assert_eq!(report.warnings[0].location, "MATCH pattern 1, node 1");
    }

    #[test]
    fn unbound_return_variable_errors() {
        let report = validate(&parse("RETURN x").unwrap(), &schema());
        assert_eq!(report.errors[0].kind, FindingKind::UnboundVariable("x".into()));
        let report = validate(&parse("MATCH (a) WHERE b.name = 'x' RETURN a").unwrap(), &schema());
        assert_eq!(report.errors[0].kind, FindingKind::UnboundVariable("b".into()));
    }

    #[test]
    fn order_by_rules() {
        let ok = parse("MATCH (p)-[r]-(m) RETURN p.name, count(r) AS n ORDER BY n DESC").unwrap();
        assert!(check_scope(&ok).is_empty());
        let bad = parse("MATCH (p)-[r]-(m) RETURN count(r) ORDER BY p.name").unwrap();
        assert_eq!(check_scope(&bad)[0].kind, FindingKind::OrderByNotProjected("p.name".into()));
        let free = parse("MATCH (p) RETURN p.name ORDER BY p.age").unwrap();
        assert!(check_scope(&free).is_empty());
    }

    #[test]
    fn variable_conflicts() {
        let q = parse("MATCH (a)-[a]->(b) RETURN b").unwrap();
        assert!(check_scope(&q).iter().any(|f| f.kind == FindingKind::VariableKindConflict("a".into())));
        let q = parse("MATCH (a)-[r]->(b), (c)-[r]->(d) RETURN a").unwrap();
        assert!(check_scope(&q).iter().any(|f| f.kind == FindingKind::RepeatedRelationshipVariable("r".into())));
        let q = parse("MATCH (a)-[r]->(b) WHERE r:Person RETURN a").unwrap();
        assert!(check_scope(&q).iter().any(|f| f.kind == FindingKind::LabelOnRelationship("r".into())));
        let q = parse("MATCH (a) RETURN a.name, a.name").unwrap();
        assert!(check_scope(&q).iter().any(|f| matches!(f.kind, FindingKind::DuplicateColumn(_))));
    }
}
