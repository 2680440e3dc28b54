//! Canonical query text: uppercase keywords, one clause per line,
//! backquotes only where an identifier needs them.

use std::fmt::Write;

use super::ast::*;
use super::lexer::Keyword;

pub fn pretty_print(query: &Query) -> String {
    let mut lines = Vec::new();
    if !query.patterns.is_empty() {
        let patterns: Vec<String> = query.patterns.iter().map(pattern_text).collect();
        lines.push(format!("MATCH {}", patterns.join(", ")));
    }
    if let Some(expr) = &query.where_clause {
        lines.push(format!("WHERE {}", expr_text(expr, 0)));
    }
    let items: Vec<String> = query
        .return_items
        .iter()
        .map(|item| match &item.alias {
            Some(alias) => format!("{} AS {}", projection_text(&item.projection), ident(alias)),
            None => projection_text(&item.projection),
        })
        .collect();
    let distinct = if query.distinct { "DISTINCT " } else { "" };
    lines.push(format!("RETURN {distinct}{}", items.join(", ")));
    if !query.order_by.is_empty() {
        let keys: Vec<String> = query
            .order_by
            .iter()
            .map(|s| {
                let dir = if s.descending { " DESC" } else { "" };
                format!("{}{dir}", projection_text(&s.projection))
            })
            .collect();
        lines.push(format!("ORDER BY {}", keys.join(", ")));
    }
    if let Some(skip) = query.skip {
        lines.push(format!("SKIP {skip}"));
    }
    if let Some(limit) = query.limit {
        lines.push(format!("LIMIT {limit}"));
    }
    lines.join("\n")
}

/// Identifier as it must appear in query text.
pub fn ident(name: &str) -> String {
    let mut chars = name.chars();
    let plain = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && Keyword::lookup(name).is_none();
    if plain {
        name.to_string()
    } else {
        format!("`{}`", name.replace('`', "``"))
    }
}

pub fn literal_text(lit: &Literal) -> String {
    match lit {
        Literal::Null => "null".into(),
        Literal::Bool(b) => b.to_string(),
        Literal::Int(i) => i.to_string(),
        Literal::Float(x) => format!("{x:?}"),
        Literal::Str(s) => {
            let mut out = String::with_capacity(s.len() + 2);
            out.push('\'');
            for c in s.chars() {
                match c {
                    '\\' => out.push_str("\\\\"),
                    '\'' => out.push_str("\\'"),
                    '\n' => out.push_str("\\n"),
                    '\t' => out.push_str("\\t"),
                    '\r' => out.push_str("\\r"),
                    c if c.is_control() => {
                        let mut buf = [0u16; 2];
                        for unit in c.encode_utf16(&mut buf) {
                            let _ = write!(out, "\\u{unit:04x}");
                        }
                    }
                    c => out.push(c),
                }
            }
            out.push('\'');
            out
        }
    }
}

fn node_text(node: &NodePattern) -> String {
    let mut out = String::from("(");
    if let Some(v) = &node.variable {
        out.push_str(&ident(v));
    }
    for label in &node.labels {
        out.push(':');
        out.push_str(&ident(label));
    }
    if !node.properties.is_empty() {
        if node.variable.is_some() || !node.labels.is_empty() {
            out.push(' ');
        }
        let props: Vec<String> =
            node.properties.iter().map(|(k, v)| format!("{}: {}", ident(k), literal_text(v))).collect();
        let _ = write!(out, "{{{}}}", props.join(", "));
    }
    out.push(')');
    out
}

fn rel_text(rel: &RelPattern) -> String {
    let mut detail = String::new();
    if let Some(v) = &rel.variable {
        detail.push_str(&ident(v));
    }
    if !rel.types.is_empty() {
        let types: Vec<String> = rel.types.iter().map(|t| ident(t)).collect();
        let _ = write!(detail, ":{}", types.join("|"));
    }
    let body = if detail.is_empty() { "--".to_string() } else { format!("-[{detail}]-") };
    match rel.direction {
        RelDirection::Right => format!("{body}>"),
        RelDirection::Left => format!("<{body}"),
        RelDirection::Undirected => body,
    }
}

pub fn pattern_text(pattern: &Pattern) -> String {
    let mut out = node_text(&pattern.start);
    for (rel, node) in &pattern.steps {
        out.push_str(&rel_text(rel));
        out.push_str(&node_text(node));
    }
    out
}

pub fn value_text(value: &ValueExpr) -> String {
    match value {
        ValueExpr::Variable(v) => ident(v),
        ValueExpr::Property { variable, key } => format!("{}.{}", ident(variable), ident(key)),
    }
}

pub fn projection_text(projection: &Projection) -> String {
    match projection {
        Projection::Value(v) => value_text(v),
        Projection::Count { argument: None, .. } => "count(*)".into(),
        Projection::Count { distinct, argument: Some(arg) } => {
            format!("count({}{})", if *distinct { "DISTINCT " } else { "" }, value_text(arg))
        }
    }
}

fn operand_text(op: &Operand) -> String {
    match op {
        Operand::Literal(l) => literal_text(l),
        Operand::Value(v) => value_text(v),
    }
}

fn precedence(expr: &Expr) -> u8 {
    match expr {
        Expr::Or(..) => 1,
        Expr::And(..) => 2,
        Expr::Not(_) => 3,
        _ => 4,
    }
}

/// Renders `expr`, parenthesized when its precedence is below `min`.
fn expr_text(expr: &Expr, min: u8) -> String {
    let prec = precedence(expr);
    let text = match expr {
        Expr::Or(l, r) => format!("{} OR {}", expr_text(l, prec), expr_text(r, prec + 1)),
        Expr::And(l, r) => format!("{} AND {}", expr_text(l, prec), expr_text(r, prec + 1)),
        Expr::Not(inner) => format!("NOT {}", expr_text(inner, prec)),
        Expr::Compare { left, op, right } => {
            format!("{} {} {}", operand_text(left), op.symbol(), operand_text(right))
        }
        Expr::In { operand, list } => {
            let items: Vec<String> = list.iter().map(literal_text).collect();
            format!("{} IN [{}]", operand_text(operand), items.join(", "))
        }
        Expr::HasLabels { variable, labels } => {
            let labels: String = labels.iter().map(|l| format!(":{}", ident(l))).collect();
            format!("{}{labels}", ident(variable))
        }
    };
    if prec < min {
        format!("({text})")
    } else {
        text
    }
}
