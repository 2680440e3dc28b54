//! Plain-text rendering for terminals.

use std::fmt::Write;

use relgraph_core::cypher::ResultValue;
use relgraph_core::graph::DistributionReport;
use relgraph_core::response::QueryResponse;

fn cell(v: &ResultValue) -> String {
    match v {
        ResultValue::Null => "null".into(),
        ResultValue::Bool(b) => b.to_string(),
        ResultValue::Int(i) => i.to_string(),
        ResultValue::Float(f) => f.to_string(),
        ResultValue::Text(s) => s.clone(),
        ResultValue::Node(id) => format!("({id})"),
        ResultValue::Relationship(id) => format!("[{id}]"),
    }
}

/// Columns padded to their widest cell, then a row count and the answer.
pub fn render(response: &QueryResponse) -> String {
    let rows: Vec<Vec<String>> = response.rows.iter().map(|r| r.iter().map(cell).collect()).collect();
    let mut widths: Vec<usize> = response.columns.iter().map(|c| c.chars().count()).collect();
    for row in &rows {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| -> String {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join(" | ").trim_end().to_string()
    };
    let mut out = String::new();
    let _ = writeln!(out, "{}", line(&response.columns));
    let _ = writeln!(out, "{}", widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("-+-"));
    for row in &rows {
        let _ = writeln!(out, "{}", line(row));
    }
    let _ = writeln!(out, "({} rows)", rows.len());
    if let Some(answer) = &response.answer {
        let _ = writeln!(out, "\n{answer}");
    }
    out
}

pub fn stats(report: &DistributionReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "nodes          {}", report.total_nodes);
    let _ = writeln!(out, "relationships  {}", report.total_relationships);
    let _ = writeln!(out, "properties     {}", report.total_properties);
    let _ = writeln!(out, "\nnodes by label");
    for (label, n) in &report.nodes_by_label {
        let _ = writeln!(out, "  {label:<20} {n}");
    }
    let _ = writeln!(out, "\nrelationships by type");
    for (t, n) in &report.relationships_by_type {
        let _ = writeln!(out, "  {t:<20} {n}");
    }
    out
}
