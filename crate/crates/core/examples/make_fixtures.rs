//! Regenerates the demo corpus and the mock model fixtures.
//!
//!     cargo run -p relgraph-core --example make_fixtures [fixtures-dir]

use std::path::PathBuf;

use relgraph_core::demo::{record_fixtures, usecase_graph};
use relgraph_core::ingest::export_graph_json;
use relgraph_core::nl::{PipelineConfig, PromptTemplates};

fn main() -> std::io::Result<()> {
    let root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"));
    let graph = usecase_graph();
    let fixtures = record_fixtures(&graph, &PromptTemplates::default(), &PipelineConfig::default());

    std::fs::create_dir_all(root.join("usecase"))?;
    std::fs::create_dir_all(root.join("mock"))?;
    std::fs::write(root.join("usecase/graph.json"), export_graph_json(&graph))?;
    let mut json = serde_json::to_string_pretty(&fixtures).expect("fixtures serialize");
    json.push('\n');
    std::fs::write(root.join("mock/usecase.json"), json)?;
    eprintln!(
        "wrote {} nodes, {} relationships, {} replies",
        graph.node_count(),
        graph.relationship_count(),
        fixtures.entries.len()
    );
    Ok(())
}
