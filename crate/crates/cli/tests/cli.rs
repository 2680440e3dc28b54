use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn relgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relgraph")).args(args).env_remove("RUST_LOG").output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_then_stats() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("synthetic.json");
    let gen = relgraph(&["generate", "--seed", "42", "--out", path(&out)]);
    assert!(gen.status.success(), "{}", stderr(&gen));
    let stats = relgraph(&["stats", path(&out), "--json"]);
    assert!(stats.status.success());
    let report: Value = serde_json::from_str(&stdout(&stats)).unwrap();
    assert_eq!(report["total_nodes"], 600);
    assert_eq!(report["total_relationships"], 3000);
    assert_eq!(report["total_properties"], 13000);

    let table = relgraph(&["stats", path(&out)]);
    assert!(stdout(&table).contains("13000"));

    let again = dir.path().join("again.json");
    relgraph(&["generate", "--config", path(&root("fixtures/demo/synthetic.toml")), "--out", path(&again)]);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn transitive_queries_exit_1() {
    let graph = root("fixtures/usecase/graph.json");
    let suite = std::fs::read_to_string(root("fixtures/var_length.txt")).unwrap();
    for q in suite.lines().filter(|l| !l.is_empty()) {
        let out = relgraph(&["query", path(&graph), "--cypher", q]);
        assert_eq!(out.status.code(), Some(1), "{q}");
        assert!(stderr(&out).contains("error[UnsupportedFeature]"), "{q}: {}", stderr(&out));
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn mocked_question_is_reproducible() {
    let graph = root("fixtures/usecase/graph.json");
    let mock = root("fixtures/mock");
    let q = "Who interacted with Fray Bartolomé de Miranda?";
    let run = || relgraph(&["query", path(&graph), "--nl", q, "--mock", path(&mock)]);
    let (a, b) = (run(), run());
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let body: Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert!(body["cypher"].as_str().unwrap().contains("count(r) AS interactions"));
    assert!(body["answer"].as_str().is_some());
    assert!(body["diagnostics"]["timings"].as_array().is_none_or(Vec::is_empty));
}

#[test]
fn table_output() {
    let graph = root("fixtures/usecase/graph.json");
    let out = relgraph(&[
        "query",
        path(&graph),
        "--cypher",
        "MATCH (p:Place) RETURN count(p) AS places",
        "--format",
        "table",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().next().unwrap().trim() == "places");
    assert!(text.contains("(1 rows)") || text.contains("(1 row)"), "{text}");
}

#[test]
fn json_output_is_one_document() {
    let graph = root("fixtures/usecase/graph.json");
    let out = relgraph(&["query", path(&graph), "--cypher", "MATCH (p:Person) RETURN p.name LIMIT 3"]);
    let text = stdout(&out);
    let mut stream = serde_json::Deserializer::from_str(&text).into_iter::<Value>();
    let doc = stream.next().unwrap().unwrap();
    assert!(stream.next().is_none());
    assert_eq!(doc["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn backend_problems_have_distinct_exit_codes() {
    let graph = root("fixtures/usecase/graph.json");
    let missing = relgraph(&["query", path(&graph), "--nl", "Who?"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(stderr(&missing).contains("MissingBackend"));

    let unrecorded = relgraph(&["query", path(&graph), "--nl", "Who?", "--mock", path(&root("fixtures/mock"))]);
    assert_eq!(unrecorded.status.code(), Some(2));
    assert!(stderr(&unrecorded).contains("BackendUnavailable"));

    let refused = relgraph(&[
        "query",
        path(&graph),
        "--nl",
        "Remove every accusation from the records.",
        "--mock",
        path(&root("fixtures/mock")),
    ]);
    assert_eq!(refused.status.code(), Some(1));
    assert!(stderr(&refused).contains("UngeneratableQuery"));
}

#[test]
fn ingest_conll04_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("conll.json");
    let ok = relgraph(&[
        "ingest",
        path(&root("fixtures/conll04/sample20.corp")),
        "--format",
        "conll04",
        "--out",
        path(&out),
    ]);
    assert!(ok.status.success(), "{}", stderr(&ok));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let paragraphs = doc["nodes"].as_array().unwrap().iter().filter(|n| n["kind"] == "paragraph").count();
    assert_eq!(paragraphs, 20);

    // Re-ingesting the canonical JSON is a fixed point.
    let again = dir.path().join("again.json");
    assert!(relgraph(&["ingest", path(&out), "--out", path(&again)]).status.success());
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"nodes": []}"#).unwrap();
    let failed = relgraph(&["ingest", path(&bad), "--out", path(&dir.path().join("x.json"))]);
    assert_eq!(failed.status.code(), Some(1));
    assert!(stderr(&failed).contains("bad.json"));
}
