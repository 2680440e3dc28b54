//! Sequential vs rayon on the two data-parallel hot spots: fuzzy linking
//! over every entity, and first-hop pattern expansion. Build with
//! `--no-default-features` to confirm both modes collapse to one path.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use relgraph_core::cypher::{execute_with, parse, ExecOptions};
use relgraph_core::ingest::{generate_synthetic, SyntheticConfig};
use relgraph_core::linker::{LinkIndex, LinkerConfig};
use relgraph_core::Parallelism;

const MODES: [(&str, Parallelism); 2] = [("sequential", Parallelism::Sequential), ("parallel", Parallelism::Parallel)];

fn corpus(nodes: usize) -> relgraph_core::graph::PropertyGraph {
    let config = SyntheticConfig {
        nodes,
        relationships: nodes * 5,
        properties: nodes * 5 * 3 + nodes * 8,
        seed: 42,
        ..Default::default()
    };
    generate_synthetic(&config).expect("bench corpus")
}

fn linking(c: &mut Criterion) {
    let mut group = c.benchmark_group("link");
    for size in [600, 6000] {
        let graph = corpus(size);
        let config = LinkerConfig::default();
        for (name, mode) in MODES {
            let index = LinkIndex::build(&graph, &config).with_parallelism(mode);
            group.bench_with_input(BenchmarkId::new(name, size), &index, |b, index| {
                b.iter(|| index.link("bartolome de miranda", config.k, config.threshold))
            });
        }
    }
    group.finish();
}

fn matching(c: &mut Criterion) {
    let mut group = c.benchmark_group("execute");
    let query = parse("MATCH (a:Person)-[r]-(b) WHERE b.name <> a.name RETURN a.name, count(r) AS n ORDER BY n DESC")
        .expect("bench query");
    for size in [600, 6000] {
        let graph = corpus(size);
        for (name, mode) in MODES {
            let options = ExecOptions { parallelism: mode, ..ExecOptions::default() };
            group.bench_with_input(BenchmarkId::new(name, size), &graph, |b, graph| {
                b.iter(|| execute_with(&query, graph, &options).expect("bench query runs"))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, linking, matching);
criterion_main!(benches);
