//! Test support: small random graphs, a sampler for queries in a fixed
//! shape family, and a brute-force interpreter for that family that shares
//! no code with the engine.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use relgraph_core::cypher::ResultValue;
use relgraph_core::graph::{GraphBuilder, NodeSpec, PropertyGraph, RelationshipSpec, Scalar};

pub const LABELS: &[&str] = &["A", "B", "C"];
pub const TYPES: &[&str] = &["X", "Y", "Z"];
pub const NAMES: &[&str] = &["ana", "bo", "bob", "cy", "dee"];

pub fn fixture(rel: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel)
}

/// The ten variable-length and path queries every entry point must refuse.
pub fn var_length_suite() -> Vec<String> {
    let text = std::fs::read_to_string(fixture("var_length.txt")).unwrap();
    text.lines().filter(|l| !l.trim().is_empty()).map(String::from).collect()
}

/// At most 12 nodes and 30 relationships; self-loops and parallel edges
/// occur. Nodes carry `name` and sometimes `age`; relationships sometimes `w`.
pub fn random_graph(seed: u64) -> PropertyGraph {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut b = GraphBuilder::new();
    let n = rng.random_range(0..=12usize);
    let mut ids = Vec::new();
    for i in 0..n {
        let mut labels: Vec<&str> = LABELS.iter().copied().filter(|_| rng.random_bool(0.45)).collect();
        if labels.is_empty() {
            labels.push(LABELS.choose(&mut rng).unwrap());
        }
        let mut spec = NodeSpec::entity(*NAMES.choose(&mut rng).unwrap(), &labels).with_id(format!("n{i}"));
        if rng.random_bool(0.7) {
            spec = spec.with_property("age", rng.random_range(0..5i64));
        }
        ids.push(b.add_node(spec).unwrap());
    }
    if n > 0 {
        let m = rng.random_range(0..=30usize);
        for i in 0..m {
            let s = ids.choose(&mut rng).unwrap();
            let t = ids.choose(&mut rng).unwrap();
            let mut spec = RelationshipSpec::new(s, t, *TYPES.choose(&mut rng).unwrap())
                .with_id(format!("r{i}"))
                .sentence(format!("{s} and {t}."));
            if rng.random_bool(0.5) {
                spec = spec.with_property("w", rng.random_range(0..4i64));
            }
            b.add_relationship(spec).unwrap();
        }
    }
    b.finalize()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    Right,
    Left,
    Both,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Lit {
    Int(i64),
    Text(String),
}

impl Lit {
    fn cypher(&self) -> String {
        match self {
            Lit::Int(i) => i.to_string(),
            Lit::Text(s) => format!("'{s}'"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NodePat {
    pub var: String,
    pub labels: Vec<String>,
    pub name_eq: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RelPat {
    pub var: String,
    pub types: Vec<String>,
    pub dir: Dir,
}

#[derive(Debug, Clone)]
pub enum Pred {
    Cmp { var: String, key: String, op: &'static str, lit: Lit },
    Label { var: String, label: String },
    Not(Box<Pred>),
    And(Box<Pred>, Box<Pred>),
    Or(Box<Pred>, Box<Pred>),
}

#[derive(Debug, Clone)]
pub enum Ret {
    /// Every variable, in pattern order.
    Elements,
    Props(Vec<(String, String)>),
    Distinct(String, String),
    CountBy(String, String),
    CountStar,
    CountProp(String, String),
}

/// A chain pattern `(n0)-[r0]-(n1)-[r1]-(n2)` with filters and a projection.
#[derive(Debug, Clone)]
pub struct QuerySpec {
    pub nodes: Vec<NodePat>,
    pub rels: Vec<RelPat>,
    pub filter: Option<Pred>,
    pub ret: Ret,
}

const OPS: &[&str] = &["=", "<>", "<", ">", "<=", ">=", "STARTS WITH"];

fn sample_lit(rng: &mut StdRng, key: &str) -> Lit {
    // Occasionally compare across types to exercise the mismatch rule.
    let cross = rng.random_bool(0.1);
    match (key == "name") ^ cross {
        true => Lit::Text(if rng.random_bool(0.5) { NAMES.choose(rng).unwrap().to_string() } else { "b".into() }),
        false => Lit::Int(rng.random_range(-1..5)),
    }
}

fn sample_pred(rng: &mut StdRng, nodes: &[String], rels: &[String], depth: u32) -> Pred {
    let roll = rng.random_range(0..10);
    if depth > 0 && roll < 3 {
        let a = Box::new(sample_pred(rng, nodes, rels, depth - 1));
        return match roll {
            0 => Pred::Not(a),
            1 => Pred::And(a, Box::new(sample_pred(rng, nodes, rels, depth - 1))),
            _ => Pred::Or(a, Box::new(sample_pred(rng, nodes, rels, depth - 1))),
        };
    }
    if roll < 5 {
        return Pred::Label { var: nodes.choose(rng).unwrap().clone(), label: LABELS.choose(rng).unwrap().to_string() };
    }
    let (var, key) = if !rels.is_empty() && rng.random_bool(0.25) {
        (rels.choose(rng).unwrap().clone(), "w".to_string())
    } else {
        (nodes.choose(rng).unwrap().clone(), ["name", "age", "missing"].choose(rng).unwrap().to_string())
    };
    let lit = sample_lit(rng, &key);
    Pred::Cmp { var, key, op: OPS.choose(rng).unwrap(), lit }
}

pub fn sample_query(rng: &mut StdRng) -> QuerySpec {
    let hops = rng.random_range(0..=2usize);
    let nodes: Vec<NodePat> = (0..=hops)
        .map(|i| NodePat {
            var: format!("n{i}"),
            labels: LABELS.iter().filter(|_| rng.random_bool(0.2)).map(|s| s.to_string()).collect(),
            name_eq: rng.random_bool(0.1).then(|| NAMES.choose(rng).unwrap().to_string()),
        })
        .collect();
    let rels: Vec<RelPat> = (0..hops)
        .map(|i| RelPat {
            var: format!("r{i}"),
            types: TYPES.iter().filter(|_| rng.random_bool(0.3)).map(|s| s.to_string()).collect(),
            dir: *[Dir::Right, Dir::Left, Dir::Both].choose(rng).unwrap(),
        })
        .collect();
    let node_vars: Vec<String> = nodes.iter().map(|n| n.var.clone()).collect();
    let rel_vars: Vec<String> = rels.iter().map(|r| r.var.clone()).collect();
    let filter = rng.random_bool(0.6).then(|| sample_pred(rng, &node_vars, &rel_vars, 2));
    let pick_prop =
        |rng: &mut StdRng| (node_vars.choose(rng).unwrap().clone(), ["name", "age"].choose(rng).unwrap().to_string());
    let ret = match rng.random_range(0..6) {
        0 => Ret::Elements,
        1 => {
            let mut ps: Vec<(String, String)> = (0..rng.random_range(1..=3)).map(|_| pick_prop(rng)).collect();
            ps.sort();
            ps.dedup();
            Ret::Props(ps)
        }
        2 => {
            let (v, k) = pick_prop(rng);
            Ret::Distinct(v, k)
        }
        3 => {
            let (v, k) = pick_prop(rng);
            Ret::CountBy(v, k)
        }
        4 => Ret::CountStar,
        _ => {
            let (v, k) = pick_prop(rng);
            Ret::CountProp(v, k)
        }
    };
    QuerySpec { nodes, rels, filter, ret }
}

fn pred_text(p: &Pred) -> String {
    match p {
        Pred::Cmp { var, key, op, lit } => format!("{var}.{key} {op} {}", lit.cypher()),
        Pred::Label { var, label } => format!("{var}:{label}"),
        Pred::Not(a) => format!("NOT ({})", pred_text(a)),
        Pred::And(a, b) => format!("({}) AND ({})", pred_text(a), pred_text(b)),
        Pred::Or(a, b) => format!("({}) OR ({})", pred_text(a), pred_text(b)),
    }
}

impl QuerySpec {
    pub fn pattern_text(&self) -> String {
        let node = |n: &NodePat| {
            let labels: String = n.labels.iter().map(|l| format!(":{l}")).collect();
            let props = n.name_eq.as_ref().map(|v| format!(" {{name: '{v}'}}")).unwrap_or_default();
            format!("({}{labels}{props})", n.var)
        };
        let mut out = node(&self.nodes[0]);
        for (r, n) in self.rels.iter().zip(&self.nodes[1..]) {
            let types = if r.types.is_empty() { String::new() } else { format!(":{}", r.types.join("|")) };
            let body = format!("[{}{types}]", r.var);
            out += &match r.dir {
                Dir::Right => format!("-{body}->"),
                Dir::Left => format!("<-{body}-"),
                Dir::Both => format!("-{body}-"),
            };
            out += &node(n);
        }
        out
    }

    pub fn vars(&self) -> Vec<String> {
        let mut v = vec![self.nodes[0].var.clone()];
        for (r, n) in self.rels.iter().zip(&self.nodes[1..]) {
            v.push(r.var.clone());
            v.push(n.var.clone());
        }
        v
    }

    pub fn return_text(&self) -> String {
        match &self.ret {
            Ret::Elements => self.vars().join(", "),
            Ret::Props(ps) => ps.iter().map(|(v, k)| format!("{v}.{k}")).collect::<Vec<_>>().join(", "),
            Ret::Distinct(v, k) => format!("DISTINCT {v}.{k}"),
            Ret::CountBy(v, k) => format!("{v}.{k} AS key, count(*) AS n"),
            Ret::CountStar => "count(*)".into(),
            Ret::CountProp(v, k) => format!("count({v}.{k})"),
        }
    }

    pub fn text(&self) -> String {
        let filter = self.filter.as_ref().map(|p| format!(" WHERE {}", pred_text(p))).unwrap_or_default();
        format!("MATCH {}{filter} RETURN {}", self.pattern_text(), self.return_text())
    }
}

/// Row values as plain data, comparable across implementations.
#[derive(Debug, Clone, PartialEq, PartialOrd)]
pub enum Cell {
    Null,
    Int(i64),
    Text(String),
    Node(String),
    Rel(String),
}

pub fn cells(rows: &[Vec<ResultValue>]) -> Vec<Vec<Cell>> {
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|v| match v {
                    ResultValue::Null => Cell::Null,
                    ResultValue::Int(i) => Cell::Int(*i),
                    ResultValue::Text(s) => Cell::Text(s.clone()),
                    ResultValue::Node(id) => Cell::Node(id.clone()),
                    ResultValue::Relationship(id) => Cell::Rel(id.clone()),
                    other => panic!("unexpected value {other:?}"),
                })
                .collect()
        })
        .collect()
}

pub fn sorted(mut rows: Vec<Vec<Cell>>) -> Vec<Vec<Cell>> {
    rows.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    rows
}

#[derive(Clone)]
struct Binding {
    nodes: Vec<usize>,
    rels: Vec<usize>,
}

fn scalar_cell(v: Option<Scalar>) -> Cell {
    match v {
        Some(Scalar::Int(i)) => Cell::Int(i),
        Some(Scalar::Text(s)) => Cell::Text(s),
        None => Cell::Null,
        Some(other) => panic!("unexpected property {other:?}"),
    }
}

/// Brute-force evaluation: every node tuple, then for each hop a full scan
/// of the relationship list for edges joining the two nodes.
pub fn oracle(graph: &PropertyGraph, q: &QuerySpec) -> Vec<Vec<Cell>> {
    let nodes = graph.nodes();
    let rels = graph.relationships();
    let k = q.nodes.len();
    let mut bindings = Vec::new();
    let total = nodes.len().pow(k as u32);
    for code in 0..total {
        let mut tuple = Vec::with_capacity(k);
        let mut c = code;
        for _ in 0..k {
            tuple.push(c % nodes.len());
            c /= nodes.len();
        }
        let node_ok = tuple.iter().zip(&q.nodes).all(|(&i, p)| {
            let n = &nodes[i];
            p.labels.iter().all(|l| n.labels().contains(l))
                && p.name_eq.as_ref().is_none_or(|v| n.as_entity().is_some_and(|e| &e.name == v))
        });
        if !node_ok {
            continue;
        }
        let mut partial: Vec<Vec<usize>> = vec![Vec::new()];
        for (h, rp) in q.rels.iter().enumerate() {
            let (a, b) = (nodes[tuple[h]].id(), nodes[tuple[h + 1]].id());
            let fits: Vec<usize> = rels
                .iter()
                .enumerate()
                .filter(|(_, r)| rp.types.is_empty() || rp.types.contains(&r.rel_type))
                .filter(|(_, r)| {
                    let fwd = r.source == a && r.target == b;
                    let back = r.source == b && r.target == a;
                    match rp.dir {
                        Dir::Right => fwd,
                        Dir::Left => back,
                        Dir::Both => fwd || back,
                    }
                })
                .map(|(i, _)| i)
                .collect();
            partial = partial
                .into_iter()
                .flat_map(|p| {
                    fits.iter()
                        .filter(|r| !p.contains(r))
                        .map(|&r| {
                            let mut next = p.clone();
                            next.push(r);
                            next
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        for rs in partial {
            bindings.push(Binding { nodes: tuple.clone(), rels: rs });
        }
    }

    let lookup = |b: &Binding, var: &str, key: &str| -> Cell {
        if let Some(i) = q.nodes.iter().position(|n| n.var == var) {
            return scalar_cell(nodes[b.nodes[i]].property(key));
        }
        let i = q.rels.iter().position(|r| r.var == var).expect("bound variable");
        scalar_cell(rels[b.rels[i]].property(key))
    };
    let holds = |b: &Binding, p: &Pred| -> bool { eval(p, b, &lookup, q, graph) };
    let kept: Vec<Binding> = bindings.into_iter().filter(|b| q.filter.as_ref().is_none_or(|p| holds(b, p))).collect();

    match &q.ret {
        Ret::Elements => kept
            .iter()
            .map(|b| {
                let mut row = vec![Cell::Node(nodes[b.nodes[0]].id().into())];
                for h in 0..q.rels.len() {
                    row.push(Cell::Rel(rels[b.rels[h]].id.clone()));
                    row.push(Cell::Node(nodes[b.nodes[h + 1]].id().into()));
                }
                row
            })
            .collect(),
        Ret::Props(ps) => kept.iter().map(|b| ps.iter().map(|(v, k)| lookup(b, v, k)).collect()).collect(),
        Ret::Distinct(v, k) => {
            let mut out: Vec<Vec<Cell>> = Vec::new();
            for b in &kept {
                let row = vec![lookup(b, v, k)];
                if !out.contains(&row) {
                    out.push(row);
                }
            }
            out
        }
        Ret::CountBy(v, k) => {
            let mut groups: Vec<(Cell, i64)> = Vec::new();
            for b in &kept {
                let key = lookup(b, v, k);
                match groups.iter_mut().find(|(g, _)| *g == key) {
                    Some(g) => g.1 += 1,
                    None => groups.push((key, 1)),
                }
            }
            groups.into_iter().map(|(g, n)| vec![g, Cell::Int(n)]).collect()
        }
        Ret::CountStar => vec![vec![Cell::Int(kept.len() as i64)]],
        Ret::CountProp(v, k) => {
            vec![vec![Cell::Int(kept.iter().filter(|b| lookup(b, v, k) != Cell::Null).count() as i64)]]
        }
    }
}

fn eval(
    p: &Pred,
    b: &Binding,
    lookup: &dyn Fn(&Binding, &str, &str) -> Cell,
    q: &QuerySpec,
    g: &PropertyGraph,
) -> bool {
    match p {
        Pred::Not(a) => !eval(a, b, lookup, q, g),
        Pred::And(a, c) => eval(a, b, lookup, q, g) && eval(c, b, lookup, q, g),
        Pred::Or(a, c) => eval(a, b, lookup, q, g) || eval(c, b, lookup, q, g),
        Pred::Label { var, label } => {
            let i = q.nodes.iter().position(|n| &n.var == var).unwrap();
            g.nodes()[b.nodes[i]].labels().contains(label)
        }
        Pred::Cmp { var, key, op, lit } => {
            let left = lookup(b, var, key);
            let ord = match (&left, lit) {
                (Cell::Int(x), Lit::Int(y)) => x.cmp(y),
                (Cell::Text(x), Lit::Text(y)) => {
                    if *op == "STARTS WITH" {
                        return x.starts_with(y.as_str());
                    }
                    x.cmp(y)
                }
                _ => return false,
            };
            match *op {
                "=" => ord == Ordering::Equal,
                "<>" => ord != Ordering::Equal,
                "<" => ord == Ordering::Less,
                ">" => ord == Ordering::Greater,
                "<=" => ord != Ordering::Greater,
                ">=" => ord != Ordering::Less,
                // STARTS WITH on integers is a type mismatch.
                _ => false,
            }
        }
    }
}

/// Tally of incident relationships per neighbour, by scanning every edge.
pub fn neighbour_tally(graph: &PropertyGraph, id: &str) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for r in graph.relationships() {
        let other = if r.source == id {
            &r.target
        } else if r.target == id {
            &r.source
        } else {
            continue;
        };
        *out.entry(other.clone()).or_insert(0) += 1;
    }
    out
}
