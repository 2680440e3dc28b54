use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use serde::Serialize;

use super::ast::*;
use super::error::CypherError;
use super::validate::{check_scope, resolve_sort_key, SortKey};
use super::value::{ResultValue, Value};
use crate::graph::{PropertyGraph, ResultSubgraph};
use crate::par::{self, Parallelism};

pub const DEFAULT_MAX_BINDINGS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecOptions {
    /// Cap on partial and complete pattern bindings explored by one query.
    pub max_bindings: usize,
    pub parallelism: Parallelism,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions { max_bindings: DEFAULT_MAX_BINDINGS, parallelism: Parallelism::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryResult {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<ResultValue>>,
    pub subgraph: ResultSubgraph,
}

pub fn execute(query: &Query, graph: &PropertyGraph) -> Result<QueryResult, CypherError> {
    execute_with(query, graph, &ExecOptions::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SlotKind {
    Node,
    Rel,
}

const UNBOUND: usize = usize::MAX;

struct NodeCheck {
    slot: usize,
    labels: Vec<String>,
    properties: Vec<(String, Value)>,
}

enum Step {
    Node(NodeCheck),
    Expand { from: usize, rel: usize, types: Vec<String>, direction: RelDirection, to: NodeCheck },
}

struct Plan<'q> {
    slots: Vec<SlotKind>,
    names: HashMap<&'q str, usize>,
    steps: Vec<Step>,
    rel_slots: Vec<usize>,
}

impl<'q> Plan<'q> {
    fn compile(query: &'q Query) -> Self {
        let mut plan = Plan { slots: Vec::new(), names: HashMap::new(), steps: Vec::new(), rel_slots: Vec::new() };
        for pattern in &query.patterns {
            let start = plan.node_check(&pattern.start);
            let mut prev = start.slot;
            plan.steps.push(Step::Node(start));
            for (rel, node) in &pattern.steps {
                let rel_slot = plan.slot(rel.variable.as_deref(), SlotKind::Rel);
                plan.rel_slots.push(rel_slot);
                let to = plan.node_check(node);
                let next = to.slot;
                plan.steps.push(Step::Expand {
                    from: prev,
                    rel: rel_slot,
                    types: rel.types.clone(),
                    direction: rel.direction,
                    to,
                });
                prev = next;
            }
        }
        plan
    }

    fn slot(&mut self, name: Option<&'q str>, kind: SlotKind) -> usize {
        if let Some(name) = name {
            if let Some(&s) = self.names.get(name) {
                return s;
            }
            self.names.insert(name, self.slots.len());
        }
        self.slots.push(kind);
        self.slots.len() - 1
    }

    fn node_check(&mut self, node: &'q NodePattern) -> NodeCheck {
        NodeCheck {
            slot: self.slot(node.variable.as_deref(), SlotKind::Node),
            labels: node.labels.clone(),
            properties: node.properties.iter().map(|(k, v)| (k.clone(), Value::from(v))).collect(),
        }
    }
}

struct Matcher<'a> {
    plan: &'a Plan<'a>,
    graph: &'a PropertyGraph,
    budget: &'a AtomicUsize,
    limit: usize,
}

impl Matcher<'_> {
    fn charge(&self) -> Result<(), CypherError> {
        let used = self.budget.fetch_add(1, AtomicOrdering::Relaxed) + 1;
        if used > self.limit {
            Err(CypherError::ResourceLimit { limit: self.limit })
        } else {
            Ok(())
        }
    }

    fn node_ok(&self, node: usize, check: &NodeCheck) -> bool {
        let node = &self.graph.nodes()[node];
        check.labels.iter().all(|l| node.has_label(l))
            && check.properties.iter().all(|(k, v)| Value::from(node.property(k)).equals(v) == Some(true))
    }

    fn search(&self, step: usize, binding: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) -> Result<(), CypherError> {
        let Some(current) = self.plan.steps.get(step) else {
            out.push(binding.clone());
            return Ok(());
        };
        match current {
            Step::Node(check) => {
                if binding[check.slot] != UNBOUND {
                    if self.node_ok(binding[check.slot], check) {
                        self.search(step + 1, binding, out)?;
                    }
                    return Ok(());
                }
                for node in 0..self.graph.node_count() {
                    if self.node_ok(node, check) {
                        self.charge()?;
                        binding[check.slot] = node;
                        self.search(step + 1, binding, out)?;
                    }
                }
                binding[check.slot] = UNBOUND;
            }
            Step::Expand { from, rel, types, direction, to } => {
                let from_node = binding[*from];
                let candidates: Vec<usize> = match direction {
                    RelDirection::Right => self.graph.outgoing(from_node).to_vec(),
                    RelDirection::Left => self.graph.incoming(from_node).to_vec(),
                    RelDirection::Undirected => {
                        let mut all: Vec<usize> = self
                            .graph
                            .outgoing(from_node)
                            .iter()
                            .chain(self.graph.incoming(from_node))
                            .copied()
                            .collect();
                        all.sort_unstable();
                        all.dedup();
                        all
                    }
                };
                for r in candidates {
                    let relationship = &self.graph.relationships()[r];
                    if !types.is_empty() && !types.contains(&relationship.rel_type) {
                        continue;
                    }
                    if self.plan.rel_slots.iter().any(|&s| s != *rel && binding[s] == r) {
                        continue;
                    }
                    if binding[*rel] != UNBOUND && binding[*rel] != r {
                        continue;
                    }
                    let (s, t) = self.graph.endpoints(r);
                    let other = match direction {
                        RelDirection::Right => t,
                        RelDirection::Left => s,
                        RelDirection::Undirected => {
                            if s == from_node {
                                t
                            } else {
                                s
                            }
                        }
                    };
                    let to_bound = binding[to.slot];
                    if to_bound != UNBOUND && to_bound != other {
                        continue;
                    }
                    if !self.node_ok(other, to) {
                        continue;
                    }
                    self.charge()?;
                    let rel_was = binding[*rel];
                    binding[*rel] = r;
                    binding[to.slot] = other;
                    self.search(step + 1, binding, out)?;
                    binding[*rel] = rel_was;
                    binding[to.slot] = to_bound;
                }
            }
        }
        Ok(())
    }
}

struct Row {
    values: Vec<Value>,
    /// Indices of the bindings that produced this row.
    contributors: Vec<usize>,
}

/// Values compared under [`Value::total_cmp`], for grouping and DISTINCT.
struct Key(Vec<Value>);

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_tuples(&self.0, &other.0)
    }
}

fn compare_tuples(a: &[Value], b: &[Value]) -> Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| *o != Ordering::Equal).unwrap_or(a.len().cmp(&b.len()))
}

struct Evaluator<'a> {
    plan: &'a Plan<'a>,
    graph: &'a PropertyGraph,
}

impl Evaluator<'_> {
    fn value(&self, expr: &ValueExpr, binding: &[usize]) -> Value {
        let slot = self.plan.names[expr.variable()];
        let pos = binding[slot];
        match (expr, self.plan.slots[slot]) {
            (ValueExpr::Variable(_), SlotKind::Node) => Value::Node(pos),
            (ValueExpr::Variable(_), SlotKind::Rel) => Value::Rel(pos),
            (ValueExpr::Property { key, .. }, SlotKind::Node) => self.graph.nodes()[pos].property(key).into(),
            (ValueExpr::Property { key, .. }, SlotKind::Rel) => self.graph.relationships()[pos].property(key).into(),
        }
    }

    fn operand(&self, op: &Operand, binding: &[usize]) -> Value {
        match op {
            Operand::Literal(l) => Value::from(l),
            Operand::Value(v) => self.value(v, binding),
        }
    }

    fn test(&self, expr: &Expr, binding: &[usize]) -> bool {
        match expr {
            Expr::Or(l, r) => self.test(l, binding) || self.test(r, binding),
            Expr::And(l, r) => self.test(l, binding) && self.test(r, binding),
            Expr::Not(inner) => !self.test(inner, binding),
            Expr::Compare { left, op, right } => {
                let l = self.operand(left, binding);
                let r = self.operand(right, binding);
                match op {
                    CompareOp::Eq => l.equals(&r) == Some(true),
                    CompareOp::Neq => l.equals(&r) == Some(false),
                    CompareOp::Lt => l.compare(&r) == Some(Ordering::Less),
                    CompareOp::Le => matches!(l.compare(&r), Some(Ordering::Less | Ordering::Equal)),
                    CompareOp::Gt => l.compare(&r) == Some(Ordering::Greater),
                    CompareOp::Ge => matches!(l.compare(&r), Some(Ordering::Greater | Ordering::Equal)),
                    CompareOp::Contains | CompareOp::StartsWith | CompareOp::EndsWith => match (&l, &r) {
                        (Value::Text(a), Value::Text(b)) => match op {
                            CompareOp::Contains => a.contains(b.as_str()),
                            CompareOp::StartsWith => a.starts_with(b.as_str()),
                            _ => a.ends_with(b.as_str()),
                        },
                        _ => false,
                    },
                }
            }
            Expr::In { operand, list } => {
                let v = self.operand(operand, binding);
                list.iter().any(|item| v.equals(&Value::from(item)) == Some(true))
            }
            Expr::HasLabels { variable, labels } => {
                let slot = self.plan.names[variable.as_str()];
                match self.plan.slots[slot] {
                    SlotKind::Node => {
                        let node = &self.graph.nodes()[binding[slot]];
                        labels.iter().all(|l| node.has_label(l))
                    }
                    SlotKind::Rel => false,
                }
            }
        }
    }

    fn count(&self, distinct: bool, argument: &Option<ValueExpr>, members: &[&[usize]]) -> Value {
        let Some(arg) = argument else {
            return Value::Int(members.len() as i64);
        };
        let values = members.iter().map(|b| self.value(arg, b)).filter(|v| *v != Value::Null);
        let n = if distinct {
            values.map(|v| Key(vec![v])).collect::<std::collections::BTreeSet<_>>().len()
        } else {
            values.count()
        };
        Value::Int(n as i64)
    }
}

pub fn execute_with(query: &Query, graph: &PropertyGraph, options: &ExecOptions) -> Result<QueryResult, CypherError> {
    let scope_errors = check_scope(query);
    if !scope_errors.is_empty() {
        return Err(CypherError::Invalid(scope_errors));
    }
    let plan = Plan::compile(query);
    let budget = AtomicUsize::new(0);
    let matcher = Matcher { plan: &plan, graph, budget: &budget, limit: options.max_bindings };

    let bindings: Vec<Vec<usize>> = match plan.steps.first() {
        None => vec![Vec::new()],
        Some(Step::Node(first)) => {
            let starts: Vec<usize> = (0..graph.node_count()).filter(|&n| matcher.node_ok(n, first)).collect();
            let parts = par::map(options.parallelism, &starts, |&start| {
                matcher.charge()?;
                let mut binding = vec![UNBOUND; plan.slots.len()];
                binding[first.slot] = start;
                let mut out = Vec::new();
                matcher.search(1, &mut binding, &mut out)?;
                Ok::<_, CypherError>(out)
            });
            let mut all = Vec::new();
            for part in parts {
                all.extend(part?);
            }
            all
        }
        Some(Step::Expand { .. }) => unreachable!("patterns start with a node"),
    };

    let eval = Evaluator { plan: &plan, graph };
    let bindings: Vec<Vec<usize>> = match &query.where_clause {
        Some(expr) => bindings.into_iter().filter(|b| eval.test(expr, b)).collect(),
        None => bindings,
    };

    let mut rows = project(query, &eval, &bindings);

    if query.distinct {
        let mut index: BTreeMap<Key, usize> = BTreeMap::new();
        let mut unique: Vec<Row> = Vec::new();
        for row in rows {
            match index.get(&Key(row.values.clone())) {
                Some(&i) => unique[i].contributors.extend(row.contributors),
                None => {
                    index.insert(Key(row.values.clone()), unique.len());
                    unique.push(row);
                }
            }
        }
        rows = unique;
    }

    if !query.order_by.is_empty() {
        let keyed: Vec<(Vec<Value>, Row)> = rows
            .into_iter()
            .map(|row| {
                let keys = query
                    .order_by
                    .iter()
                    .map(|sort| match resolve_sort_key(query, &sort.projection) {
                        SortKey::Column(i) => row.values[i].clone(),
                        SortKey::Expression => match &sort.projection {
                            Projection::Value(v) => eval.value(v, &bindings[row.contributors[0]]),
                            Projection::Count { .. } => unreachable!("rejected by scope check"),
                        },
                    })
                    .collect();
                (keys, row)
            })
            .collect();
        let mut keyed = keyed;
        keyed.sort_by(|(ka, ra), (kb, rb)| {
            for (i, sort) in query.order_by.iter().enumerate() {
                let o = ka[i].total_cmp(&kb[i]);
                let o = if sort.descending { o.reverse() } else { o };
                if o != Ordering::Equal {
                    return o;
                }
            }
            compare_tuples(&ra.values, &rb.values).then_with(|| {
                let first = |r: &Row| r.contributors.first().map(|&c| bindings[c].clone());
                first(ra).cmp(&first(rb))
            })
        });
        rows = keyed.into_iter().map(|(_, r)| r).collect();
    }

    let skip = query.skip.map_or(0, |s| s as usize);
    let rows: Vec<Row> = rows.into_iter().skip(skip).take(query.limit.map_or(usize::MAX, |l| l as usize)).collect();

    let mut node_pos = Vec::new();
    let mut rel_pos = Vec::new();
    for row in &rows {
        for &c in &row.contributors {
            for (slot, &pos) in bindings[c].iter().enumerate() {
                match plan.slots[slot] {
                    SlotKind::Node => node_pos.push(pos),
                    SlotKind::Rel => rel_pos.push(pos),
                }
            }
        }
    }
    let subgraph = ResultSubgraph::from_positions(graph, node_pos, rel_pos);

    Ok(QueryResult {
        columns: query.column_names(),
        rows: rows.into_iter().map(|r| r.values.into_iter().map(|v| to_result(graph, v)).collect()).collect(),
        subgraph,
    })
}

fn project(query: &Query, eval: &Evaluator<'_>, bindings: &[Vec<usize>]) -> Vec<Row> {
    if !query.is_aggregating() {
        return bindings
            .iter()
            .enumerate()
            .map(|(i, b)| Row {
                values: query
                    .return_items
                    .iter()
                    .map(|item| match &item.projection {
                        Projection::Value(v) => eval.value(v, b),
                        Projection::Count { .. } => unreachable!(),
                    })
                    .collect(),
                contributors: vec![i],
            })
            .collect();
    }

    let group_values = |b: &[usize]| -> Vec<Value> {
        query
            .return_items
            .iter()
            .filter_map(|item| match &item.projection {
                Projection::Value(v) => Some(eval.value(v, b)),
                Projection::Count { .. } => None,
            })
            .collect()
    };
    let mut index: BTreeMap<Key, usize> = BTreeMap::new();
    let mut groups: Vec<(Vec<Value>, Vec<usize>)> = Vec::new();
    for (i, b) in bindings.iter().enumerate() {
        let key = group_values(b);
        match index.get(&Key(key.clone())) {
            Some(&g) => groups[g].1.push(i),
            None => {
                index.insert(Key(key.clone()), groups.len());
                groups.push((key, vec![i]));
            }
        }
    }
    let has_keys = query.return_items.iter().any(|i| !i.projection.is_aggregate());
    if groups.is_empty() && !has_keys {
        groups.push((Vec::new(), Vec::new()));
    }
    groups
        .into_iter()
        .map(|(key, members)| {
            let member_bindings: Vec<&[usize]> = members.iter().map(|&m| bindings[m].as_slice()).collect();
            let mut key_iter = key.into_iter();
            let values = query
                .return_items
                .iter()
                .map(|item| match &item.projection {
                    Projection::Value(_) => key_iter.next().expect("group key per plain item"),
                    Projection::Count { distinct, argument } => eval.count(*distinct, argument, &member_bindings),
                })
                .collect();
            Row { values, contributors: members }
        })
        .collect()
}

fn to_result(graph: &PropertyGraph, value: Value) -> ResultValue {
    match value {
        Value::Null => ResultValue::Null,
        Value::Bool(b) => ResultValue::Bool(b),
        Value::Int(i) => ResultValue::Int(i),
        Value::Float(x) => ResultValue::Float(x),
        Value::Text(t) => ResultValue::Text(t),
        Value::Node(n) => ResultValue::Node(graph.nodes()[n].id().to_string()),
        Value::Rel(r) => ResultValue::Relationship(graph.relationships()[r].id.clone()),
    }
}
