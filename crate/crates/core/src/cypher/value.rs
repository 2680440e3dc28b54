use std::cmp::Ordering;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::ast::Literal;
use crate::graph::Scalar;

/// Runtime value. Nodes and relationships are graph positions, which follow
/// id order.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Value {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
    Node(usize),
    Rel(usize),
}

impl From<Option<Scalar>> for Value {
    fn from(s: Option<Scalar>) -> Self {
        match s {
            None => Value::Null,
            Some(Scalar::Bool(b)) => Value::Bool(b),
            Some(Scalar::Int(i)) => Value::Int(i),
            Some(Scalar::Float(x)) => Value::Float(x),
            Some(Scalar::Text(t)) => Value::Text(t),
        }
    }
}

impl From<&Literal> for Value {
    fn from(l: &Literal) -> Self {
        match l {
            Literal::Null => Value::Null,
            Literal::Bool(b) => Value::Bool(*b),
            Literal::Int(i) => Value::Int(*i),
            Literal::Float(x) => Value::Float(*x),
            Literal::Str(s) => Value::Text(s.clone()),
        }
    }
}

impl Value {
    fn rank(&self) -> u8 {
        match self {
            Value::Null => 0,
            Value::Bool(_) => 1,
            Value::Int(_) | Value::Float(_) => 2,
            Value::Text(_) => 3,
            Value::Node(_) => 4,
            Value::Rel(_) => 5,
        }
    }

    /// Total order used by ORDER BY, DISTINCT and grouping:
    /// null < boolean < number < text < node < relationship. Integers and
    /// floats compare numerically; an integer sorts before an equal float.
    pub(crate) fn total_cmp(&self, other: &Value) -> Ordering {
        match (self, other) {
            (Value::Bool(a), Value::Bool(b)) => a.cmp(b),
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Float(a), Value::Float(b)) => a.total_cmp(b),
            (Value::Int(a), Value::Float(b)) => {
                (*a as f64).partial_cmp(b).unwrap_or(Ordering::Equal).then(Ordering::Less)
            }
            (Value::Float(a), Value::Int(b)) => {
                a.partial_cmp(&(*b as f64)).unwrap_or(Ordering::Equal).then(Ordering::Greater)
            }
            (Value::Text(a), Value::Text(b)) => a.cmp(b),
            (Value::Node(a), Value::Node(b)) | (Value::Rel(a), Value::Rel(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }

    /// Two-valued comparison: null operands and mismatched types yield `None`,
    /// which every operator treats as false.
    pub(crate) fn compare(&self, other: &Value) -> Option<Ordering> {
        match (self, other) {
            (Value::Bool(a), Value::Bool(b)) => Some(a.cmp(b)),
            (Value::Int(a), Value::Int(b)) => Some(a.cmp(b)),
            (Value::Int(a), Value::Float(b)) => (*a as f64).partial_cmp(b),
            (Value::Float(a), Value::Int(b)) => a.partial_cmp(&(*b as f64)),
            (Value::Float(a), Value::Float(b)) => a.partial_cmp(b),
            (Value::Text(a), Value::Text(b)) => Some(a.cmp(b)),
            _ => None,
        }
    }

    /// Equality for `=`, `<>` and `IN`: like [`Value::compare`], plus node
    /// and relationship identity.
    pub(crate) fn equals(&self, other: &Value) -> Option<bool> {
        match (self, other) {
            (Value::Node(a), Value::Node(b)) | (Value::Rel(a), Value::Rel(b)) => Some(a == b),
            _ => self.compare(other).map(|o| o == Ordering::Equal),
        }
    }
}

/// A cell of a query result row.
#[derive(Debug, Clone, PartialEq)]
pub enum ResultValue {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
    Node(String),
    Relationship(String),
}

impl Serialize for ResultValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ResultValue::Null => s.serialize_none(),
            ResultValue::Bool(b) => s.serialize_bool(*b),
            ResultValue::Int(i) => s.serialize_i64(*i),
            ResultValue::Float(x) => s.serialize_f64(*x),
            ResultValue::Text(t) => s.serialize_str(t),
            ResultValue::Node(id) => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("node", id)?;
                m.end()
            }
            ResultValue::Relationship(id) => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("relationship", id)?;
                m.end()
            }
        }
    }
}

impl std::fmt::Display for ResultValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ResultValue::Null => f.write_str("null"),
            ResultValue::Bool(b) => write!(f, "{b}"),
            ResultValue::Int(i) => write!(f, "{i}"),
            ResultValue::Float(x) => write!(f, "{x:?}"),
            ResultValue::Text(t) => f.write_str(t),
            ResultValue::Node(id) => write!(f, "({id})"),
            ResultValue::Relationship(id) => write!(f, "[{id}]"),
        }
    }
}
