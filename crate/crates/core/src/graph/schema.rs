use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::store::PropertyGraph;

/// Labels, relationship types and observed property keys, with counts.
/// All maps are ordered lexicographically.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSchema {
    /// A node counts once under each of its labels.
    pub node_labels: BTreeMap<String, usize>,
    pub relationship_types: BTreeMap<String, usize>,
    pub label_property_keys: BTreeMap<String, BTreeSet<String>>,
    pub type_property_keys: BTreeMap<String, BTreeSet<String>>,
}

impl GraphSchema {
    pub fn has_label(&self, label: &str) -> bool {
        self.node_labels.contains_key(label)
    }

    pub fn has_rel_type(&self, rel_type: &str) -> bool {
        self.relationship_types.contains_key(rel_type)
    }

    /// True when any label or relationship type carries `key`.
    pub fn has_property_key(&self, key: &str) -> bool {
        self.label_property_keys.values().chain(self.type_property_keys.values()).any(|keys| keys.contains(key))
    }

    pub fn is_empty(&self) -> bool {
        self.node_labels.is_empty() && self.relationship_types.is_empty()
    }
}

/// Node and relationship distributions plus element and property totals.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionReport {
    /// Each node counts once under each of its labels, so the values may sum
    /// past `total_nodes` when nodes carry several labels.
    pub nodes_by_label: BTreeMap<String, usize>,
    pub relationships_by_type: BTreeMap<String, usize>,
    pub total_nodes: usize,
    pub total_relationships: usize,
    /// See [`crate::graph::Node::property_count`] and
    /// [`crate::graph::Relationship::property_count`] for the convention.
    pub total_properties: usize,
}

impl PropertyGraph {
    pub fn schema(&self) -> GraphSchema {
        let mut schema = GraphSchema::default();
        for node in self.nodes() {
            for label in node.labels() {
                *schema.node_labels.entry(label.clone()).or_default() += 1;
                let keys = schema.label_property_keys.entry(label.clone()).or_default();
                keys.extend(node.property_keys().into_iter().map(str::to_string));
            }
        }
        for rel in self.relationships() {
            *schema.relationship_types.entry(rel.rel_type.clone()).or_default() += 1;
            let keys = schema.type_property_keys.entry(rel.rel_type.clone()).or_default();
            keys.extend(rel.property_keys().into_iter().map(str::to_string));
        }
        schema
    }

    pub fn stats(&self) -> DistributionReport {
        let schema = self.schema();
        let total_properties = self.nodes().iter().map(|n| n.property_count()).sum::<usize>()
            + self.relationships().iter().map(|r| r.property_count()).sum::<usize>();
        DistributionReport {
            nodes_by_label: schema.node_labels,
            relationships_by_type: schema.relationship_types,
            total_nodes: self.node_count(),
            total_relationships: self.relationship_count(),
            total_properties,
        }
    }
}
