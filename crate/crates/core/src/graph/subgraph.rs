use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::id::compare_ids;
use super::model::{Node, Properties, Relationship};
use super::store::PropertyGraph;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: String,
    pub labels: Vec<String>,
    pub name: String,
    pub properties: Properties,
}

impl From<&Node> for NodeRecord {
    fn from(node: &Node) -> Self {
        let properties = match node {
            Node::Entity(e) => e.properties.clone(),
            Node::Paragraph(p) => {
                let mut props = p.metadata.clone();
                props.insert("text".into(), p.text.clone().into());
                props
            }
        };
        NodeRecord {
            id: node.id().to_string(),
            labels: node.labels().to_vec(),
            name: node.name().to_string(),
            properties,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationshipRecord {
    pub id: String,
    #[serde(rename = "type")]
    pub rel_type: String,
    pub category: String,
    pub source: String,
    pub target: String,
    pub sentence: String,
    pub paragraph_id: Option<String>,
}

impl From<&Relationship> for RelationshipRecord {
    fn from(rel: &Relationship) -> Self {
        RelationshipRecord {
            id: rel.id.clone(),
            rel_type: rel.rel_type.clone(),
            category: rel.category.clone(),
            source: rel.source.clone(),
            target: rel.target.clone(),
            sentence: rel.sentence.clone(),
            paragraph_id: rel.paragraph_id.clone(),
        }
    }
}

/// Nodes and relationships of a query answer. Every relationship's
/// endpoints are present in `nodes`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultSubgraph {
    pub nodes: Vec<NodeRecord>,
    pub relationships: Vec<RelationshipRecord>,
    #[serde(default)]
    pub truncated: bool,
}

impl ResultSubgraph {
    /// Builds a closed subgraph from node and relationship positions; the
    /// endpoints of every relationship are pulled in.
    pub fn from_positions(
        graph: &PropertyGraph,
        nodes: impl IntoIterator<Item = usize>,
        relationships: impl IntoIterator<Item = usize>,
    ) -> Self {
        let mut node_set: BTreeSet<usize> = nodes.into_iter().collect();
        let rel_set: BTreeSet<usize> = relationships.into_iter().collect();
        for &r in &rel_set {
            let (s, t) = graph.endpoints(r);
            node_set.insert(s);
            node_set.insert(t);
        }
        ResultSubgraph {
            nodes: node_set.into_iter().map(|i| NodeRecord::from(&graph.nodes()[i])).collect(),
            relationships: rel_set.into_iter().map(|i| RelationshipRecord::from(&graph.relationships()[i])).collect(),
            truncated: false,
        }
    }

    pub fn is_closed(&self) -> bool {
        let ids: BTreeSet<&str> = self.nodes.iter().map(|n| n.id.as_str()).collect();
        self.relationships.iter().all(|r| ids.contains(r.source.as_str()) && ids.contains(r.target.as_str()))
    }

    /// Keeps the first `max_nodes` nodes (id order) and only relationships
    /// between kept nodes; sets `truncated` when anything was dropped.
    pub fn cap_nodes(&mut self, max_nodes: usize) {
        if self.nodes.len() <= max_nodes {
            return;
        }
        self.nodes.sort_by(|a, b| compare_ids(&a.id, &b.id));
        self.nodes.truncate(max_nodes);
        let kept: BTreeSet<String> = self.nodes.iter().map(|n| n.id.clone()).collect();
        self.relationships.retain(|r| kept.contains(&r.source) && kept.contains(&r.target));
        self.truncated = true;
    }
}
