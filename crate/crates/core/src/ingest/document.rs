use std::io::Read;

use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::graph::{GraphBuilder, GraphError, Node, NodeSpec, Properties, PropertyGraph, RelationshipSpec};

/// Interchange form of a whole graph. Field layout is described by
/// `schemas/graph-document.schema.json`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub nodes: Vec<NodeDocument>,
    pub relationships: Vec<RelationshipDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum NodeDocument {
    Entity {
        id: String,
        name: String,
        labels: Vec<String>,
        #[serde(default, skip_serializing_if = "Properties::is_empty")]
        properties: Properties,
    },
    Paragraph {
        id: String,
        text: String,
        #[serde(default, skip_serializing_if = "Properties::is_empty")]
        metadata: Properties,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationshipDocument {
    pub id: String,
    pub source: String,
    pub target: String,
    #[serde(rename = "type")]
    pub rel_type: String,
    pub category: String,
    pub sentence: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paragraph_id: Option<String>,
    #[serde(default, skip_serializing_if = "Properties::is_empty")]
    pub properties: Properties,
}

impl GraphDocument {
    pub fn from_json_str(text: &str) -> Result<Self, IngestError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de)
            .map_err(|e| IngestError::SchemaViolation { path: e.path().to_string(), message: e.inner().to_string() })
    }

    pub fn from_reader(mut reader: impl Read) -> Result<Self, IngestError> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        Self::from_json_str(&text)
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json_string(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("documents always serialize");
        out.push('\n');
        out
    }
}

fn ingest_error(e: GraphError) -> IngestError {
    match e {
        GraphError::DuplicateId(id) => IngestError::DuplicateId(id),
        GraphError::UnknownEndpoint(id) | GraphError::UnknownParagraph(id) | GraphError::UnknownNode(id) => {
            IngestError::DanglingReference(id)
        }
        GraphError::InvariantViolation(msg) => IngestError::InvariantViolation(msg),
    }
}

/// Builds a finalized graph from a document.
pub fn load_graph(doc: &GraphDocument) -> Result<PropertyGraph, IngestError> {
    let mut builder = GraphBuilder::new();
    for node in &doc.nodes {
        let spec = match node {
            NodeDocument::Entity { id, name, labels, properties } => NodeSpec::Entity {
                id: Some(id.clone()),
                name: name.clone(),
                labels: labels.clone(),
                properties: properties.clone(),
            },
            NodeDocument::Paragraph { id, text, metadata } => {
                NodeSpec::Paragraph { id: Some(id.clone()), text: text.clone(), metadata: metadata.clone() }
            }
        };
        builder.add_node(spec).map_err(ingest_error)?;
    }
    for rel in &doc.relationships {
        // a relationship may point at a paragraph id that is a node of the wrong kind
        if let Some(pid) = &rel.paragraph_id {
            if !matches!(builder.node(pid), Some(Node::Paragraph(_))) {
                return Err(IngestError::DanglingReference(pid.clone()));
            }
        }
        let mut spec = RelationshipSpec::new(&rel.source, &rel.target, &rel.rel_type)
            .with_id(&rel.id)
            .category(&rel.category)
            .sentence(&rel.sentence);
        if let Some(pid) = &rel.paragraph_id {
            spec = spec.paragraph(pid);
        }
        for (k, v) in &rel.properties {
            spec = spec.with_property(k, v.clone());
        }
        builder.add_relationship(spec).map_err(ingest_error)?;
    }
    Ok(builder.finalize())
}

/// Parses and loads a JSON graph document.
pub fn load_graph_json(text: &str) -> Result<PropertyGraph, IngestError> {
    load_graph(&GraphDocument::from_json_str(text)?)
}

pub fn export_graph(graph: &PropertyGraph) -> GraphDocument {
    let nodes = graph
        .nodes()
        .iter()
        .map(|node| match node {
            Node::Entity(e) => NodeDocument::Entity {
                id: e.id.clone(),
                name: e.name.clone(),
                labels: e.labels.clone(),
                properties: e.properties.clone(),
            },
            Node::Paragraph(p) => {
                NodeDocument::Paragraph { id: p.id.clone(), text: p.text.clone(), metadata: p.metadata.clone() }
            }
        })
        .collect();
    let relationships = graph
        .relationships()
        .iter()
        .map(|r| RelationshipDocument {
            id: r.id.clone(),
            source: r.source.clone(),
            target: r.target.clone(),
            rel_type: r.rel_type.clone(),
            category: r.category.clone(),
            sentence: r.sentence.clone(),
            paragraph_id: r.paragraph_id.clone(),
            properties: r.properties.clone(),
        })
        .collect();
    GraphDocument { nodes, relationships }
}

pub fn export_graph_json(graph: &PropertyGraph) -> String {
    export_graph(graph).to_json_string()
}
