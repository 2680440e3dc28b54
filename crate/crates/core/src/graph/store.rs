use std::collections::{BTreeSet, HashMap, HashSet};

use sha2::{Digest, Sha256};

use super::id::compare_ids;
use super::model::{EntityNode, Node, ParagraphNode, Properties, Relationship, PARAGRAPH_LABEL};
use super::GraphError;

/// Description of a node to add during ingest. `id: None` auto-assigns `n{counter}`.
#[derive(Debug, Clone)]
pub enum NodeSpec {
    Entity { id: Option<String>, name: String, labels: Vec<String>, properties: Properties },
    Paragraph { id: Option<String>, text: String, metadata: Properties },
}

impl NodeSpec {
    pub fn entity(name: impl Into<String>, labels: &[&str]) -> Self {
        NodeSpec::Entity {
            id: None,
            name: name.into(),
            labels: labels.iter().map(|l| l.to_string()).collect(),
            properties: Properties::new(),
        }
    }

    pub fn paragraph(text: impl Into<String>) -> Self {
        NodeSpec::Paragraph { id: None, text: text.into(), metadata: Properties::new() }
    }

    pub fn with_id(mut self, new_id: impl Into<String>) -> Self {
        match &mut self {
            NodeSpec::Entity { id, .. } | NodeSpec::Paragraph { id, .. } => *id = Some(new_id.into()),
        }
        self
    }

    pub fn with_property(mut self, key: impl Into<String>, value: impl Into<super::Scalar>) -> Self {
        match &mut self {
            NodeSpec::Entity { properties, .. } => properties.insert(key.into(), value.into()),
            NodeSpec::Paragraph { metadata, .. } => metadata.insert(key.into(), value.into()),
        };
        self
    }
}

/// Description of a relationship to add during ingest. `id: None` auto-assigns `r{counter}`.
#[derive(Debug, Clone)]
pub struct RelationshipSpec {
    pub id: Option<String>,
    pub source: String,
    pub target: String,
    pub rel_type: String,
    pub category: String,
    pub sentence: String,
    pub paragraph_id: Option<String>,
    pub properties: Properties,
}

impl RelationshipSpec {
    pub fn new(source: impl Into<String>, target: impl Into<String>, rel_type: impl Into<String>) -> Self {
        RelationshipSpec {
            id: None,
            source: source.into(),
            target: target.into(),
            rel_type: rel_type.into(),
            category: String::new(),
            sentence: String::new(),
            paragraph_id: None,
            properties: Properties::new(),
        }
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = Some(id.into());
        self
    }

    pub fn category(mut self, category: impl Into<String>) -> Self {
        self.category = category.into();
        self
    }

    pub fn sentence(mut self, sentence: impl Into<String>) -> Self {
        self.sentence = sentence.into();
        self
    }

    pub fn paragraph(mut self, paragraph_id: impl Into<String>) -> Self {
        self.paragraph_id = Some(paragraph_id.into());
        self
    }

    pub fn with_property(mut self, key: impl Into<String>, value: impl Into<super::Scalar>) -> Self {
        self.properties.insert(key.into(), value.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Outgoing,
    Incoming,
    Both,
}

/// Write-exclusive ingest phase. [`GraphBuilder::finalize`] freezes it into
/// a [`PropertyGraph`].
#[derive(Debug, Default)]
pub struct GraphBuilder {
    nodes: Vec<Node>,
    relationships: Vec<Relationship>,
    node_ids: HashMap<String, usize>,
    paragraph_ids: HashSet<String>,
    rel_ids: HashSet<String>,
    next_node: u64,
    next_rel: u64,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn id_taken(&self, id: &str) -> bool {
        self.node_ids.contains_key(id) || self.rel_ids.contains(id)
    }

    fn fresh_id(&mut self, prefix: char, node: bool) -> String {
        loop {
            let counter = if node { &mut self.next_node } else { &mut self.next_rel };
            *counter += 1;
            let candidate = format!("{prefix}{}", *counter);
            if !self.id_taken(&candidate) {
                return candidate;
            }
        }
    }

    fn claim_id(&mut self, id: Option<String>, prefix: char, node: bool) -> Result<String, GraphError> {
        match id {
            Some(id) => {
                if id.is_empty() {
                    return Err(GraphError::InvariantViolation("element id must not be empty".into()));
                }
                if self.id_taken(&id) {
                    return Err(GraphError::DuplicateId(id));
                }
                Ok(id)
            }
            None => Ok(self.fresh_id(prefix, node)),
        }
    }

    pub fn add_node(&mut self, spec: NodeSpec) -> Result<String, GraphError> {
        let node = match spec {
            NodeSpec::Entity { id, name, labels, properties } => {
                if name.trim().is_empty() {
                    return Err(GraphError::InvariantViolation("entity name must not be empty".into()));
                }
                let mut seen = HashSet::new();
                let labels: Vec<String> = labels.into_iter().filter(|l| seen.insert(l.clone())).collect();
                if labels.is_empty() {
                    return Err(GraphError::InvariantViolation(format!("entity {name:?} has no labels")));
                }
                if let Some(bad) = labels.iter().find(|l| l.is_empty() || *l == PARAGRAPH_LABEL) {
                    return Err(GraphError::InvariantViolation(format!("invalid entity label {bad:?}")));
                }
                check_keys(&properties, &["name"])?;
                let id = self.claim_id(id, 'n', true)?;
                Node::Entity(EntityNode { id, name, labels, properties })
            }
            NodeSpec::Paragraph { id, text, metadata } => {
                if text.trim().is_empty() {
                    return Err(GraphError::InvariantViolation("paragraph text must not be empty".into()));
                }
                check_keys(&metadata, &["text"])?;
                let id = self.claim_id(id, 'n', true)?;
                self.paragraph_ids.insert(id.clone());
                Node::Paragraph(ParagraphNode { id, text, metadata })
            }
        };
        let id = node.id().to_string();
        self.node_ids.insert(id.clone(), self.nodes.len());
        self.nodes.push(node);
        Ok(id)
    }

    pub fn add_relationship(&mut self, spec: RelationshipSpec) -> Result<String, GraphError> {
        if spec.rel_type.is_empty() {
            return Err(GraphError::InvariantViolation("relationship type must not be empty".into()));
        }
        for endpoint in [&spec.source, &spec.target] {
            if !self.node_ids.contains_key(endpoint) {
                return Err(GraphError::UnknownEndpoint(endpoint.clone()));
            }
        }
        if let Some(pid) = &spec.paragraph_id {
            if !self.paragraph_ids.contains(pid) {
                return Err(GraphError::UnknownParagraph(pid.clone()));
            }
        }
        check_keys(&spec.properties, &["category", "sentence", "paragraph_id"])?;
        let id = self.claim_id(spec.id, 'r', false)?;
        self.rel_ids.insert(id.clone());
        self.relationships.push(Relationship {
            id: id.clone(),
            source: spec.source,
            target: spec.target,
            rel_type: spec.rel_type,
            category: spec.category,
            sentence: spec.sentence,
            paragraph_id: spec.paragraph_id,
            properties: spec.properties,
        });
        Ok(id)
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.node_ids.get(id).map(|&i| &self.nodes[i])
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn relationship_count(&self) -> usize {
        self.relationships.len()
    }

    /// Mutable access to an already-added entity, for ingest passes that
    /// attach provenance after the fact.
    pub fn entity_properties_mut(&mut self, id: &str) -> Option<&mut Properties> {
        let idx = *self.node_ids.get(id)?;
        match &mut self.nodes[idx] {
            Node::Entity(e) => Some(&mut e.properties),
            Node::Paragraph(_) => None,
        }
    }

    pub fn paragraph_mut(&mut self, id: &str) -> Option<&mut ParagraphNode> {
        let idx = *self.node_ids.get(id)?;
        match &mut self.nodes[idx] {
            Node::Paragraph(p) => Some(p),
            Node::Entity(_) => None,
        }
    }

    pub fn finalize(self) -> PropertyGraph {
        PropertyGraph::from_parts(self.nodes, self.relationships)
    }
}

fn check_keys(props: &Properties, reserved: &[&str]) -> Result<(), GraphError> {
    for key in props.keys() {
        if key.is_empty() {
            return Err(GraphError::InvariantViolation("property key must not be empty".into()));
        }
        if reserved.contains(&key.as_str()) {
            return Err(GraphError::InvariantViolation(format!("property key {key:?} is reserved")));
        }
    }
    Ok(())
}

/// Immutable property graph. Nodes and relationships are held in id order
/// (see [`compare_ids`]); every listing operation follows that order.
#[derive(Debug, Clone, Default)]
pub struct PropertyGraph {
    nodes: Vec<Node>,
    relationships: Vec<Relationship>,
    node_index: HashMap<String, usize>,
    rel_index: HashMap<String, usize>,
    endpoints: Vec<(usize, usize)>,
    outgoing: Vec<Vec<usize>>,
    incoming: Vec<Vec<usize>>,
}

/// One hop from a node: the traversed relationship and the node on the other end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor<'g> {
    pub relationship: &'g Relationship,
    pub node: &'g Node,
}

impl PropertyGraph {
    pub fn empty() -> Self {
        Self::default()
    }

    fn from_parts(mut nodes: Vec<Node>, mut relationships: Vec<Relationship>) -> Self {
        nodes.sort_by(|a, b| compare_ids(a.id(), b.id()));
        relationships.sort_by(|a, b| compare_ids(&a.id, &b.id));
        let node_index: HashMap<String, usize> =
            nodes.iter().enumerate().map(|(i, n)| (n.id().to_string(), i)).collect();
        let rel_index = relationships.iter().enumerate().map(|(i, r)| (r.id.clone(), i)).collect();
        let mut outgoing = vec![Vec::new(); nodes.len()];
        let mut incoming = vec![Vec::new(); nodes.len()];
        let mut endpoints = Vec::with_capacity(relationships.len());
        for (ri, rel) in relationships.iter().enumerate() {
            // the builder only admits relationships whose endpoints exist
            let s = node_index[&rel.source];
            let t = node_index[&rel.target];
            outgoing[s].push(ri);
            incoming[t].push(ri);
            endpoints.push((s, t));
        }
        PropertyGraph { nodes, relationships, node_index, rel_index, endpoints, outgoing, incoming }
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn relationship_count(&self) -> usize {
        self.relationships.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn relationships(&self) -> &[Relationship] {
        &self.relationships
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.node_index.get(id).map(|&i| &self.nodes[i])
    }

    pub fn relationship(&self, id: &str) -> Option<&Relationship> {
        self.rel_index.get(id).map(|&i| &self.relationships[i])
    }

    pub fn node_position(&self, id: &str) -> Option<usize> {
        self.node_index.get(id).copied()
    }

    pub fn relationship_position(&self, id: &str) -> Option<usize> {
        self.rel_index.get(id).copied()
    }

    /// `(source, target)` node positions of the relationship at `rel`.
    pub fn endpoints(&self, rel: usize) -> (usize, usize) {
        self.endpoints[rel]
    }

    /// Relationship positions leaving the node at `node`, ascending.
    pub fn outgoing(&self, node: usize) -> &[usize] {
        &self.outgoing[node]
    }

    /// Relationship positions entering the node at `node`, ascending.
    pub fn incoming(&self, node: usize) -> &[usize] {
        &self.incoming[node]
    }

    pub fn entities(&self) -> impl Iterator<Item = &EntityNode> {
        self.nodes.iter().filter_map(Node::as_entity)
    }

    pub fn paragraphs(&self) -> impl Iterator<Item = &ParagraphNode> {
        self.nodes.iter().filter_map(Node::as_paragraph)
    }

    /// Relationships touching `node_id` with the node on the far side, in
    /// relationship id order. `Both` is the union of the two directions,
    /// with each relationship listed once (self-loops included).
    pub fn neighbors(
        &self,
        node_id: &str,
        direction: Direction,
        type_filter: Option<&BTreeSet<String>>,
    ) -> Result<Vec<Neighbor<'_>>, GraphError> {
        let pos = self.node_position(node_id).ok_or_else(|| GraphError::UnknownNode(node_id.to_string()))?;
        let mut rels: Vec<usize> = match direction {
            Direction::Outgoing => self.outgoing[pos].clone(),
            Direction::Incoming => self.incoming[pos].clone(),
            Direction::Both => {
                let mut all: Vec<usize> = self.outgoing[pos].iter().chain(&self.incoming[pos]).copied().collect();
                all.sort_unstable();
                all.dedup();
                all
            }
        };
        if let Some(types) = type_filter {
            rels.retain(|&r| types.contains(&self.relationships[r].rel_type));
        }
        Ok(rels
            .into_iter()
            .map(|r| {
                let (s, t) = self.endpoints[r];
                let other = if s == pos { t } else { s };
                Neighbor { relationship: &self.relationships[r], node: &self.nodes[other] }
            })
            .collect())
    }

    /// Full scan confirming every relationship endpoint and paragraph anchor resolves.
    pub fn check_closure(&self) -> Result<(), GraphError> {
        for rel in &self.relationships {
            for endpoint in [&rel.source, &rel.target] {
                if self.node(endpoint).is_none() {
                    return Err(GraphError::UnknownEndpoint(endpoint.clone()));
                }
            }
            if let Some(pid) = &rel.paragraph_id {
                if !matches!(self.node(pid), Some(Node::Paragraph(_))) {
                    return Err(GraphError::UnknownParagraph(pid.clone()));
                }
            }
        }
        Ok(())
    }

    /// SHA-256 over a canonical rendering of every element, hex encoded.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        for node in &self.nodes {
            hasher.update(format!("{node:?}\n").as_bytes());
        }
        for rel in &self.relationships {
            hasher.update(format!("{rel:?}\n").as_bytes());
        }
        hex::encode(hasher.finalize())
    }
}
