use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A property value. Properties never nest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Bool(b) => write!(f, "{b}"),
            Scalar::Int(i) => write!(f, "{i}"),
            Scalar::Float(x) => write!(f, "{x:?}"),
            Scalar::Text(s) => f.write_str(s),
        }
    }
}

impl From<&str> for Scalar {
    fn from(s: &str) -> Self {
        Scalar::Text(s.to_string())
    }
}

impl From<String> for Scalar {
    fn from(s: String) -> Self {
        Scalar::Text(s)
    }
}

impl From<i64> for Scalar {
    fn from(i: i64) -> Self {
        Scalar::Int(i)
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Float(x)
    }
}

impl From<bool> for Scalar {
    fn from(b: bool) -> Self {
        Scalar::Bool(b)
    }
}

pub type Properties = BTreeMap<String, Scalar>;

/// Label carried implicitly by every paragraph node.
pub const PARAGRAPH_LABEL: &str = "Paragraph";

/// Entity property pointing at the paragraph an entity was extracted from.
pub const SOURCE_PARAGRAPH_KEY: &str = "source_paragraph";

#[derive(Debug, Clone, PartialEq)]
pub struct EntityNode {
    pub id: String,
    pub name: String,
    pub labels: Vec<String>,
    pub properties: Properties,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParagraphNode {
    pub id: String,
    pub text: String,
    /// Paragraph id, paragraph type, archival source, folio/page. Any subset may be absent.
    pub metadata: Properties,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Entity(EntityNode),
    Paragraph(ParagraphNode),
}

impl Node {
    pub fn id(&self) -> &str {
        match self {
            Node::Entity(e) => &e.id,
            Node::Paragraph(p) => &p.id,
        }
    }

    /// Display name: the entity name, or the paragraph id for paragraphs.
    pub fn name(&self) -> &str {
        match self {
            Node::Entity(e) => &e.name,
            Node::Paragraph(p) => &p.id,
        }
    }

    pub fn labels(&self) -> &[String] {
        static PARAGRAPH: std::sync::OnceLock<Vec<String>> = std::sync::OnceLock::new();
        match self {
            Node::Entity(e) => &e.labels,
            Node::Paragraph(_) => PARAGRAPH.get_or_init(|| vec![PARAGRAPH_LABEL.to_string()]),
        }
    }

    pub fn has_label(&self, label: &str) -> bool {
        self.labels().iter().any(|l| l == label)
    }

    pub fn as_entity(&self) -> Option<&EntityNode> {
        match self {
            Node::Entity(e) => Some(e),
            Node::Paragraph(_) => None,
        }
    }

    pub fn as_paragraph(&self) -> Option<&ParagraphNode> {
        match self {
            Node::Paragraph(p) => Some(p),
            Node::Entity(_) => None,
        }
    }

    /// Property lookup as seen by queries. `name` on entities and `text` on
    /// paragraphs resolve to the dedicated fields.
    pub fn property(&self, key: &str) -> Option<Scalar> {
        match self {
            Node::Entity(e) if key == "name" => Some(Scalar::Text(e.name.clone())),
            Node::Entity(e) => e.properties.get(key).cloned(),
            Node::Paragraph(p) if key == "text" => Some(Scalar::Text(p.text.clone())),
            Node::Paragraph(p) => p.metadata.get(key).cloned(),
        }
    }

    /// Keys answerable by [`Node::property`].
    pub fn property_keys(&self) -> Vec<&str> {
        match self {
            Node::Entity(e) => std::iter::once("name").chain(e.properties.keys().map(String::as_str)).collect(),
            Node::Paragraph(p) => std::iter::once("text").chain(p.metadata.keys().map(String::as_str)).collect(),
        }
    }

    /// Number of property entries under the fixed counting convention:
    /// entity name and label set count one each, paragraph text counts one,
    /// plus one per property or metadata entry.
    pub fn property_count(&self) -> usize {
        match self {
            Node::Entity(e) => 2 + e.properties.len(),
            Node::Paragraph(p) => 1 + p.metadata.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Relationship {
    pub id: String,
    pub source: String,
    pub target: String,
    pub rel_type: String,
    pub category: String,
    pub sentence: String,
    pub paragraph_id: Option<String>,
    pub properties: Properties,
}

impl Relationship {
    /// Property lookup as seen by queries; `category`, `sentence` and
    /// `paragraph_id` resolve to the dedicated fields.
    pub fn property(&self, key: &str) -> Option<Scalar> {
        match key {
            "category" => Some(Scalar::Text(self.category.clone())),
            "sentence" => Some(Scalar::Text(self.sentence.clone())),
            "paragraph_id" => self.paragraph_id.clone().map(Scalar::Text),
            _ => self.properties.get(key).cloned(),
        }
    }

    pub fn property_keys(&self) -> Vec<&str> {
        let mut keys = vec!["category", "sentence"];
        if self.paragraph_id.is_some() {
            keys.push("paragraph_id");
        }
        keys.extend(self.properties.keys().map(String::as_str));
        keys
    }

    /// Type, category and sentence count one entry each, plus one per property.
    pub fn property_count(&self) -> usize {
        3 + self.properties.len()
    }
}
