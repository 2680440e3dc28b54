//! Entity linking: maps surface mentions from a question onto canonical
//! graph nodes using normalization plus trigram Dice similarity.
//!
//! Every entity is indexed under its normalized name and, when it differs,
//! the same form with leading honorifics removed. Paragraph-id mentions are
//! only ever resolved by exact id match.

mod text;

use std::cmp::Ordering;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

pub use text::{dice, normalize, similarity, strip_honorifics, trigrams};

use crate::graph::{compare_ids, PropertyGraph, Scalar};
use crate::par::{self, Parallelism};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinkerConfig {
    pub threshold: f64,
    pub k: usize,
    /// Top-two score gap below which a resolution is flagged ambiguous.
    pub ambiguity_gap: f64,
    pub honorifics: Vec<String>,
}

impl Default for LinkerConfig {
    fn default() -> Self {
        LinkerConfig {
            threshold: 0.55,
            k: 5,
            ambiguity_gap: 0.05,
            honorifics: ["fray", "don", "doña", "fr."].iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchedVia {
    Exact,
    NormalizedExact,
    Fuzzy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkCandidate {
    pub node_id: String,
    pub canonical_name: String,
    pub score: f64,
    pub matched_via: MatchedVia,
}

#[derive(Debug, Clone)]
pub struct IndexEntry {
    pub name: String,
    pub node_id: String,
    pub labels: Vec<String>,
    /// Normalized name first, then the honorific-stripped form if distinct.
    pub forms: Vec<String>,
    grams: Vec<Vec<[char; 3]>>,
}

#[derive(Debug, Clone)]
struct ParagraphEntry {
    node_id: String,
    /// Paragraph id carried in metadata, when present.
    alias: Option<String>,
}

#[derive(Debug, Clone)]
pub struct LinkIndex {
    entries: Vec<IndexEntry>,
    paragraphs: Vec<ParagraphEntry>,
    parallelism: Parallelism,
}

/// Kind of a mention as reported by entity extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MentionKind {
    Person,
    Organisation,
    Location,
    ParagraphId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mention {
    pub text: String,
    pub kind: MentionKind,
}

impl Mention {
    pub fn new(text: impl Into<String>, kind: MentionKind) -> Self {
        Mention { text: text.into(), kind }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    pub mention: String,
    pub kind: MentionKind,
    pub best: Option<LinkCandidate>,
    pub ambiguous: bool,
    /// Ranked candidates above threshold, best first.
    pub candidates: Vec<LinkCandidate>,
}

fn paragraph_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^[Pp]\d+$").expect("static regex"))
}

/// Whether a mention looks like a paragraph identifier such as `p123`.
pub fn is_paragraph_reference(text: &str) -> bool {
    paragraph_pattern().is_match(text.trim())
}

fn rank(a: &LinkCandidate, b: &LinkCandidate) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then(a.matched_via.cmp(&b.matched_via))
        .then(a.canonical_name.chars().count().cmp(&b.canonical_name.chars().count()))
        .then_with(|| a.canonical_name.cmp(&b.canonical_name))
        .then_with(|| compare_ids(&a.node_id, &b.node_id))
}

impl LinkIndex {
    pub fn build(graph: &PropertyGraph, config: &LinkerConfig) -> Self {
        let honorifics: Vec<String> = config.honorifics.iter().map(|h| normalize(h)).collect();
        let entries = graph
            .entities()
            .map(|e| {
                let primary = normalize(&e.name);
                let stripped = strip_honorifics(&primary, &honorifics);
                let mut forms = vec![primary];
                if stripped != forms[0] {
                    forms.push(stripped);
                }
                IndexEntry {
                    name: e.name.clone(),
                    node_id: e.id.clone(),
                    labels: e.labels.clone(),
                    grams: forms.iter().map(|f| trigrams(f)).collect(),
                    forms,
                }
            })
            .collect();
        let paragraphs = graph
            .paragraphs()
            .map(|p| ParagraphEntry {
                node_id: p.id.clone(),
                alias: match p.metadata.get("paragraph_id") {
                    Some(Scalar::Text(t)) => Some(t.clone()),
                    Some(Scalar::Int(i)) => Some(i.to_string()),
                    _ => None,
                },
            })
            .collect();
        LinkIndex { entries, paragraphs, parallelism: Parallelism::default() }
    }

    pub fn with_parallelism(mut self, parallelism: Parallelism) -> Self {
        self.parallelism = parallelism;
        self
    }

    pub fn entries(&self) -> &[IndexEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Ranked entity candidates for `mention`, at most `k`, none below `threshold`.
    pub fn link(&self, mention: &str, k: usize, threshold: f64) -> Vec<LinkCandidate> {
        let norm = normalize(mention);
        let grams = trigrams(&norm);
        let scored = par::map(self.parallelism, &self.entries, |entry| {
            let via = if entry.name == mention {
                MatchedVia::Exact
            } else if !norm.is_empty() && entry.forms.contains(&norm) {
                MatchedVia::NormalizedExact
            } else {
                MatchedVia::Fuzzy
            };
            let score = match via {
                MatchedVia::Exact | MatchedVia::NormalizedExact => 1.0,
                MatchedVia::Fuzzy => entry.grams.iter().map(|g| dice(&grams, g)).fold(0.0, f64::max),
            };
            (score >= threshold && score > 0.0).then(|| LinkCandidate {
                node_id: entry.node_id.clone(),
                canonical_name: entry.name.clone(),
                score,
                matched_via: via,
            })
        });
        let mut out: Vec<LinkCandidate> = scored.into_iter().flatten().collect();
        out.sort_by(rank);
        out.truncate(k);
        out
    }

    /// Exact match against paragraph node ids or their metadata paragraph id.
    pub fn link_paragraph(&self, mention: &str) -> Option<LinkCandidate> {
        let wanted = mention.trim();
        self.paragraphs
            .iter()
            .find(|p| p.node_id == wanted)
            .or_else(|| self.paragraphs.iter().find(|p| p.alias.as_deref() == Some(wanted)))
            .map(|p| LinkCandidate {
                node_id: p.node_id.clone(),
                canonical_name: p.node_id.clone(),
                score: 1.0,
                matched_via: MatchedVia::Exact,
            })
    }
}

/// Resolves each distinct mention to its best candidate, flagging near ties.
/// Unresolved mentions come back with `best: None`.
pub fn resolve_all(mentions: &[Mention], index: &LinkIndex, config: &LinkerConfig) -> Vec<Resolution> {
    let mut out: Vec<Resolution> = Vec::new();
    for mention in mentions {
        if out.iter().any(|r| r.mention == mention.text && r.kind == mention.kind) {
            continue;
        }
        let by_id = mention.kind == MentionKind::ParagraphId || is_paragraph_reference(&mention.text);
        let candidates = if by_id {
            index.link_paragraph(&mention.text).into_iter().collect()
        } else {
            index.link(&mention.text, config.k.max(2), config.threshold)
        };
        let ambiguous = candidates.len() >= 2 && candidates[0].score - candidates[1].score < config.ambiguity_gap;
        let mut shown = candidates;
        shown.truncate(config.k.max(1));
        out.push(Resolution {
            mention: mention.text.clone(),
            kind: mention.kind,
            best: shown.first().cloned(),
            ambiguous,
            candidates: shown,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GraphBuilder, NodeSpec};

    fn index(names: &[&str]) -> LinkIndex {
        let mut b = GraphBuilder::new();
        for n in names {
            b.add_node(NodeSpec::entity(*n, &["Person"])).unwrap();
        }
        b.add_node(NodeSpec::paragraph("Some text.").with_id("p123")).unwrap();
        LinkIndex::build(&b.finalize(), &LinkerConfig::default())
    }

    #[test]
    fn exact_match_scores_one() {
        let idx = index(&["Pedro de Cazalla", "Fray Bartolomé de Miranda"]);
        let c = idx.link("Pedro de Cazalla", 5, 0.55);
        assert_eq!(c[0].canonical_name, "Pedro de Cazalla");
        assert_eq!(c[0].score, 1.0);
        assert_eq!(c[0].matched_via, MatchedVia::Exact);
    }

    #[test]
    fn honorific_stripped_form_is_normalized_exact() {
        let idx = index(&["Pedro de Cazalla", "Fray Bartolomé de Miranda"]);
        let c = idx.link("bartolome de miranda", 5, 0.55);
        assert_eq!(c[0].canonical_name, "Fray Bartolomé de Miranda");
        assert_eq!(c[0].matched_via, MatchedVia::NormalizedExact);
        assert_eq!(c[0].score, 1.0);
    }

    #[test]
    fn paragraph_mentions_only_match_exactly() {
        let idx = index(&["Pedro de Cazalla"]);
        let r = resolve_all(&[Mention::new("p123", MentionKind::Person)], &idx, &LinkerConfig::default());
        assert_eq!(r[0].best.as_ref().unwrap().node_id, "p123");
        let r = resolve_all(&[Mention::new("p12", MentionKind::ParagraphId)], &idx, &LinkerConfig::default());
        assert!(r[0].best.is_none());
    }

    #[test]
    fn empty_mentions_resolve_to_nothing() {
        assert!(resolve_all(&[], &index(&["A"]), &LinkerConfig::default()).is_empty());
    }

    #[test]
    fn same_normalized_name_is_ambiguous() {
        let idx = index(&["Juan Pérez", "Juan Perez"]);
        let r = resolve_all(&[Mention::new("juan perez", MentionKind::Person)], &idx, &LinkerConfig::default());
        assert!(r[0].ambiguous);
        assert_eq!(r[0].candidates.len(), 2);
    }
}
