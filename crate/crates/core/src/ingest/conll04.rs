//! CoNLL04 adapter for the Roth & Yih column layout:
//!
//! ```text
//! <sent> <tag> <idx> O <pos> <word> O O O      one line per token (9 columns)
//! <blank>
//! <idx-a> <idx-b> <relation>                   zero or more relation lines
//! <blank>
//! ```
//!
//! `tag` is `Peop`, `Org`, `Loc`, `Other` or `O` (long forms such as
//! `person` are accepted too). Multi-word tokens join their parts with `/`;
//! `COMMA`, `-LRB-` and `-RRB-` stand for `,`, `(` and `)`. A relation line
//! points at the token indices of its two argument entities, first argument
//! first. Every sentence becomes a paragraph node whose text is the
//! detokenized sentence, and every relationship carries that text as its
//! provenance sentence.

use std::collections::HashMap;

use super::IngestError;
use crate::graph::{GraphBuilder, NodeSpec, PropertyGraph, RelationshipSpec, Scalar, SOURCE_PARAGRAPH_KEY};
use crate::linker::normalize;

struct Token {
    index: usize,
    tag: Option<&'static str>,
    words: String,
}

struct Sentence {
    number: String,
    tokens: Vec<Token>,
    relations: Vec<(usize, usize, &'static str, usize)>,
}

fn entity_label(tag: &str, line: usize) -> Result<Option<&'static str>, IngestError> {
    Ok(Some(match tag.to_ascii_lowercase().as_str() {
        "o" => return Ok(None),
        "peop" | "person" | "per" => "Person",
        "org" | "organization" | "organisation" => "Organisation",
        "loc" | "location" => "Place",
        "other" => "Other",
        _ => return Err(malformed(line, format!("unknown entity tag {tag:?}"))),
    }))
}

/// Maps a relation label to its relationship type and category.
pub fn relation_type(label: &str) -> Option<(&'static str, &'static str)> {
    let key: String = label.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
    Some(match key.as_str() {
        "kill" => ("KILL", "conflict"),
        "workfor" => ("WORK_FOR", "affiliation"),
        "orgbasedin" | "organizationbasedin" => ("ORG_BASED_IN", "location"),
        "livein" => ("LIVE_IN", "location"),
        "locatedin" => ("LOCATED_IN", "location"),
        _ => return None,
    })
}

fn malformed(line: usize, message: impl Into<String>) -> IngestError {
    IngestError::MalformedRecord { line, message: message.into() }
}

fn surface(word: &str) -> String {
    word.split('/')
        .map(|part| match part {
            "COMMA" => ",",
            "-LRB-" => "(",
            "-RRB-" => ")",
            other => other,
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Rebuilds sentence text from tokens: closing punctuation attaches to the
/// previous token and `(` to the next one.
pub fn detokenize<'a>(words: impl IntoIterator<Item = &'a str>) -> String {
    let mut out = String::new();
    let mut glue_next = false;
    for word in words {
        let closing = matches!(word, "," | "." | ";" | ":" | "!" | "?" | ")" | "'s" | "''" | "%");
        if !out.is_empty() && !closing && !glue_next {
            out.push(' ');
        }
        out.push_str(word);
        glue_next = matches!(word, "(" | "$" | "``");
    }
    out
}

fn parse(text: &str) -> Result<Vec<Sentence>, IngestError> {
    let mut sentences: Vec<Sentence> = Vec::new();
    let mut in_tokens = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let cols: Vec<&str> = raw.split_whitespace().collect();
        match cols.len() {
            0 => in_tokens = false,
            9 => {
                let index: usize =
                    cols[2].parse().map_err(|_| malformed(line, format!("bad token index {:?}", cols[2])))?;
                let token = Token { index, tag: entity_label(cols[1], line)?, words: surface(cols[5]) };
                match sentences.last_mut() {
                    Some(s) if in_tokens => {
                        if s.number != cols[0] {
                            return Err(malformed(line, "sentence number changes inside a token block"));
                        }
                        if s.tokens.last().is_some_and(|t| t.index >= index) {
                            return Err(malformed(line, "token indices must increase"));
                        }
                        s.tokens.push(token);
                    }
                    _ => sentences.push(Sentence {
                        number: cols[0].to_string(),
                        tokens: vec![token],
                        relations: Vec::new(),
                    }),
                }
                in_tokens = true;
            }
            3 if !in_tokens => {
                let sentence = sentences.last_mut().ok_or_else(|| malformed(line, "relation before any sentence"))?;
                let a: usize = cols[0].parse().map_err(|_| malformed(line, "bad relation argument"))?;
                let b: usize = cols[1].parse().map_err(|_| malformed(line, "bad relation argument"))?;
                let (rel_type, _) =
                    relation_type(cols[2]).ok_or_else(|| malformed(line, format!("unknown relation {:?}", cols[2])))?;
                sentence.relations.push((a, b, rel_type, line));
            }
            n => return Err(malformed(line, format!("expected 9 token columns or 3 relation columns, found {n}"))),
        }
    }
    Ok(sentences)
}

/// Imports CoNLL04 text. Entities are merged across the file by
/// (normalized surface, label), so repeated sentences add paragraphs but
/// no new entities.
pub fn import_conll04(text: &str) -> Result<PropertyGraph, IngestError> {
    let sentences = parse(text)?;
    let mut builder = GraphBuilder::new();
    let mut entities: HashMap<(String, &'static str), String> = HashMap::new();
    for (n, sentence) in sentences.iter().enumerate() {
        let text = detokenize(sentence.tokens.iter().map(|t| t.words.as_str()));
        let paragraph = builder
            .add_node(
                NodeSpec::paragraph(text.clone())
                    .with_id(format!("p{}", n + 1))
                    .with_property("paragraph_type", "sentence")
                    .with_property("source", "conll04")
                    .with_property("sentence_number", sentence.number.clone()),
            )
            .map_err(|e| IngestError::InvariantViolation(e.to_string()))?;
        let mut local: HashMap<usize, String> = HashMap::new();
        for token in &sentence.tokens {
            let Some(label) = token.tag else { continue };
            let key = (normalize(&token.words), label);
            let id = match entities.get(&key) {
                Some(id) => id.clone(),
                None => {
                    let spec = NodeSpec::entity(token.words.clone(), &[label])
                        .with_property(SOURCE_PARAGRAPH_KEY, Scalar::Text(paragraph.clone()));
                    let id = builder.add_node(spec).map_err(|e| IngestError::InvariantViolation(e.to_string()))?;
                    entities.insert(key, id.clone());
                    id
                }
            };
            local.insert(token.index, id);
        }
        for &(a, b, rel_type, line) in &sentence.relations {
            let source = local.get(&a).ok_or_else(|| malformed(line, format!("token {a} is not an entity")))?;
            let target = local.get(&b).ok_or_else(|| malformed(line, format!("token {b} is not an entity")))?;
            let category = relation_type(rel_type).map(|(_, c)| c).unwrap_or_default();
            builder
                .add_relationship(
                    RelationshipSpec::new(source, target, rel_type)
                        .category(category)
                        .sentence(text.clone())
                        .paragraph(&paragraph),
                )
                .map_err(|e| IngestError::InvariantViolation(e.to_string()))?;
        }
    }
    Ok(builder.finalize())
}
