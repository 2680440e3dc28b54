//! A small demonstration corpus built around the trial of Fray Bartolomé de
//! Miranda, plus scripted model replies for a handful of questions about it.
//!
//! The scripted backend answers from the scenario table below; recording it
//! through the real pipeline yields the fixture files that [`crate::nl::MockLlm`]
//! replays. `cargo run -p relgraph-core --example make_fixtures` rewrites them.

use std::sync::Mutex;

use crate::graph::{Properties, PropertyGraph, Scalar, SOURCE_PARAGRAPH_KEY};
use crate::ingest::{
    export_graph, generate_synthetic, load_graph, NodeDocument, RelationshipDocument, SyntheticConfig,
};
use crate::linker::LinkIndex;
use crate::nl::{
    fingerprint, render, BackendError, ChatMessage, FixtureEntry, FixtureFile, FnBackend, LlmBackend, Pipeline,
    PipelineConfig, PromptTemplates,
};

pub const MIRANDA: &str = "Fray Bartolomé de Miranda";
pub const CAZALLA: &str = "Pedro de Cazalla";
pub const MIRANDA_ID: &str = "n901";
pub const CAZALLA_ID: &str = "n902";

/// One question with the replies the scripted model gives at each step.
#[derive(Debug, Clone, Copy)]
pub struct Scenario {
    pub name: &'static str,
    pub question: &'static str,
    /// Extraction replies: first call, then the retry.
    pub extraction: &'static [&'static str],
    /// Generation replies: first call, then the repair round.
    pub cypher: &'static [&'static str],
    /// Opening sentence of the summary; the row count is appended.
    pub answer: &'static str,
}

const NO_ENTITIES: &str = r#"{"people": [], "organisations": [], "locations": [], "paragraph_ids": []}"#;

pub const SCENARIOS: &[Scenario] = &[
    Scenario {
        name: "religious-people",
        question: "Which people are both persons and religious figures?",
        extraction: &[NO_ENTITIES],
        cypher: &["MATCH (p:Person:Religious) RETURN p ORDER BY p.name"],
        answer: "These people carry both the Person and the Religious label.",
    },
    Scenario {
        name: "miranda-contacts",
        question: "Who interacted with Fray Bartolomé de Miranda?",
        extraction: &[r#"{"people": ["Fray Bartolomé de Miranda"], "organisations": [], "locations": [], "paragraph_ids": []}"#],
        cypher: &["MATCH (p:Person)-[r]-(m {name: 'Fray Bartolomé de Miranda'}) \
                   RETURN p.name AS person, count(r) AS interactions ORDER BY interactions DESC, person"],
        answer: "Fray Bartolomé de Miranda dealt most often with the people at the top of this list.",
    },
    Scenario {
        name: "miranda-cazalla",
        question: "Show every interaction between Bartolomé de Miranda and Pedro de Cazalla.",
        extraction: &[
            "```json\n{\"people\": [\"Bartolomé de Miranda\", \"Pedro de Cazalla\"], \"organisations\": [], \"locations\": [], \"paragraph_ids\": []}\n```",
        ],
        cypher: &["MATCH (m {name: 'Fray Bartolomé de Miranda'})-[r]-(c {name: 'Pedro de Cazalla'}) RETURN m, r, c"],
        answer: "The records tie Miranda and Cazalla together through these relationships.",
    },
    Scenario {
        name: "cazalla-chain",
        question: "Who is linked to Pedro de Cazalla through any chain of contacts?",
        extraction: &[r#"{"people": ["Pedro de Cazalla"], "organisations": [], "locations": [], "paragraph_ids": []}"#],
        cypher: &[
            "MATCH (a {name: 'Pedro de Cazalla'})-[*1..3]-(b) RETURN DISTINCT b.name",
            "MATCH (a {name: 'Pedro de Cazalla'})-[r]-(b) RETURN DISTINCT b.name AS name ORDER BY name",
        ],
        answer: "Only direct contacts of Pedro de Cazalla can be listed.",
    },
    Scenario {
        name: "place-count",
        question: "How many places are recorded?",
        extraction: &[NO_ENTITIES],
        cypher: &["MATCH (p:Place) RETURN count(p) AS places"],
        answer: "The corpus records this many places.",
    },
    Scenario {
        name: "refused-write",
        question: "Remove every accusation from the records.",
        extraction: &[NO_ENTITIES],
        cypher: &["MATCH (a)-[r:ACCUSES]-(b) DELETE r", "MATCH (a)-[r:ACCUSES]-(b) DELETE r"],
        answer: "",
    },
    Scenario {
        name: "story",
        question: "Tell me a story about the archive.",
        extraction: &["Once upon a time there was an archive in Simancas.", "I would rather tell you a story."],
        cypher: &[],
        answer: "",
    },
];

pub fn scenario(name: &str) -> Option<&'static Scenario> {
    SCENARIOS.iter().find(|s| s.name == name)
}

fn text(s: &str) -> Scalar {
    Scalar::Text(s.to_string())
}

fn props(pairs: &[(&str, Scalar)]) -> Properties {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// Synthetic background corpus with Miranda, Cazalla and their documented
/// contacts added on top. Deterministic.
pub fn usecase_graph() -> PropertyGraph {
    let config = SyntheticConfig { nodes: 120, relationships: 400, properties: 2000, seed: 1559, ..Default::default() };
    let base = generate_synthetic(&config).expect("demo targets are achievable");
    let mut doc = export_graph(&base);

    // Deterministic partners: the first Person entities in id order.
    let partners: Vec<(String, String)> = base
        .entities()
        .filter(|e| e.labels.iter().any(|l| l == "Person"))
        .take(5)
        .map(|e| (e.id.clone(), e.name.clone()))
        .collect();
    assert!(partners.iter().all(|(_, n)| n != MIRANDA && n != CAZALLA), "demo names must be unique");

    doc.nodes.push(NodeDocument::Entity {
        id: MIRANDA_ID.into(),
        name: MIRANDA.into(),
        labels: vec!["Person".into(), "Religious".into()],
        properties: props(&[(SOURCE_PARAGRAPH_KEY, text("p901")), ("office", text("archbishop of Toledo"))]),
    });
    doc.nodes.push(NodeDocument::Entity {
        id: CAZALLA_ID.into(),
        name: CAZALLA.into(),
        labels: vec!["Person".into()],
        properties: props(&[(SOURCE_PARAGRAPH_KEY, text("p901")), ("residence", text("Pedrosa"))]),
    });

    // (source, target, type, category, verb, place, paragraph)
    let mut links: Vec<(String, String, &str, &str, &str, &str, &str)> = vec![
        (MIRANDA_ID.into(), CAZALLA_ID.into(), "SPEAKS_WITH", "communication", "speaks with", "Valladolid", "p901"),
        (CAZALLA_ID.into(), MIRANDA_ID.into(), "DEFENDS", "support", "defends", "Valladolid", "p901"),
        (CAZALLA_ID.into(), MIRANDA_ID.into(), "VISITS", "movement", "visits", "Pedrosa", "p902"),
    ];
    let partner_plan: [(usize, &str, &str, &str, &str); 8] = [
        (0, "ACCUSES", "accusation", "accuses", "Valladolid"),
        (0, "SPEAKS_WITH", "communication", "speaks with", "Toledo"),
        (0, "DENOUNCES", "accusation", "denounces", "Valladolid"),
        (1, "DEFENDS", "support", "defends", "Toledo"),
        (1, "SPEAKS_WITH", "communication", "speaks with", "Salamanca"),
        (2, "INTERROGATES", "judicial", "interrogates", "Valladolid"),
        (3, "VISITS", "movement", "visits", "Toledo"),
        (4, "ACCUSES", "accusation", "accuses", "Sevilla"),
    ];
    for (i, (who, ty, cat, verb, place)) in partner_plan.into_iter().enumerate() {
        let partner = partners[who].0.clone();
        let (s, t) = if i % 2 == 0 { (partner, MIRANDA_ID.to_string()) } else { (MIRANDA_ID.to_string(), partner) };
        links.push((s, t, ty, cat, verb, place, if i < 4 { "p901" } else { "p902" }));
    }

    let name_of = |id: &str| -> String {
        match id {
            MIRANDA_ID => MIRANDA.into(),
            CAZALLA_ID => CAZALLA.into(),
            _ => partners.iter().find(|(p, _)| p == id).map(|(_, n)| n.clone()).expect("partner"),
        }
    };
    let mut paragraph_text = [String::new(), String::new()];
    for (i, (source, target, ty, cat, verb, place, paragraph)) in links.into_iter().enumerate() {
        let sentence = format!("{} {verb} {} in {place}.", name_of(&source), name_of(&target));
        let slot = &mut paragraph_text[usize::from(paragraph == "p902")];
        if !slot.is_empty() {
            slot.push(' ');
        }
        slot.push_str(&sentence);
        doc.relationships.push(RelationshipDocument {
            id: format!("r{}", 901 + i),
            source,
            target,
            rel_type: ty.into(),
            category: cat.into(),
            sentence,
            paragraph_id: Some(paragraph.into()),
            properties: Properties::new(),
        });
    }
    for (i, body) in paragraph_text.into_iter().enumerate() {
        let n = 901 + i;
        doc.nodes.push(NodeDocument::Paragraph {
            id: format!("p{n}"),
            text: body,
            metadata: props(&[
                ("paragraph_id", text(&format!("P-{n}"))),
                ("paragraph_type", text("testimony")),
                ("archival_source", text("AHN, Inquisición, leg. 2019")),
                ("folio", text(&format!("fol. {}r", 10 + i))),
            ]),
        });
    }
    load_graph(&doc).expect("demo corpus is well formed")
}

fn question_line(content: &str) -> Option<&str> {
    content.lines().next()?.strip_prefix("Question: ")
}

/// Backend that answers from [`SCENARIOS`] by recognising which prompt it
/// was sent. Unknown questions are an error.
pub fn scripted_backend(
    templates: &PromptTemplates,
) -> FnBackend<impl Fn(&[ChatMessage]) -> Result<String, BackendError> + Send + Sync> {
    let extract_system = render(&templates.extract_system, &[]);
    let summary_system = render(&templates.summary_system, &[]);
    let generate_head = templates.generate_system.lines().next().unwrap_or_default().to_string();
    FnBackend(move |messages: &[ChatMessage]| {
        let unknown = || BackendError::UnknownFingerprint(fingerprint(messages));
        let system = &messages.first().ok_or_else(unknown)?.content;
        let user = &messages.get(1).ok_or_else(unknown)?.content;
        let question = question_line(user).ok_or_else(unknown)?;
        let scenario = SCENARIOS.iter().find(|s| s.question == question).ok_or_else(unknown)?;
        let round = (messages.len() - 2) / 2;
        let pick = |replies: &[&str]| replies.get(round).or(replies.last()).map(|r| r.to_string());
        if *system == extract_system {
            pick(scenario.extraction).ok_or_else(unknown)
        } else if *system == summary_system {
            let rows = user
                .lines()
                .find_map(|l| l.strip_prefix("Rows (")?.split_once(' ').map(|(n, _)| n.to_string()))
                .unwrap_or_default();
            Ok(format!("{} The query returned {rows} rows.", scenario.answer))
        } else if system.starts_with(&generate_head) {
            pick(scenario.cypher).ok_or_else(unknown)
        } else {
            Err(unknown())
        }
    })
}

/// Runs every scenario through the pipeline against `graph`, recording each
/// prompt the scripted model answered.
pub fn record_fixtures(graph: &PropertyGraph, templates: &PromptTemplates, config: &PipelineConfig) -> FixtureFile {
    let scripted = scripted_backend(templates);
    let entries: Mutex<Vec<FixtureEntry>> = Mutex::new(Vec::new());
    let current = Mutex::new("");
    let recorder = FnBackend(|messages: &[ChatMessage]| {
        let response = scripted.complete(messages, 0.0, 0)?;
        let fp = fingerprint(messages);
        let mut entries = entries.lock().unwrap();
        if !entries.iter().any(|e| e.fingerprint == fp) {
            let step = if messages.len() == 2 { "first call" } else { "follow-up" };
            let label = format!("{}: {step} #{}", current.lock().unwrap(), entries.len() + 1);
            entries.push(FixtureEntry { fingerprint: fp, label, response: response.clone() });
        }
        Ok(response)
    });
    let index = LinkIndex::build(graph, &config.linker);
    let pipeline = Pipeline::new(recorder, templates.clone(), config.clone());
    for s in SCENARIOS {
        *current.lock().unwrap() = s.name;
        // Failing scenarios are part of the script; their replies are still recorded.
        let _ = pipeline.answer_question(s.question, graph, &index);
    }
    drop(pipeline);
    FixtureFile { entries: entries.into_inner().unwrap() }
}
