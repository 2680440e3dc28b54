use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::backend::{ChatMessage, LlmBackend};
use super::extract::strip_fences;
use super::prompts::{render, PromptTemplates};
use super::{PipelineError, PipelineErrorKind, Stage, GENERATION_TEMPERATURE};
use crate::cypher::{check_scope, parse, pretty_print, tokenize, validate, Finding, Keyword, Query, Token};
use crate::graph::GraphSchema;
use crate::linker::{MentionKind, Resolution};

/// One model reply during generation, with the reason it was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationAttempt {
    pub output: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedQuery {
    pub ast: Query,
    /// Canonical text of `ast`.
    pub text: String,
    pub attempts: Vec<GenerationAttempt>,
    pub warnings: Vec<Finding>,
}

impl GeneratedQuery {
    pub fn repairs(&self) -> usize {
        self.attempts.len().saturating_sub(1)
    }
}

pub fn schema_text(schema: &GraphSchema) -> String {
    if schema.is_empty() {
        return "The graph is empty.".into();
    }
    let counted = |m: &std::collections::BTreeMap<String, usize>| {
        m.iter().map(|(k, n)| format!("{k} ({n})")).collect::<Vec<_>>().join(", ")
    };
    let mut out = String::new();
    let _ = writeln!(out, "Node labels with counts: {}", counted(&schema.node_labels));
    let _ = writeln!(out, "Relationship types with counts: {}", counted(&schema.relationship_types));
    let _ = writeln!(out, "Node properties by label:");
    for (label, keys) in &schema.label_property_keys {
        let _ = writeln!(out, "  {label}: {}", keys.iter().cloned().collect::<Vec<_>>().join(", "));
    }
    let _ = writeln!(out, "Relationship properties by type:");
    for (t, keys) in &schema.type_property_keys {
        let _ = writeln!(out, "  {t}: {}", keys.iter().cloned().collect::<Vec<_>>().join(", "));
    }
    out.trim_end().to_string()
}

/// One line per mention, giving the database name the query must use.
pub fn entities_text(resolutions: &[Resolution]) -> String {
    if resolutions.is_empty() {
        return "(none)".into();
    }
    let lines: Vec<String> = resolutions
        .iter()
        .map(|r| match (&r.best, r.kind) {
            (Some(best), MentionKind::ParagraphId) => format!(
                "- user said \"{}\" → paragraph \"{}\" (relationships extracted from it have paragraph_id = '{}')",
                r.mention, best.node_id, best.node_id
            ),
            (Some(best), _) if r.ambiguous => {
                let others: Vec<String> =
                    r.candidates.iter().skip(1).map(|c| format!("\"{}\"", c.canonical_name)).collect();
                format!(
                    "- user said \"{}\" → database name \"{}\" (ambiguous, also close: {})",
                    r.mention,
                    best.canonical_name,
                    others.join(", ")
                )
            }
            (Some(best), _) => format!("- user said \"{}\" → database name \"{}\"", r.mention, best.canonical_name),
            (None, _) => format!("- user said \"{}\" → no match in the database, use it verbatim", r.mention),
        })
        .collect();
    lines.join("\n")
}

pub fn build_generation_prompt(
    question: &str,
    schema: &GraphSchema,
    resolutions: &[Resolution],
    templates: &PromptTemplates,
) -> Vec<ChatMessage> {
    let system = render(
        &templates.generate_system,
        &[
            ("schema", &schema_text(schema)),
            ("rules", templates.rules.trim_end()),
            ("grammar", templates.grammar.trim_end()),
        ],
    );
    let user = render(&templates.generate_user, &[("question", question), ("entities", &entities_text(resolutions))]);
    vec![ChatMessage::system(system), ChatMessage::user(user)]
}

/// Cleans a model reply down to query text.
pub fn query_text(output: &str) -> &str {
    strip_fences(output).trim()
}

/// Accepts a candidate only if it starts with MATCH, parses within the
/// subset and binds every variable it uses.
pub fn check_candidate(text: &str) -> Result<Query, String> {
    let tokens = tokenize(text).map_err(|e| e.to_string())?;
    if !matches!(tokens.first().map(|t| &t.token), Some(Token::Keyword(Keyword::MATCH))) {
        return Err("the query must start with MATCH".into());
    }
    let ast = parse(text).map_err(|e| e.to_string())?;
    let errors = check_scope(&ast);
    if !errors.is_empty() {
        return Err(errors.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("; "));
    }
    Ok(ast)
}

/// Runs generation with at most one repair round.
pub fn generate_cypher(
    messages: &[ChatMessage],
    backend: &dyn LlmBackend,
    schema: &GraphSchema,
    templates: &PromptTemplates,
    max_tokens: u32,
) -> Result<GeneratedQuery, PipelineError> {
    let stage = Stage::GenerateCypher;
    let mut conversation = messages.to_vec();
    let mut attempts = Vec::new();
    for round in 0..2 {
        let output = backend
            .complete(&conversation, GENERATION_TEMPERATURE, max_tokens)
            .map_err(|e| PipelineError::new(stage, PipelineErrorKind::BackendUnavailable(e)))?;
        match check_candidate(query_text(&output)) {
            Ok(ast) => {
                attempts.push(GenerationAttempt { output, error: None });
                let text = pretty_print(&ast);
                let warnings = validate(&ast, schema).warnings;
                return Ok(GeneratedQuery { ast, text, attempts, warnings });
            }
            Err(error) => {
                attempts.push(GenerationAttempt { output: output.clone(), error: Some(error.clone()) });
                if round == 0 {
                    conversation.push(ChatMessage::assistant(output));
                    conversation.push(ChatMessage::user(render(
                        &templates.repair,
                        &[("error", &error), ("grammar", templates.grammar.trim_end())],
                    )));
                }
            }
        }
    }
    Err(PipelineError::new(stage, PipelineErrorKind::UngeneratableQuery { attempts }))
}
