use serde::{Deserialize, Serialize};

use super::backend::{ChatMessage, LlmBackend};
use super::prompts::{render, PromptTemplates};
use super::{PipelineError, PipelineErrorKind, Stage, EXTRACTION_TEMPERATURE};
use crate::linker::{Mention, MentionKind};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractedMentions {
    pub people: Vec<String>,
    pub organisations: Vec<String>,
    pub locations: Vec<String>,
    pub paragraph_ids: Vec<String>,
    pub raw_model_output: String,
}

impl ExtractedMentions {
    pub fn is_empty(&self) -> bool {
        self.people.is_empty()
            && self.organisations.is_empty()
            && self.locations.is_empty()
            && self.paragraph_ids.is_empty()
    }

    /// All mentions in key order: people, organisations, locations, paragraph ids.
    pub fn mentions(&self) -> Vec<Mention> {
        let groups = [
            (&self.people, MentionKind::Person),
            (&self.organisations, MentionKind::Organisation),
            (&self.locations, MentionKind::Location),
            (&self.paragraph_ids, MentionKind::ParagraphId),
        ];
        groups.iter().flat_map(|(list, kind)| list.iter().map(|t| Mention::new(t.clone(), *kind))).collect()
    }
}

/// Removes a surrounding Markdown code fence, with or without a language tag.
pub fn strip_fences(text: &str) -> &str {
    let t = text.trim();
    let Some(rest) = t.strip_prefix("```") else { return t };
    let body = match rest.find('\n') {
        Some(nl) => &rest[nl + 1..],
        None => rest,
    };
    body.trim_end().strip_suffix("```").unwrap_or(body).trim()
}

fn string_list(value: Option<&serde_json::Value>) -> Option<Vec<String>> {
    let Some(value) = value else { return Some(Vec::new()) };
    let mut out: Vec<String> = Vec::new();
    for item in value.as_array()? {
        let s = item.as_str()?.trim();
        if !s.is_empty() && !out.iter().any(|x| x == s) {
            out.push(s.to_string());
        }
    }
    Some(out)
}

/// Lenient parse of the extraction reply: fences and surrounding prose are
/// ignored, missing keys count as empty, lists are deduplicated in order.
pub fn parse_extraction(text: &str) -> Option<ExtractedMentions> {
    let body = strip_fences(text);
    let (start, end) = (body.find('{')?, body.rfind('}')?);
    if end < start {
        return None;
    }
    let value: serde_json::Value = serde_json::from_str(&body[start..=end]).ok()?;
    let obj = value.as_object()?;
    Some(ExtractedMentions {
        people: string_list(obj.get("people"))?,
        organisations: string_list(obj.get("organisations").or_else(|| obj.get("organizations")))?,
        locations: string_list(obj.get("locations"))?,
        paragraph_ids: string_list(obj.get("paragraph_ids"))?,
        raw_model_output: text.to_string(),
    })
}

pub fn extraction_messages(question: &str, templates: &PromptTemplates) -> Vec<ChatMessage> {
    vec![
        ChatMessage::system(render(&templates.extract_system, &[])),
        ChatMessage::user(render(&templates.extract_user, &[("question", question)])),
    ]
}

/// Asks the model for the entities in `question`, retrying once with a
/// JSON-only reminder when the first reply does not parse.
pub fn extract_entities(
    question: &str,
    backend: &dyn LlmBackend,
    templates: &PromptTemplates,
    max_tokens: u32,
) -> Result<ExtractedMentions, PipelineError> {
    let stage = Stage::ExtractEntities;
    if question.trim().is_empty() {
        return Err(PipelineError::new(stage, PipelineErrorKind::EmptyQuestion));
    }
    let mut messages = extraction_messages(question, templates);
    let first = backend
        .complete(&messages, EXTRACTION_TEMPERATURE, max_tokens)
        .map_err(|e| PipelineError::new(stage, PipelineErrorKind::BackendUnavailable(e)))?;
    if let Some(m) = parse_extraction(&first) {
        return Ok(m);
    }
    messages.push(ChatMessage::assistant(first));
    messages.push(ChatMessage::user(render(&templates.json_reminder, &[])));
    let second = backend
        .complete(&messages, EXTRACTION_TEMPERATURE, max_tokens)
        .map_err(|e| PipelineError::new(stage, PipelineErrorKind::BackendUnavailable(e)))?;
    parse_extraction(&second)
        .ok_or_else(|| PipelineError::new(stage, PipelineErrorKind::MalformedModelOutput { raw: second }))
}
