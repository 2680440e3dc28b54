//! Question answering over the graph with a chat-completion model:
//! entity extraction, fuzzy resolution, schema-aware query generation with
//! one repair round, execution, and a plain-language summary.
//!
//! Backends are pluggable through [`LlmBackend`]. [`MockLlm`] replays canned
//! replies keyed by a hash of the prompt, which keeps tests hermetic.

mod backend;
mod extract;
mod generate;
mod pipeline;
mod prompts;
mod summary;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use backend::{
    fingerprint, BackendError, ChatMessage, FixtureEntry, FixtureFile, FnBackend, HttpBackend, Limited, LlmBackend,
    MockLlm,
};
pub use extract::{extract_entities, extraction_messages, parse_extraction, strip_fences, ExtractedMentions};
pub use generate::{
    build_generation_prompt, check_candidate, entities_text, generate_cypher, query_text, schema_text, GeneratedQuery,
    GenerationAttempt,
};
pub use pipeline::{Diagnostics, NlQueryResponse, Pipeline, PipelineConfig, StageRecord, StageTiming};
pub use prompts::{render, PromptTemplates};
pub use summary::{fallback_summary, summarize_answer, summary_messages, SummaryOutcome, DEFAULT_ROW_BUDGET};

use crate::cypher::CypherError;

pub const EXTRACTION_TEMPERATURE: f32 = 0.0;
pub const GENERATION_TEMPERATURE: f32 = 0.0;
pub const SUMMARY_TEMPERATURE: f32 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    ExtractEntities,
    ResolveEntities,
    BuildGenerationPrompt,
    GenerateCypher,
    Execute,
    SummarizeAnswer,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::ExtractEntities => "extract_entities",
            Stage::ResolveEntities => "resolve_entities",
            Stage::BuildGenerationPrompt => "build_generation_prompt",
            Stage::GenerateCypher => "generate_cypher",
            Stage::Execute => "execute",
            Stage::SummarizeAnswer => "summarize_answer",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PipelineErrorKind {
    EmptyQuestion,
    BackendUnavailable(BackendError),
    MalformedModelOutput { raw: String },
    UngeneratableQuery { attempts: Vec<GenerationAttempt> },
    Execution(CypherError),
}

/// A failed pipeline run: the stage that failed, why, and the diagnostics
/// gathered up to that point.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineError {
    pub stage: Stage,
    pub kind: PipelineErrorKind,
    pub diagnostics: Box<Diagnostics>,
}

impl PipelineError {
    pub fn new(stage: Stage, kind: PipelineErrorKind) -> Self {
        PipelineError { stage, kind, diagnostics: Box::default() }
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            PipelineErrorKind::EmptyQuestion => "EmptyQuestion",
            PipelineErrorKind::BackendUnavailable(_) => "BackendUnavailable",
            PipelineErrorKind::MalformedModelOutput { .. } => "MalformedModelOutput",
            PipelineErrorKind::UngeneratableQuery { .. } => "UngeneratableQuery",
            PipelineErrorKind::Execution(e) => e.kind(),
        }
    }
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            PipelineErrorKind::EmptyQuestion => write!(f, "question is empty"),
            PipelineErrorKind::BackendUnavailable(e) => write!(f, "{}: backend unavailable: {e}", self.stage.as_str()),
            PipelineErrorKind::MalformedModelOutput { .. } => {
                write!(f, "{}: model reply was not the requested JSON, even after a retry", self.stage.as_str())
            }
            PipelineErrorKind::UngeneratableQuery { attempts } => {
                let last = attempts.last().and_then(|a| a.error.as_deref()).unwrap_or("no usable query");
                write!(f, "{}: could not obtain a runnable query after one repair: {last}", self.stage.as_str())
            }
            PipelineErrorKind::Execution(e) => write!(f, "{}: {e}", self.stage.as_str()),
        }
    }
}

impl std::error::Error for PipelineError {}
