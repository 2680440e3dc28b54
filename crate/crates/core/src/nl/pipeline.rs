use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::backend::LlmBackend;
use super::extract::{extract_entities, ExtractedMentions};
use super::generate::{build_generation_prompt, generate_cypher, GenerationAttempt};
use super::prompts::PromptTemplates;
use super::summary::{summarize_answer, DEFAULT_ROW_BUDGET};
use super::{PipelineError, PipelineErrorKind, Stage};
use crate::cypher::{execute_with, ExecOptions, Finding, QueryResult};
use crate::graph::PropertyGraph;
use crate::linker::{resolve_all, LinkIndex, LinkerConfig, Resolution};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub linker: LinkerConfig,
    pub exec: ExecOptions,
    pub summary_row_budget: usize,
    /// Skip the summary call entirely and use the template answer.
    pub summarize: bool,
    pub max_tokens: u32,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            linker: LinkerConfig::default(),
            exec: ExecOptions::default(),
            summary_row_budget: DEFAULT_ROW_BUDGET,
            summarize: true,
            max_tokens: 512,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: Stage,
    /// `ok`, or the error message.
    pub outcome: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: Stage,
    pub micros: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mentions: Option<ExtractedMentions>,
    pub resolutions: Vec<Resolution>,
    pub validation_warnings: Vec<Finding>,
    pub repairs: usize,
    pub attempts: Vec<GenerationAttempt>,
    pub summary_fallback: bool,
    pub stages: Vec<StageRecord>,
    /// Wall-clock per stage; the only non-deterministic part of a response.
    pub timings: Vec<StageTiming>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NlQueryResponse {
    pub question: String,
    pub generated_cypher: String,
    pub result: QueryResult,
    pub answer_text: Option<String>,
    pub diagnostics: Diagnostics,
}

impl NlQueryResponse {
    /// Drops stage timings so two runs can be compared byte for byte.
    pub fn without_timings(mut self) -> Self {
        self.diagnostics.timings.clear();
        self
    }
}

/// The question-answering workflow over one backend. Holds no per-question
/// state, so one instance can serve concurrent questions.
pub struct Pipeline<B> {
    backend: B,
    templates: PromptTemplates,
    config: PipelineConfig,
}

struct Recorder {
    diagnostics: Diagnostics,
}

impl Recorder {
    fn run<T>(&mut self, stage: Stage, f: impl FnOnce() -> Result<T, PipelineError>) -> Result<T, PipelineError> {
        let started = Instant::now();
        let out = f();
        self.diagnostics.timings.push(StageTiming { stage, micros: started.elapsed().as_micros() as u64 });
        let outcome = match &out {
            Ok(_) => "ok".to_string(),
            Err(e) => e.to_string(),
        };
        self.diagnostics.stages.push(StageRecord { stage, outcome });
        out
    }

    fn fail(&self, mut e: PipelineError) -> PipelineError {
        e.diagnostics = Box::new(self.diagnostics.clone());
        e
    }
}

impl<B: LlmBackend> Pipeline<B> {
    pub fn new(backend: B, templates: PromptTemplates, config: PipelineConfig) -> Self {
        Pipeline { backend, templates, config }
    }

    pub fn templates(&self) -> &PromptTemplates {
        &self.templates
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn backend(&self) -> &B {
        &self.backend
    }

    /// extract → resolve → prompt → generate → execute → summarize.
    pub fn answer_question(
        &self,
        question: &str,
        graph: &PropertyGraph,
        index: &LinkIndex,
    ) -> Result<NlQueryResponse, PipelineError> {
        let mut rec = Recorder { diagnostics: Diagnostics::default() };
        let max_tokens = self.config.max_tokens;
        let mentions = rec
            .run(Stage::ExtractEntities, || extract_entities(question, &self.backend, &self.templates, max_tokens))
            .map_err(|e| rec.fail(e))?;
        rec.diagnostics.mentions = Some(mentions.clone());

        let resolutions =
            rec.run(Stage::ResolveEntities, || Ok(resolve_all(&mentions.mentions(), index, &self.config.linker)))?;
        rec.diagnostics.resolutions = resolutions.clone();

        let schema = graph.schema();
        let messages = rec.run(Stage::BuildGenerationPrompt, || {
            Ok(build_generation_prompt(question, &schema, &resolutions, &self.templates))
        })?;

        let generated = rec
            .run(Stage::GenerateCypher, || {
                generate_cypher(&messages, &self.backend, &schema, &self.templates, max_tokens)
            })
            .map_err(|e| {
                let mut e = rec.fail(e);
                if let PipelineErrorKind::UngeneratableQuery { attempts } = &e.kind {
                    e.diagnostics.attempts = attempts.clone();
                    e.diagnostics.repairs = attempts.len().saturating_sub(1);
                }
                e
            })?;
        rec.diagnostics.repairs = generated.repairs();
        rec.diagnostics.attempts = generated.attempts.clone();
        rec.diagnostics.validation_warnings = generated.warnings.clone();

        let result = rec
            .run(Stage::Execute, || {
                execute_with(&generated.ast, graph, &self.config.exec)
                    .map_err(|e| PipelineError::new(Stage::Execute, PipelineErrorKind::Execution(e)))
            })
            .map_err(|e| rec.fail(e))?;

        let summary = rec.run(Stage::SummarizeAnswer, || {
            if !self.config.summarize {
                return Ok(None);
            }
            Ok(Some(summarize_answer(
                question,
                &generated.text,
                &result,
                &self.backend,
                self.config.summary_row_budget,
                &self.templates,
                max_tokens,
            )))
        })?;
        let answer_text = summary.map(|s| {
            rec.diagnostics.summary_fallback = s.fallback;
            s.text
        });

        Ok(NlQueryResponse {
            question: question.to_string(),
            generated_cypher: generated.text,
            result,
            answer_text,
            diagnostics: rec.diagnostics,
        })
    }
}
