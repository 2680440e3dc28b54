use serde::{Deserialize, Serialize};

use super::backend::{ChatMessage, LlmBackend};
use super::prompts::{render, PromptTemplates};
use super::SUMMARY_TEMPERATURE;
use crate::cypher::QueryResult;

pub const DEFAULT_ROW_BUDGET: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryOutcome {
    pub text: String,
    /// True when the deterministic template replaced the model's answer.
    pub fallback: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub fn fallback_summary(result: &QueryResult) -> String {
    format!(
        "Query returned {} rows / {} nodes / {} relationships",
        result.rows.len(),
        result.subgraph.nodes.len(),
        result.subgraph.relationships.len()
    )
}

/// Summary prompt with at most `budget` rows, one compact JSON array per line.
pub fn summary_messages(
    question: &str,
    query: &str,
    result: &QueryResult,
    budget: usize,
    templates: &PromptTemplates,
) -> Vec<ChatMessage> {
    let rows: Vec<String> =
        result.rows.iter().take(budget).map(|r| serde_json::to_string(r).expect("rows always serialize")).collect();
    let notice = if result.rows.len() > budget {
        format!("Only the first {budget} of {} rows are shown; the rest were truncated.", result.rows.len())
    } else {
        String::new()
    };
    let columns = serde_json::to_string(&result.columns).expect("columns always serialize");
    let row_count = result.rows.len().to_string();
    let user = render(
        &templates.summary_user,
        &[
            ("question", question),
            ("query", query),
            ("columns", &columns),
            ("row_count", &row_count),
            ("rows", &rows.join("\n")),
            ("notice", &notice),
        ],
    );
    vec![ChatMessage::system(render(&templates.summary_system, &[])), ChatMessage::user(user)]
}

/// Never fails: backend errors or empty replies fall back to a template.
pub fn summarize_answer(
    question: &str,
    query: &str,
    result: &QueryResult,
    backend: &dyn LlmBackend,
    budget: usize,
    templates: &PromptTemplates,
    max_tokens: u32,
) -> SummaryOutcome {
    let messages = summary_messages(question, query, result, budget, templates);
    match backend.complete(&messages, SUMMARY_TEMPERATURE, max_tokens) {
        Ok(text) if !text.trim().is_empty() => {
            SummaryOutcome { text: text.trim().to_string(), fallback: false, error: None }
        }
        Ok(_) => SummaryOutcome { text: fallback_summary(result), fallback: true, error: Some("empty reply".into()) },
        Err(e) => SummaryOutcome { text: fallback_summary(result), fallback: true, error: Some(e.to_string()) },
    }
}
