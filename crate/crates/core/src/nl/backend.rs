use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        ChatMessage { role: "system".into(), content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage { role: "user".into(), content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        ChatMessage { role: "assistant".into(), content: content.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BackendError {
    #[error("backend request failed: {0}")]
    Transport(String),
    #[error("backend returned HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("backend response has no choices[0].message.content")]
    MissingContent,
    #[error("no mock fixture for fingerprint {0}")]
    UnknownFingerprint(String),
}

/// Chat-completion contract. Implementations keep no state between calls.
pub trait LlmBackend: Send + Sync {
    fn complete(&self, messages: &[ChatMessage], temperature: f32, max_tokens: u32) -> Result<String, BackendError>;
}

impl<B: LlmBackend + ?Sized> LlmBackend for std::sync::Arc<B> {
    fn complete(&self, messages: &[ChatMessage], temperature: f32, max_tokens: u32) -> Result<String, BackendError> {
        (**self).complete(messages, temperature, max_tokens)
    }
}

/// SHA-256 (hex) of the concatenated message contents.
pub fn fingerprint(messages: &[ChatMessage]) -> String {
    let mut hasher = Sha256::new();
    for m in messages {
        hasher.update(m.content.as_bytes());
    }
    hex::encode(hasher.finalize())
}

/// OpenAI-style chat-completion endpoint over blocking HTTP.
pub struct HttpBackend {
    client: reqwest::blocking::Client,
    url: String,
    model: String,
    api_key: Option<String>,
}

impl HttpBackend {
    pub fn new(
        url: impl Into<String>,
        model: impl Into<String>,
        api_key: Option<String>,
        timeout: Duration,
    ) -> Result<Self, BackendError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        Ok(HttpBackend { client, url: url.into(), model: model.into(), api_key })
    }
}

#[derive(Serialize)]
struct CompletionRequest<'a> {
    model: &'a str,
    messages: &'a [ChatMessage],
    temperature: f32,
    max_tokens: u32,
}

impl LlmBackend for HttpBackend {
    fn complete(&self, messages: &[ChatMessage], temperature: f32, max_tokens: u32) -> Result<String, BackendError> {
        let body = CompletionRequest { model: &self.model, messages, temperature, max_tokens };
        let mut request = self.client.post(&self.url).json(&body);
        if let Some(key) = &self.api_key {
            request = request.bearer_auth(key);
        }
        let response = request.send().map_err(|e| BackendError::Transport(e.to_string()))?;
        let status = response.status();
        let text = response.text().map_err(|e| BackendError::Transport(e.to_string()))?;
        if !status.is_success() {
            return Err(BackendError::Status { status: status.as_u16(), body: text });
        }
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| BackendError::Transport(format!("invalid JSON body: {e}")))?;
        value
            .pointer("/choices/0/message/content")
            .and_then(|c| c.as_str())
            .map(str::to_string)
            .ok_or(BackendError::MissingContent)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureEntry {
    pub fingerprint: String,
    /// Free-form note saying which prompt this answers.
    #[serde(default)]
    pub label: String,
    pub response: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureFile {
    pub entries: Vec<FixtureEntry>,
}

/// Deterministic backend answering from canned responses keyed by
/// [`fingerprint`]. Unknown prompts are an error, never a guess.
#[derive(Debug, Clone, Default)]
pub struct MockLlm {
    responses: BTreeMap<String, String>,
}

impl MockLlm {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, fingerprint: impl Into<String>, response: impl Into<String>) {
        self.responses.insert(fingerprint.into(), response.into());
    }

    /// Answers `messages` with `response`.
    pub fn respond_to(&mut self, messages: &[ChatMessage], response: impl Into<String>) {
        self.insert(fingerprint(messages), response);
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }

    /// Loads every `*.json` fixture file in `dir`, in file-name order.
    pub fn from_dir(dir: &Path) -> Result<Self, String> {
        let mut paths: Vec<_> = fs::read_dir(dir)
            .map_err(|e| format!("cannot read fixture dir {}: {e}", dir.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        let mut mock = MockLlm::new();
        for path in paths {
            let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            let file: FixtureFile = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            for entry in file.entries {
                if let Some(prev) = mock.responses.get(&entry.fingerprint) {
                    if *prev != entry.response {
                        return Err(format!("{}: conflicting responses for {}", path.display(), entry.fingerprint));
                    }
                }
                mock.insert(entry.fingerprint, entry.response);
            }
        }
        Ok(mock)
    }
}

impl LlmBackend for MockLlm {
    fn complete(&self, messages: &[ChatMessage], _temperature: f32, _max_tokens: u32) -> Result<String, BackendError> {
        let fp = fingerprint(messages);
        self.responses.get(&fp).cloned().ok_or(BackendError::UnknownFingerprint(fp))
    }
}

/// Backend defined by a closure; handy for scripted tests and recorders.
pub struct FnBackend<F>(pub F);

impl<F> LlmBackend for FnBackend<F>
where
    F: Fn(&[ChatMessage]) -> Result<String, BackendError> + Send + Sync,
{
    fn complete(&self, messages: &[ChatMessage], _temperature: f32, _max_tokens: u32) -> Result<String, BackendError> {
        (self.0)(messages)
    }
}

/// Caps the number of calls in flight against the wrapped backend.
pub struct Limited<B> {
    inner: B,
    max: usize,
    in_flight: Mutex<usize>,
    freed: Condvar,
}

impl<B> Limited<B> {
    pub fn new(inner: B, max_concurrent: usize) -> Self {
        Limited { inner, max: max_concurrent.max(1), in_flight: Mutex::new(0), freed: Condvar::new() }
    }
}

struct Permit<'a, B>(&'a Limited<B>);

impl<B> Drop for Permit<'_, B> {
    fn drop(&mut self) {
        let mut n = self.0.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        *n -= 1;
        self.0.freed.notify_one();
    }
}

impl<B: LlmBackend> LlmBackend for Limited<B> {
    fn complete(&self, messages: &[ChatMessage], temperature: f32, max_tokens: u32) -> Result<String, BackendError> {
        let _permit = {
            let mut n = self.in_flight.lock().unwrap_or_else(|e| e.into_inner());
            while *n >= self.max {
                n = self.freed.wait(n).unwrap_or_else(|e| e.into_inner());
            }
            *n += 1;
            Permit(self)
        };
        self.inner.complete(messages, temperature, max_tokens)
    }
}

#[cfg(test)]
mod tests {
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    use super::*;

    #[test]
    fn mock_answers_known_prompts_only() {
        let msgs = vec![ChatMessage::system("s"), ChatMessage::user("q")];
        let mut mock = MockLlm::new();
        mock.respond_to(&msgs, "hi");
        assert_eq!(mock.complete(&msgs, 0.0, 10).unwrap(), "hi");
        let other = vec![ChatMessage::user("q2")];
        assert!(matches!(mock.complete(&other, 0.0, 10), Err(BackendError::UnknownFingerprint(_))));
    }

    #[test]
    fn fingerprint_covers_contents_only() {
        let a = fingerprint(&[ChatMessage::system("ab")]);
        assert_eq!(a, fingerprint(&[ChatMessage::user("a"), ChatMessage::user("b")]));
        assert_ne!(a, fingerprint(&[ChatMessage::user("ba")]));
    }

    #[test]
    fn limiter_caps_concurrency() {
        let current = Arc::new(AtomicUsize::new(0));
        let peak = Arc::new(AtomicUsize::new(0));
        let (c, p) = (current.clone(), peak.clone());
        let backend = Arc::new(Limited::new(
            FnBackend(move |_: &[ChatMessage]| {
                let now = c.fetch_add(1, Ordering::SeqCst) + 1;
                p.fetch_max(now, Ordering::SeqCst);
                std::thread::sleep(Duration::from_millis(5));
                c.fetch_sub(1, Ordering::SeqCst);
                Ok(String::new())
            }),
            2,
        ));
        let handles: Vec<_> = (0..8)
            .map(|_| {
                let b = backend.clone();
                std::thread::spawn(move || b.complete(&[], 0.0, 1).unwrap())
            })
            .collect();
        for h in handles {
            h.join().unwrap();
        }
        assert!(peak.load(Ordering::SeqCst) <= 2);
    }
}
