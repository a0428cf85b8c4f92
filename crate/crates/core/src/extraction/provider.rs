use std::collections::BTreeMap;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::rule::rule_extract;
use crate::chunking::Chunk;
use crate::ingest::ScannerKind;
use crate::schema::{to_canonical_string, FieldMapping};

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum ProviderError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("request timed out")]
    Timeout,
    #[error("provider misconfigured: {0}")]
    Config(String),
}

impl ProviderError {
    /// Auth and configuration failures will not heal on retry.
    pub fn is_retryable(&self) -> bool {
        matches!(self, ProviderError::Transport(_) | ProviderError::Timeout)
    }
}

/// One completion request.
#[derive(Debug, Clone, Copy)]
pub struct CompletionRequest<'a> {
    pub chunk: &'a Chunk,
    pub prompt: &'a str,
    pub temperature: f64,
    /// 1-based attempt number.
    pub attempt: u32,
}

/// A text-completion backend. Implementations are shared across worker
/// threads.
pub trait Provider: Send + Sync {
    fn name(&self) -> &str;

    fn model(&self) -> &str;

    fn complete(&self, request: &CompletionRequest<'_>) -> Result<String, ProviderError>;

    /// Delay before retry number `attempt` (1-based).
    fn backoff(&self, _attempt: u32) -> Duration {
        Duration::ZERO
    }
}

/// Runs the deterministic rule extractor and replies with its records as a
/// JSON array, so rule runs go through the same reply parser as model runs.
#[derive(Debug, Clone)]
pub struct RuleProvider {
    kind: ScannerKind,
    mapping: FieldMapping,
}

impl RuleProvider {
    pub fn new(kind: ScannerKind, mapping: FieldMapping) -> Self {
        RuleProvider { kind, mapping }
    }
}

impl Provider for RuleProvider {
    fn name(&self) -> &str {
        "rule"
    }

    fn model(&self) -> &str {
        "rule-extractor"
    }

    fn complete(&self, request: &CompletionRequest<'_>) -> Result<String, ProviderError> {
        let records = rule_extract(request.chunk, self.kind, &self.mapping);
        Ok(to_canonical_string(&records))
    }
}

/// One scripted reply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MockReply {
    Text(String),
    Error { error: ProviderError },
}

/// Scripted replies keyed by chunk id; the n-th attempt on a chunk receives
/// the n-th reply of its script, and the last reply repeats once the script
/// runs out. Chunks without a script use `default`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockScript {
    #[serde(default)]
    pub default: Vec<MockReply>,
    #[serde(default)]
    pub chunks: BTreeMap<usize, Vec<MockReply>>,
}

impl MockScript {
    pub fn from_file(path: &Path) -> Result<Self, ProviderError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ProviderError::Config(format!("cannot read mock script {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| ProviderError::Config(format!("bad mock script {}: {e}", path.display())))
    }
}

#[derive(Debug, Clone)]
pub struct MockProvider {
    model: String,
    script: MockScript,
}

impl MockProvider {
    pub fn new(model: impl Into<String>, script: MockScript) -> Self {
        MockProvider {
            model: model.into(),
            script,
        }
    }

    /// Replies `text` to every request.
    pub fn constant(text: impl Into<String>) -> Self {
        MockProvider::new(
            "mock",
            MockScript {
                default: vec![MockReply::Text(text.into())],
                chunks: BTreeMap::new(),
            },
        )
    }
}

impl Provider for MockProvider {
    fn name(&self) -> &str {
        "mock"
    }

    fn model(&self) -> &str {
        &self.model
    }

    fn complete(&self, request: &CompletionRequest<'_>) -> Result<String, ProviderError> {
        let script = self
            .script
            .chunks
            .get(&request.chunk.id)
            .unwrap_or(&self.script.default);
        let idx = (request.attempt as usize).saturating_sub(1);
        match script.get(idx).or_else(|| script.last()) {
            Some(MockReply::Text(t)) => Ok(t.clone()),
            Some(MockReply::Error { error }) => Err(error.clone()),
            None => Err(ProviderError::Config(format!("no scripted reply for chunk {}", request.chunk.id))),
        }
    }
}
