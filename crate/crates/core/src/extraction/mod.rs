//! Prompting, provider dispatch and reply parsing.

mod http;
mod output;
mod prompt;
mod provider;
mod rule;

use std::path::PathBuf;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use http::HttpProvider;
pub use output::{parse_model_output, strip_fences, MalformedOutput};
pub use prompt::{
    build_prompt, corrective_suffix, field_instructions, PromptTemplate, TemplateError, BUILTIN_TEMPLATE,
    BUILTIN_TEMPLATE_VERSION,
};
pub use provider::{CompletionRequest, MockProvider, MockReply, MockScript, Provider, ProviderError, RuleProvider};
pub use rule::{record_source_fields, rule_extract};

use crate::chunking::Chunk;
use crate::ingest::ScannerKind;
use crate::schema::{FieldMapping, UnifiedVulnerability};

pub const API_KEY_ENV: &str = "VULNX_API_KEY";
pub const API_BASE_ENV: &str = "VULNX_API_BASE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    Http,
    Mock,
    Rule,
}

impl ProviderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProviderKind::Http => "http",
            ProviderKind::Mock => "mock",
            ProviderKind::Rule => "rule",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderConfig {
    pub kind: ProviderKind,
    pub model_name: String,
    pub temperature: f64,
    pub max_retries: u32,
    pub timeout_seconds: u64,
    pub endpoint: Option<String>,
    pub api_key_env: String,
    /// Scripted replies for the mock provider.
    pub mock_script: Option<PathBuf>,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig {
            kind: ProviderKind::Rule,
            model_name: "rule-extractor".into(),
            temperature: 0.2,
            max_retries: 3,
            timeout_seconds: 120,
            endpoint: None,
            api_key_env: API_KEY_ENV.into(),
            mock_script: None,
        }
    }
}

impl ProviderConfig {
    pub fn validate(&self) -> Result<(), ProviderError> {
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(ProviderError::Config(format!(
                "temperature {} outside [0.0, 2.0]",
                self.temperature
            )));
        }
        if self.timeout_seconds == 0 {
            return Err(ProviderError::Config("timeout_seconds must be positive".into()));
        }
        match (self.kind, &self.endpoint) {
            (ProviderKind::Http, None) => Err(ProviderError::Config(format!(
                "the http provider needs an endpoint (flag or {API_BASE_ENV})"
            ))),
            (ProviderKind::Mock | ProviderKind::Rule, Some(_)) => Err(ProviderError::Config(format!(
                "an endpoint only applies to the http provider, not {}",
                self.kind.as_str()
            ))),
            _ => Ok(()),
        }
    }

    /// Applies the endpoint override from the environment for http runs.
    pub fn with_env_endpoint(mut self) -> Self {
        if self.kind == ProviderKind::Http {
            if let Ok(base) = std::env::var(API_BASE_ENV) {
                if !base.trim().is_empty() {
                    self.endpoint = Some(base.trim().to_string());
                }
            }
        }
        self
    }
}

/// Instantiates the configured provider.
pub fn build_provider(
    cfg: &ProviderConfig,
    kind: ScannerKind,
    mapping: &FieldMapping,
) -> Result<Box<dyn Provider>, ProviderError> {
    cfg.validate()?;
    Ok(match cfg.kind {
        ProviderKind::Rule => Box::new(RuleProvider::new(kind, mapping.clone())),
        ProviderKind::Mock => {
            let script = match &cfg.mock_script {
                Some(path) => MockScript::from_file(path)?,
                None => return Err(ProviderError::Config("the mock provider needs a script".into())),
            };
            Box::new(MockProvider::new(cfg.model_name.clone(), script))
        }
        ProviderKind::Http => {
            let endpoint = cfg.endpoint.as_deref().unwrap_or_default();
            let key = std::env::var(&cfg.api_key_env).ok();
            if key.is_none() {
                log::warn!("{} is not set; sending requests without credentials", cfg.api_key_env);
            }
            Box::new(HttpProvider::new(
                endpoint,
                cfg.model_name.clone(),
                key,
                Duration::from_secs(cfg.timeout_seconds),
            )?)
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionResult {
    pub chunk_id: usize,
    pub provider: String,
    pub model: String,
    pub candidates: Vec<UnifiedVulnerability>,
    pub raw_response: String,
    pub attempts: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FailureCause {
    #[error("{error}")]
    Provider { error: ProviderError },
    #[error("malformed output: {message}")]
    MalformedOutput { message: String },
}

/// A chunk whose extraction gave up.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("chunk {chunk_id} failed after {attempts} attempt(s): {cause}")]
pub struct ChunkFailure {
    pub chunk_id: usize,
    pub attempts: u32,
    pub cause: FailureCause,
    pub last_response: Option<String>,
}

/// Sends one chunk's prompt, retrying malformed replies with a corrective
/// instruction and transient failures after the provider's backoff.
pub fn extract_chunk(
    provider: &dyn Provider,
    chunk: &Chunk,
    kind: ScannerKind,
    prompt: &str,
    cfg: &ProviderConfig,
) -> Result<ExtractionResult, ChunkFailure> {
    let max_attempts = cfg.max_retries + 1;
    let mut current_prompt = prompt.to_string();
    let mut last_response = None;
    let mut attempt = 1;
    loop {
        let request = CompletionRequest {
            chunk,
            prompt: &current_prompt,
            temperature: cfg.temperature,
            attempt,
        };
        let fail = |cause, last_response| ChunkFailure {
            chunk_id: chunk.id,
            attempts: attempt,
            cause,
            last_response,
        };
        match provider.complete(&request) {
            Ok(text) => match parse_model_output(&text, kind) {
                Ok(mut candidates) => {
                    for (i, c) in candidates.iter_mut().enumerate() {
                        c.scanner = kind;
                        if c.id.is_empty() {
                            c.id = format!("{kind}-c{}.{i}", chunk.id);
                        }
                    }
                    return Ok(ExtractionResult {
                        chunk_id: chunk.id,
                        provider: provider.name().to_string(),
                        model: provider.model().to_string(),
                        candidates,
                        raw_response: text,
                        attempts: attempt,
                    });
                }
                Err(e) => {
                    log::debug!("chunk {} attempt {attempt}: {e}", chunk.id);
                    if attempt >= max_attempts {
                        return Err(fail(FailureCause::MalformedOutput { message: e.to_string() }, Some(text)));
                    }
                    current_prompt = format!("{prompt}{}", corrective_suffix(&e.to_string()));
                    last_response = Some(text);
                }
            },
            Err(error) => {
                log::debug!("chunk {} attempt {attempt}: {error}", chunk.id);
                if !error.is_retryable() || attempt >= max_attempts {
                    return Err(fail(FailureCause::Provider { error }, last_response));
                }
                std::thread::sleep(provider.backoff(attempt));
            }
        }
        attempt += 1;
    }
}

pub type ChunkOutcome = Result<ExtractionResult, ChunkFailure>;

/// Extracts every chunk on a pool of `parallelism` workers. Outcomes are
/// returned in chunk id order whatever the completion order.
pub fn extract_all(
    provider: &dyn Provider,
    chunks: &[Chunk],
    kind: ScannerKind,
    mapping: &FieldMapping,
    tmpl: &PromptTemplate,
    cfg: &ProviderConfig,
    parallelism: usize,
) -> Result<Vec<ChunkOutcome>, TemplateError> {
    use rayon::prelude::*;

    let prompts = chunks
        .iter()
        .map(|c| build_prompt(c, kind, mapping, tmpl))
        .collect::<Result<Vec<_>, _>>()?;
    let run = || -> Vec<ChunkOutcome> {
        chunks
            .par_iter()
            .zip(prompts.par_iter())
            .map(|(chunk, prompt)| extract_chunk(provider, chunk, kind, prompt, cfg))
            .collect()
    };
    let mut outcomes = match rayon::ThreadPoolBuilder::new().num_threads(parallelism.max(1)).build() {
        Ok(pool) => pool.install(run),
        Err(e) => {
            log::warn!("cannot start worker pool ({e}); extracting sequentially");
            chunks
                .iter()
                .zip(&prompts)
                .map(|(chunk, prompt)| extract_chunk(provider, chunk, kind, prompt, cfg))
                .collect()
        }
    };
    outcomes.sort_by_key(|o| match o {
        Ok(r) => r.chunk_id,
        Err(f) => f.chunk_id,
    });
    Ok(outcomes)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;
    use std::sync::atomic::{AtomicU32, Ordering};

    use super::*;
    use crate::schema::default_mapping;

    fn chunk(id: usize) -> Chunk {
        Chunk {
            id,
            record_indices: vec![id],
            text: format!("NVT: finding {id}\nSummary\nText.\n"),
            char_length: 0,
            continuation_of: None,
            overlap_chars: 0,
            start: 0,
            end: 0,
        }
    }

    fn mock(replies: Vec<MockReply>) -> MockProvider {
        MockProvider::new(
            "m",
            MockScript {
                default: replies,
                chunks: BTreeMap::new(),
            },
        )
    }

    #[test]
    fn two_records_one_attempt() {
        let p = MockProvider::constant(r#"[{"name": "a"}, {"name": "b"}]"#);
        let r = extract_chunk(&p, &chunk(3), ScannerKind::OpenVas, "p", &ProviderConfig::default()).unwrap();
        assert_eq!(r.candidates.len(), 2);
        assert_eq!(r.attempts, 1);
        assert_eq!(r.candidates[1].id, "openvas-c3.1");
    }

    #[test]
    fn malformed_twice_then_valid() {
        let p = mock(vec![
            MockReply::Text("sorry".into()),
            MockReply::Text("{".into()),
            MockReply::Text("[]".into()),
        ]);
        let r = extract_chunk(&p, &chunk(0), ScannerKind::OpenVas, "p", &ProviderConfig::default()).unwrap();
        assert_eq!(r.attempts, 3);
    }

    #[test]
    fn malformed_exhausts_retries() {
        let p = MockProvider::constant("no json here");
        let cfg = ProviderConfig {
            max_retries: 2,
            ..Default::default()
        };
        let f = extract_chunk(&p, &chunk(0), ScannerKind::OpenVas, "p", &cfg).unwrap_err();
        assert_eq!(f.attempts, 3);
        assert!(matches!(f.cause, FailureCause::MalformedOutput { .. }));
        assert_eq!(f.last_response.as_deref(), Some("no json here"));
    }

    struct Recording {
        prompts: std::sync::Mutex<Vec<String>>,
        calls: AtomicU32,
    }

    impl Provider for Recording {
        fn name(&self) -> &str {
            "rec"
        }
        fn model(&self) -> &str {
            "rec"
        }
        fn complete(&self, r: &CompletionRequest<'_>) -> Result<String, ProviderError> {
            self.prompts.lock().unwrap().push(r.prompt.to_string());
            match self.calls.fetch_add(1, Ordering::SeqCst) {
                0 => Ok("oops".into()),
                _ => Ok("[]".into()),
            }
        }
    }

    #[test]
    fn retry_appends_corrective_instruction() {
        let p = Recording {
            prompts: Default::default(),
            calls: AtomicU32::new(0),
        };
        extract_chunk(&p, &chunk(0), ScannerKind::OpenVas, "BASE", &ProviderConfig::default()).unwrap();
        let prompts = p.prompts.lock().unwrap();
        assert_eq!(prompts[0], "BASE");
        assert!(prompts[1].starts_with("BASE\n\nYour previous reply could not be parsed"));
    }

    #[test]
    fn auth_is_not_retried() {
        let p = mock(vec![MockReply::Error {
            error: ProviderError::Auth("401".into()),
        }]);
        let f = extract_chunk(&p, &chunk(0), ScannerKind::OpenVas, "p", &ProviderConfig::default()).unwrap_err();
        assert_eq!(f.attempts, 1);
    }

    #[test]
    fn transport_errors_are_retried() {
        let p = mock(vec![
            MockReply::Error {
                error: ProviderError::Timeout,
            },
            MockReply::Text("[]".into()),
        ]);
        let r = extract_chunk(&p, &chunk(0), ScannerKind::OpenVas, "p", &ProviderConfig::default()).unwrap();
        assert_eq!(r.attempts, 2);
    }

    #[test]
    fn failures_are_isolated_and_ordered() {
        let mut chunks_script = BTreeMap::new();
        chunks_script.insert(
            2,
            vec![MockReply::Error {
                error: ProviderError::Auth("denied".into()),
            }],
        );
        let p = MockProvider::new(
            "m",
            MockScript {
                default: vec![MockReply::Text("[{\"name\": \"x\"}]".into())],
                chunks: chunks_script,
            },
        );
        let chunks: Vec<Chunk> = (0..6).map(chunk).collect();
        let m = default_mapping(ScannerKind::OpenVas).unwrap();
        let out = extract_all(
            &p,
            &chunks,
            ScannerKind::OpenVas,
            &m,
            &PromptTemplate::builtin(),
            &ProviderConfig::default(),
            3,
        )
        .unwrap();
        let ids: Vec<usize> = out.iter().map(|o| o.as_ref().map_or_else(|f| f.chunk_id, |r| r.chunk_id)).collect();
        assert_eq!(ids, vec![0, 1, 2, 3, 4, 5]);
        assert!(out[2].is_err());
        assert_eq!(out.iter().filter(|o| o.is_ok()).count(), 5);
    }

    #[test]
    fn config_validation() {
        let mut cfg = ProviderConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.temperature = 2.5;
        assert!(cfg.validate().is_err());
        cfg.temperature = 0.2;
        cfg.kind = ProviderKind::Http;
        assert!(cfg.validate().is_err());
        cfg.endpoint = Some("http://127.0.0.1:9".into());
        assert!(cfg.validate().is_ok());
    }
}
