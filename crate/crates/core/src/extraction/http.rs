//! Chat-completions client.

use std::time::Duration;

use reqwest::blocking::Client;
use reqwest::StatusCode;
use serde::{Deserialize, Serialize};

use super::provider::{CompletionRequest, Provider, ProviderError};

const SYSTEM_PROMPT: &str =
    "You extract vulnerability findings from scanner reports into JSON. You never invent values.";

#[derive(Debug, Serialize)]
struct Message<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Debug, Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    temperature: f64,
    messages: Vec<Message<'a>>,
}

#[derive(Debug, Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Debug, Deserialize)]
struct Choice {
    #[serde(default)]
    message: Option<ChoiceMessage>,
    #[serde(default)]
    text: Option<String>,
}

#[derive(Debug, Deserialize)]
struct ChoiceMessage {
    #[serde(default)]
    content: Option<String>,
}

#[derive(Debug, Clone)]
pub struct HttpProvider {
    client: Client,
    url: String,
    model: String,
    api_key: Option<String>,
    base_backoff: Duration,
}

impl HttpProvider {
    /// `endpoint` is an API base such as `https://api.example.com/v1`; the
    /// `/chat/completions` path is appended unless already present.
    pub fn new(
        endpoint: &str,
        model: impl Into<String>,
        api_key: Option<String>,
        timeout: Duration,
    ) -> Result<Self, ProviderError> {
        let client = Client::builder()
            .timeout(timeout)
            .user_agent(crate::TOOL_VERSION)
            .build()
            .map_err(|e| ProviderError::Config(e.to_string()))?;
        let base = endpoint.trim_end_matches('/');
        let url = if base.ends_with("/chat/completions") {
            base.to_string()
        } else {
            format!("{base}/chat/completions")
        };
        Ok(HttpProvider {
            client,
            url,
            model: model.into(),
            api_key: api_key.filter(|k| !k.is_empty()),
            base_backoff: Duration::from_millis(250),
        })
    }

    pub fn with_backoff(mut self, base: Duration) -> Self {
        self.base_backoff = base;
        self
    }

    pub fn url(&self) -> &str {
        &self.url
    }
}

impl Provider for HttpProvider {
    fn name(&self) -> &str {
        "http"
    }

    fn model(&self) -> &str {
        &self.model
    }

    fn complete(&self, request: &CompletionRequest<'_>) -> Result<String, ProviderError> {
        let body = ChatRequest {
            model: &self.model,
            temperature: request.temperature,
            messages: vec![
                Message {
                    role: "system",
                    content: SYSTEM_PROMPT,
                },
                Message {
                    role: "user",
                    content: request.prompt,
                },
            ],
        };
        let mut req = self.client.post(&self.url).json(&body);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| {
            if e.is_timeout() {
                ProviderError::Timeout
            } else {
                ProviderError::Transport(e.to_string())
            }
        })?;
        let status = resp.status();
        if status == StatusCode::UNAUTHORIZED || status == StatusCode::FORBIDDEN {
            return Err(ProviderError::Auth(format!("HTTP {status}")));
        }
        if !status.is_success() {
            let detail = resp.text().unwrap_or_default();
            let detail: String = detail.chars().take(200).collect();
            return Err(ProviderError::Transport(format!("HTTP {status}: {detail}")));
        }
        let parsed: ChatResponse = resp
            .json()
            .map_err(|e| ProviderError::Transport(format!("unexpected response shape: {e}")))?;
        let first = parsed
            .choices
            .into_iter()
            .next()
            .ok_or_else(|| ProviderError::Transport("response has no choices".into()))?;
        first
            .message
            .and_then(|m| m.content)
            .or(first.text)
            .ok_or_else(|| ProviderError::Transport("first choice has no text content".into()))
    }

    fn backoff(&self, attempt: u32) -> Duration {
        self.base_backoff * 2u32.saturating_pow(attempt.saturating_sub(1).min(6))
    }
}
