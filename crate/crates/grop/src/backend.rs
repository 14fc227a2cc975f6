//! Language-model backends that need `std`: an OpenAI-compatible completions
//! client and constructors for every backend kind.

use std::path::Path;
use std::time::Duration;

use grop_core::oracle::{BackendKind, LanguageModel, OracleConfig, OracleError, Query, ReplayBackend, StaticBackend};
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::fixtures;
use crate::io::{self, IoError};

pub const DEFAULT_URL: &str = "https://api.openai.com/v1/completions";
pub const API_KEY_VAR: &str = "ORACLE_API_KEY";
pub const API_URL_VAR: &str = "ORACLE_API_URL";

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("{API_KEY_VAR} is not set")]
    MissingKey,
    #[error("replay backend needs a response file")]
    MissingReplay,
    #[error(transparent)]
    Io(#[from] IoError),
}

#[derive(Serialize)]
struct CompletionRequest<'a> {
    model: &'a str,
    prompt: &'a str,
    temperature: f64,
    top_p: f64,
    max_tokens: u32,
    frequency_penalty: f64,
    presence_penalty: f64,
}

/// Blocking client for `POST /v1/completions`-shaped endpoints.
pub struct HttpBackend {
    agent: ureq::Agent,
    url: String,
    key: Option<String>,
    config: OracleConfig,
}

impl HttpBackend {
    pub fn new(url: impl Into<String>, key: Option<String>, config: OracleConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs_f64(config.timeout_secs.max(0.001))))
            .http_status_as_error(false)
            .build()
            .into();
        Self { agent, url: url.into(), key, config }
    }

    /// Endpoint from `ORACLE_API_URL` (default OpenAI), key from
    /// `ORACLE_API_KEY`.
    pub fn from_env(config: OracleConfig) -> Result<Self, BackendError> {
        let key = std::env::var(API_KEY_VAR).map_err(|_| BackendError::MissingKey)?;
        let url = std::env::var(API_URL_VAR).unwrap_or_else(|_| DEFAULT_URL.into());
        Ok(Self::new(url, Some(key), config))
    }
}

/// Text of the first choice of a completions or chat-completions response.
pub fn completion_text(body: &Value) -> Option<&str> {
    let choice = body.get("choices")?.get(0)?;
    choice.get("text").and_then(Value::as_str).or_else(|| choice.get("message")?.get("content")?.as_str())
}

impl LanguageModel for HttpBackend {
    fn complete(&mut self, _query: Query<'_>, prompt: &str) -> Result<String, OracleError> {
        let c = &self.config;
        let body = CompletionRequest {
            model: &c.model,
            prompt,
            temperature: c.temperature,
            top_p: c.top_p,
            max_tokens: c.max_length,
            frequency_penalty: c.frequency_penalty,
            presence_penalty: c.presence_penalty,
        };
        let mut req = self.agent.post(&self.url);
        if let Some(key) = &self.key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = req.send_json(&body).map_err(|e| OracleError::Backend(e.to_string()))?;
        let status = resp.status();
        let text = resp.body_mut().read_to_string().map_err(|e| OracleError::Backend(e.to_string()))?;
        if !status.is_success() {
            return Err(OracleError::Backend(format!("HTTP {}: {}", status.as_u16(), text.trim())));
        }
        let v: Value = serde_json::from_str(&text).map_err(|e| OracleError::Backend(e.to_string()))?;
        completion_text(&v)
            .map(|t| t.trim().to_string())
            .ok_or_else(|| OracleError::Backend("response has no completion text".into()))
    }
}

/// Backend for `kind`. `fixture` is the replay file for `Replay` and an
/// optional static table override for `Static`.
pub fn make_backend(
    kind: BackendKind,
    config: &OracleConfig,
    fixture: Option<&Path>,
) -> Result<Box<dyn LanguageModel + Send>, BackendError> {
    Ok(match kind {
        BackendKind::Static => match fixture {
            Some(p) => Box::new(StaticBackend::new(io::read_static_table(p)?)),
            None => Box::new(fixtures::static_backend()),
        },
        BackendKind::Replay => {
            let p = fixture.ok_or(BackendError::MissingReplay)?;
            Box::new(ReplayBackend::new(io::read_replay(p)?))
        }
        BackendKind::Http => Box::new(HttpBackend::from_env(config.clone())?),
    })
}
