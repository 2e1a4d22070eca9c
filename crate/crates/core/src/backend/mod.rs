//! Chat-model access: request type, backends (HTTP and scripted replay),
//! reply parsing, prompt construction and the observation summarizer.

mod decision;
mod http;
mod prompt;
mod replay;
mod summarize;

pub use decision::{format_decision, parse_decision, AgentDecision};
pub use http::{HttpBackend, HttpConfig};
pub use prompt::{build_prompt, prompt_header, PromptLayout, OURS_NOTE};
pub use replay::{parse_script, ReplayBackend, SCRIPT_SEPARATOR};
pub use summarize::{summarization_prompt, summarize, SummaryResult, DEFAULT_SUMMARY_EXAMPLE, SUMMARY_INSTRUCTIONS};

use thiserror::Error;

/// One chat-completion call.
#[derive(Debug, Clone, PartialEq)]
pub struct ChatRequest {
    pub system_text: Option<String>,
    pub user_text: String,
    pub temperature: f64,
    pub top_p: f64,
    pub max_output_tokens: u32,
}

impl ChatRequest {
    pub const DEFAULT_MAX_OUTPUT_TOKENS: u32 = 256;

    /// Greedy decoding: temperature 0, top-p 1.
    pub fn new(user_text: impl Into<String>) -> Self {
        Self {
            system_text: None,
            user_text: user_text.into(),
            temperature: 0.0,
            top_p: 1.0,
            max_output_tokens: Self::DEFAULT_MAX_OUTPUT_TOKENS,
        }
    }

    pub fn validate(&self) -> Result<(), BackendError> {
        if !(self.temperature >= 0.0) {
            return Err(BackendError::InvalidRequest(format!(
                "temperature must be >= 0, got {}",
                self.temperature
            )));
        }
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return Err(BackendError::InvalidRequest(format!(
                "top_p must be in (0, 1], got {}",
                self.top_p
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BackendError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("replay script exhausted after {0} responses")]
    ScriptExhausted(usize),
    #[error("malformed response: {0}")]
    ResponseMalformed(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("request budget of {0} exhausted")]
    BudgetExhausted(u64),
    #[error("summarizer returned no text")]
    EmptySummary,
}

/// A chat model. Implementations must tolerate concurrent `complete` calls.
pub trait ChatBackend: Send + Sync {
    fn complete(&self, request: &ChatRequest) -> Result<String, BackendError>;

    /// Short description for run manifests, e.g. `http:gpt-4-turbo@host`.
    fn identity(&self) -> String;
}

impl<T: ChatBackend + ?Sized> ChatBackend for std::sync::Arc<T> {
    fn complete(&self, request: &ChatRequest) -> Result<String, BackendError> {
        (**self).complete(request)
    }

    fn identity(&self) -> String {
        (**self).identity()
    }
}

impl<T: ChatBackend + ?Sized> ChatBackend for Box<T> {
    fn complete(&self, request: &ChatRequest) -> Result<String, BackendError> {
        (**self).complete(request)
    }

    fn identity(&self) -> String {
        (**self).identity()
    }
}
