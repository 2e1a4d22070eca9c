//! OpenAI-compatible chat-completions client (blocking).

use std::collections::VecDeque;
use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{BackendError, ChatBackend, ChatRequest};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HttpConfig {
    /// Full URL of the chat-completions endpoint.
    pub endpoint_url: String,
    pub model_name: String,
    /// Never serialized; supplied from the environment.
    #[serde(skip)]
    pub api_key: Option<String>,
    pub max_retries: u32,
    pub rpm_limit: Option<u32>,
    pub max_in_flight: usize,
    pub timeout_secs: u64,
    pub backoff_base_ms: u64,
    pub backoff_cap_ms: u64,
    /// Hard ceiling on requests sent by this backend instance.
    pub max_total_requests: Option<u64>,
}

impl Default for HttpConfig {
    fn default() -> Self {
        Self {
            endpoint_url: "https://api.openai.com/v1/chat/completions".into(),
            model_name: "gpt-4-turbo".into(),
            api_key: None,
            max_retries: 5,
            rpm_limit: None,
            max_in_flight: 4,
            timeout_secs: 120,
            backoff_base_ms: 500,
            backoff_cap_ms: 30_000,
            max_total_requests: None,
        }
    }
}

/// Counting semaphore for the in-flight limit.
#[derive(Debug)]
struct Gate {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Gate {
    fn acquire(&self) -> GateGuard<'_> {
        let mut free = self.free.lock().unwrap();
        while *free == 0 {
            free = self.cv.wait(free).unwrap();
        }
        *free -= 1;
        GateGuard(self)
    }
}

struct GateGuard<'a>(&'a Gate);

impl Drop for GateGuard<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap() += 1;
        self.0.cv.notify_one();
    }
}

#[derive(Debug)]
pub struct HttpBackend {
    config: HttpConfig,
    agent: ureq::Agent,
    gate: Gate,
    /// Send times within the last minute, for the rpm limit.
    window: Mutex<VecDeque<Instant>>,
    sent: Mutex<u64>,
}

enum Attempt {
    Done(String),
    Retry(BackendError, Option<Duration>),
    Fatal(BackendError),
}

impl HttpBackend {
    pub fn new(config: HttpConfig) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(config.timeout_secs.max(1))))
            .http_status_as_error(false)
            .build()
            .into();
        let gate = Gate {
            free: Mutex::new(config.max_in_flight.max(1)),
            cv: Condvar::new(),
        };
        Self {
            config,
            agent,
            gate,
            window: Mutex::new(VecDeque::new()),
            sent: Mutex::new(0),
        }
    }

    pub fn config(&self) -> &HttpConfig {
        &self.config
    }

    /// Requests actually put on the wire, including retries.
    pub fn requests_sent(&self) -> u64 {
        *self.sent.lock().unwrap()
    }

    fn body(&self, request: &ChatRequest) -> Value {
        let mut messages = Vec::new();
        if let Some(sys) = &request.system_text {
            messages.push(json!({"role": "system", "content": sys}));
        }
        messages.push(json!({"role": "user", "content": request.user_text}));
        json!({
            "model": self.config.model_name,
            "messages": messages,
            "temperature": request.temperature,
            "top_p": request.top_p,
            "max_tokens": request.max_output_tokens,
        })
    }

    fn reserve(&self) -> Result<(), BackendError> {
        let mut sent = self.sent.lock().unwrap();
        if let Some(cap) = self.config.max_total_requests {
            if *sent >= cap {
                return Err(BackendError::BudgetExhausted(cap));
            }
        }
        *sent += 1;
        Ok(())
    }

    fn wait_for_rate(&self) {
        let Some(rpm) = self.config.rpm_limit.filter(|&r| r > 0) else {
            return;
        };
        let minute = Duration::from_secs(60);
        loop {
            let mut w = self.window.lock().unwrap();
            let now = Instant::now();
            while w.front().is_some_and(|t| now.duration_since(*t) >= minute) {
                w.pop_front();
            }
            if w.len() < rpm as usize {
                w.push_back(now);
                return;
            }
            let wait = minute - now.duration_since(*w.front().unwrap());
            drop(w);
            thread::sleep(wait);
        }
    }

    fn backoff(&self, attempt: u32) -> Duration {
        let ms = self
            .config
            .backoff_base_ms
            .saturating_mul(1u64 << attempt.min(20))
            .min(self.config.backoff_cap_ms);
        Duration::from_millis(ms)
    }

    fn attempt(&self, body: &Value) -> Attempt {
        let mut req = self.agent.post(&self.config.endpoint_url);
        if let Some(key) = &self.config.api_key {
            req = req.header("Authorization", format!("Bearer {key}"));
        }
        let mut resp = match req.send_json(body) {
            Ok(r) => r,
            Err(e) => return Attempt::Retry(BackendError::Transport(e.to_string()), None),
        };
        let status = resp.status().as_u16();
        let retry_after = resp
            .headers()
            .get("retry-after")
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.trim().parse::<u64>().ok())
            .map(Duration::from_secs);
        let text = match resp.body_mut().read_to_string() {
            Ok(t) => t,
            Err(e) => return Attempt::Retry(BackendError::Transport(e.to_string()), None),
        };
        match status {
            200..=299 => match extract_content(&text) {
                Ok(content) => Attempt::Done(content),
                Err(e) => Attempt::Fatal(e),
            },
            401 | 403 => Attempt::Fatal(BackendError::Auth(format!("HTTP {status}: {}", snippet(&text)))),
            408 | 409 | 429 | 500..=599 => Attempt::Retry(
                BackendError::Transport(format!("HTTP {status}: {}", snippet(&text))),
                retry_after,
            ),
            _ => Attempt::Fatal(BackendError::InvalidRequest(format!(
                "HTTP {status}: {}",
                snippet(&text)
            ))),
        }
    }
}

fn snippet(text: &str) -> String {
    text.chars().take(200).collect()
}

fn extract_content(text: &str) -> Result<String, BackendError> {
    let v: Value =
        serde_json::from_str(text).map_err(|e| BackendError::ResponseMalformed(format!("invalid JSON: {e}")))?;
    v.pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| BackendError::ResponseMalformed("missing choices[0].message.content".into()))
}

impl ChatBackend for HttpBackend {
    fn complete(&self, request: &ChatRequest) -> Result<String, BackendError> {
        request.validate()?;
        let body = self.body(request);
        let _slot = self.gate.acquire();
        let mut attempt = 0;
        loop {
            self.reserve()?;
            self.wait_for_rate();
            match self.attempt(&body) {
                Attempt::Done(text) => return Ok(text),
                Attempt::Fatal(e) => return Err(e),
                Attempt::Retry(e, after) => {
                    if attempt >= self.config.max_retries {
                        return Err(e);
                    }
                    thread::sleep(after.unwrap_or_else(|| self.backoff(attempt)));
                    attempt += 1;
                }
            }
        }
    }

    fn identity(&self) -> String {
        format!("http:{}@{}", self.config.model_name, self.config.endpoint_url)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backoff_doubles_and_caps() {
        let b = HttpBackend::new(HttpConfig {
            backoff_base_ms: 100,
            backoff_cap_ms: 1000,
            ..HttpConfig::default()
        });
        let ms: Vec<u128> = (0..6).map(|a| b.backoff(a).as_millis()).collect();
        assert_eq!(ms, [100, 200, 400, 800, 1000, 1000]);
    }

    #[test]
    fn content_extraction() {
        let ok = r#"{"choices":[{"message":{"role":"assistant","content":"Action: Open boot."}}]}"#;
        assert_eq!(extract_content(ok).unwrap(), "Action: Open boot.");
        assert!(matches!(extract_content("{}"), Err(BackendError::ResponseMalformed(_))));
        assert!(matches!(extract_content("nope"), Err(BackendError::ResponseMalformed(_))));
    }

    #[test]
    fn request_body_shape() {
        let b = HttpBackend::new(HttpConfig::default());
        let mut req = ChatRequest::new("hi");
        req.system_text = Some("sys".into());
        let body = b.body(&req);
        assert_eq!(body["model"], "gpt-4-turbo");
        assert_eq!(body["messages"][0]["role"], "system");
        assert_eq!(body["messages"][1]["content"], "hi");
        assert_eq!(body["temperature"], 0.0);
        assert_eq!(body["top_p"], 1.0);
    }
}
