//! Scripted backend for deterministic tests and offline runs.

use std::path::Path;
use std::sync::Mutex;

use super::{BackendError, ChatBackend, ChatRequest};

/// Responses in a script file are separated by a line containing only this.
pub const SCRIPT_SEPARATOR: &str = "---";

/// Splits script text into responses. Each response keeps its inner line
/// breaks; blank lines at either end are dropped, and so is an empty
/// trailing response.
pub fn parse_script(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur: Vec<&str> = Vec::new();
    for line in text.lines() {
        if line.trim_end_matches('\r') == SCRIPT_SEPARATOR {
            out.push(cur.join("\n").trim_matches('\n').to_string());
            cur.clear();
        } else {
            cur.push(line.trim_end_matches('\r'));
        }
    }
    let last = cur.join("\n").trim_matches('\n').to_string();
    if !last.is_empty() {
        out.push(last);
    }
    out
}

/// Returns scripted responses in order, one per call, and records every
/// prompt it was sent.
#[derive(Debug)]
pub struct ReplayBackend {
    name: String,
    responses: Vec<String>,
    state: Mutex<ReplayState>,
}

#[derive(Debug, Default)]
struct ReplayState {
    next: usize,
    prompts: Vec<String>,
}

impl ReplayBackend {
    pub fn new(responses: Vec<String>) -> Self {
        Self::named("inline", responses)
    }

    pub fn named(name: impl Into<String>, responses: Vec<String>) -> Self {
        Self {
            name: name.into(),
            responses,
            state: Mutex::new(ReplayState::default()),
        }
    }

    pub fn from_text(name: impl Into<String>, text: &str) -> Self {
        Self::named(name, parse_script(text))
    }

    pub fn from_file(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(Self::from_text(path.display().to_string(), &text))
    }

    pub fn remaining(&self) -> usize {
        let st = self.state.lock().unwrap();
        self.responses.len().saturating_sub(st.next)
    }

    /// Every user prompt received so far, in call order.
    pub fn prompts(&self) -> Vec<String> {
        self.state.lock().unwrap().prompts.clone()
    }
}

impl ChatBackend for ReplayBackend {
    fn complete(&self, request: &ChatRequest) -> Result<String, BackendError> {
        request.validate()?;
        let mut st = self.state.lock().unwrap();
        st.prompts.push(request.user_text.clone());
        let reply = self
            .responses
            .get(st.next)
            .cloned()
            .ok_or(BackendError::ScriptExhausted(self.responses.len()))?;
        st.next += 1;
        Ok(reply)
    }

    fn identity(&self) -> String {
        format!("replay:{}", self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echoes_then_exhausts() {
        let b = ReplayBackend::new(vec!["Action: Open boot.".into()]);
        let req = ChatRequest::new("p");
        assert_eq!(b.complete(&req).unwrap(), "Action: Open boot.");
        assert_eq!(b.complete(&req), Err(BackendError::ScriptExhausted(1)));
        assert_eq!(b.prompts().len(), 2);
    }

    #[test]
    fn script_splitting() {
        let text = "Subgoal: a\nAction: b\n---\nAction: c\n---\n\nAction: d\n\n";
        assert_eq!(parse_script(text), ["Subgoal: a\nAction: b", "Action: c", "Action: d"]);
        assert_eq!(parse_script(""), Vec::<String>::new());
        assert_eq!(parse_script("x\n--- \ny"), ["x\n--- \ny"]);
        assert_eq!(parse_script("x\r\n---\r\ny\r\n"), ["x", "y"]);
    }
}
