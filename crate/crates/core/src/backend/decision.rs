//! Parsing model replies into agent decisions.

use serde::{Deserialize, Serialize};

use crate::memory::MemoryMode;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AgentDecision {
    NewSubgoal { subgoal: String, action: String },
    Act { action: String },
    Retrieve { chunk_id: usize },
    Malformed { raw: String },
}

impl AgentDecision {
    /// The retrieval target if `action` is a `retrieve(k)` call with `k >= 1`.
    pub fn retrieval_target(action: &str) -> Option<usize> {
        let compact: String = action
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '"' && *c != '\'')
            .collect::<String>()
            .to_lowercase();
        let compact = compact.trim_end_matches('.');
        let inner = compact.strip_prefix("retrieve(")?.strip_suffix(')')?;
        inner.parse::<usize>().ok().filter(|&k| k >= 1)
    }

    fn is_retrieval_call(action: &str) -> bool {
        action
            .trim_start_matches(['"', '\''])
            .to_lowercase()
            .starts_with("retrieve")
            && action.contains('(')
    }
}

/// `label: rest` with a case-insensitive label and an optional leading
/// chunk number (`4 Subgoal: ...`).
fn labelled<'a>(line: &'a str, label: &str) -> Option<&'a str> {
    let line = line.trim().trim_start_matches(|c: char| c.is_ascii_digit()).trim_start();
    let (head, rest) = line.split_once(':')?;
    head.trim().eq_ignore_ascii_case(label).then(|| rest.trim())
}

/// Reads one decision from a model reply. The first action line wins.
pub fn parse_decision(raw: &str, mode: MemoryMode) -> AgentDecision {
    let malformed = || AgentDecision::Malformed { raw: raw.to_string() };
    let mut subgoal: Option<&str> = None;
    for line in raw.lines() {
        if let Some(action) = labelled(line, "action") {
            if action.is_empty() {
                return malformed();
            }
            if mode == MemoryMode::Flat {
                return AgentDecision::Act { action: action.to_string() };
            }
            return match (subgoal, AgentDecision::retrieval_target(action)) {
                (Some(s), _) => AgentDecision::NewSubgoal {
                    subgoal: s.to_string(),
                    action: action.to_string(),
                },
                (None, Some(k)) => AgentDecision::Retrieve { chunk_id: k },
                (None, None) if AgentDecision::is_retrieval_call(action) => malformed(),
                (None, None) => AgentDecision::Act { action: action.to_string() },
            };
        }
        if mode == MemoryMode::Chunked {
            if let Some(s) = labelled(line, "subgoal") {
                // two subgoals without an action in between
                if subgoal.is_some() || s.is_empty() {
                    return malformed();
                }
                subgoal = Some(s);
            }
        }
    }
    malformed()
}

/// Canonical reply text for a decision; `parse_decision` inverts it.
pub fn format_decision(decision: &AgentDecision) -> String {
    match decision {
        AgentDecision::NewSubgoal { subgoal, action } => format!("Subgoal: {subgoal}\nAction: {action}"),
        AgentDecision::Act { action } => format!("Action: {action}"),
        AgentDecision::Retrieve { chunk_id } => format!("Action: retrieve({chunk_id})"),
        AgentDecision::Malformed { raw } => raw.clone(),
    }
}
