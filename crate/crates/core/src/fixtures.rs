//! Replay scripts synthesized from action sequences, for offline runs and
//! tests. Summarizer replies are interleaved where the agent loop asks for
//! them, so one shared replay backend serves both roles.

use serde::{Deserialize, Serialize};

use crate::agent::Variant;
use crate::backend::{AgentDecision, SCRIPT_SEPARATOR};
use crate::domains::{load_domain, reference_plan_lines, DomainError, DomainKind, LoadedTask};
use crate::env::Environment;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptedChunk {
    pub subgoal: String,
    pub actions: Vec<String>,
}

impl ScriptedChunk {
    pub fn new(subgoal: impl Into<String>, actions: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self {
            subgoal: subgoal.into(),
            actions: actions.into_iter().map(Into::into).collect(),
        }
    }
}

/// Splits a flat action list into chunks of `per_chunk` actions.
pub fn chunk_actions(lines: &[&str], per_chunk: usize) -> Vec<ScriptedChunk> {
    let per = per_chunk.max(1);
    lines
        .chunks(per)
        .enumerate()
        .map(|(i, part)| {
            let first = i * per + 1;
            ScriptedChunk::new(
                format!("Carry out plan steps {first} to {}.", first + part.len() - 1),
                part.iter().copied(),
            )
        })
        .collect()
}

/// Replies the agent loop will request, in order, if the policy follows
/// `chunks`. For summarizing variants a summary reply ("{last observation}
/// Subgoal is met.") follows each subgoal switch. Stops after the action that
/// completes the goal, mirroring the loop.
pub fn replay_script(task: &LoadedTask, variant: Variant, chunks: &[ScriptedChunk]) -> Vec<String> {
    let mut env = Environment::new(task.state.clone(), task.goal.clone());
    let mut replies = Vec::new();
    let mut last_obs: Option<(String, bool)> = None;
    for chunk in chunks {
        for (j, action) in chunk.actions.iter().enumerate() {
            if j == 0 && variant != Variant::Std {
                replies.push(format!("Subgoal: {}\nAction: {action}", chunk.subgoal));
                if variant.summarizes() {
                    if let Some((obs, ok)) = last_obs.take() {
                        let verdict = if ok { "Subgoal is met." } else { "Subgoal is not met." };
                        replies.push(format!("{obs} {verdict}"));
                    }
                }
            } else {
                replies.push(format!("Action: {action}"));
            }
            let obs = match AgentDecision::retrieval_target(action) {
                Some(k) => (format!("trajectory of Subgoal {k} is retrieved."), true),
                None => {
                    let out = env.act(action);
                    if out.done {
                        return replies;
                    }
                    (out.observation, out.executable)
                }
            };
            last_obs = Some(obs);
        }
    }
    replies
}

pub fn script_text(replies: &[String]) -> String {
    let mut out = replies.join(&format!("\n{SCRIPT_SEPARATOR}\n"));
    out.push('\n');
    out
}

/// Script that follows the bundled reference plan, two actions per subgoal.
pub fn plan_script(kind: DomainKind, instance: &str, variant: Variant) -> Result<Vec<String>, DomainError> {
    let task = load_domain(kind, instance)?;
    let lines = reference_plan_lines(kind, instance)?;
    Ok(replay_script(&task, variant, &chunk_actions(&lines, 2)))
}
