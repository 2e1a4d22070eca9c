//! Observation summarizer: condenses a closed chunk into one line plus a
//! met/not-met verdict.

use serde::{Deserialize, Serialize};

use super::{BackendError, ChatBackend, ChatRequest};
use crate::memory::MemoryStep;

const PREAMBLE: &str = "You are an advanced AI system tasked with summarizing and analyzing a series of action-observation pairs (trajectories) and determining whether a specific subgoal has been met.
Your goal is to create a summary that captures all essential information, decisions, and outcomes from the given trajectories, and indicate whether the subgoal has been met based on the summarized observations.
If there are no valid actions taken, you need to analyze the reason.";

/// The numbered instruction block of the summarization prompt.
pub const SUMMARY_INSTRUCTIONS: &str = "### Instructions:
1. Provide a summarized observation related to the subgoal in a concise manner.
2. Determine whether the subgoal has been met.
3. Do not output anything except whether summary and subgoal are met. Your output should be only one line. Do not output things like `##Summary', `##Summary and Analysis'.";

/// Worked example used when a domain supplies none.
pub const DEFAULT_SUMMARY_EXAMPLE: &str = "##Example
##Trajectory
Action: check valid actions.
Observation: Valid actions are: Open boot. Check valid actions. Look around.
Action: Open boot.
Observation: Boot is open.
##Subgoal:
Open the boot to access the tools.
###Output:
Boot is open. Subgoal is met.";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryResult {
    pub summary: String,
    pub met: bool,
}

pub fn summarization_prompt(subgoal: &str, steps: &[MemoryStep], example: &str) -> String {
    let trajectory = steps
        .iter()
        .map(|s| format!("{}\n{}", s.action_line(), s.observation_line()))
        .collect::<Vec<_>>()
        .join("\n");
    format!(
        "{PREAMBLE}\n\n{SUMMARY_INSTRUCTIONS}\n\n{example}\n\n##Trajectory\n{trajectory}\n\n##Subgoal:\n{subgoal}\n\n###Output:\n"
    )
}

/// Verdict markers, checked case-insensitively; negatives take precedence.
fn verdict(line: &str) -> bool {
    let lower = line.to_lowercase();
    if lower.contains("subgoal is not met") || lower.contains("not been met") {
        return false;
    }
    lower.contains("subgoal is met")
}

pub fn summarize(
    backend: &dyn ChatBackend,
    subgoal: &str,
    steps: &[MemoryStep],
    example: &str,
) -> Result<SummaryResult, BackendError> {
    if steps.is_empty() {
        return Err(BackendError::InvalidRequest("nothing to summarize".into()));
    }
    let reply = backend.complete(&ChatRequest::new(summarization_prompt(subgoal, steps, example)))?;
    let line = reply
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .ok_or(BackendError::EmptySummary)?;
    Ok(SummaryResult {
        summary: line.to_string(),
        met: verdict(line),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::ReplayBackend;

    fn steps() -> Vec<MemoryStep> {
        vec![MemoryStep {
            action_text: "Open boot.".into(),
            observation_text: "Boot is open.".into(),
            executable: true,
            step_index: 0,
        }]
    }

    fn run(reply: &str) -> Result<SummaryResult, BackendError> {
        let b = ReplayBackend::new(vec![reply.into()]);
        summarize(&b, "Open the boot to access the tools.", &steps(), DEFAULT_SUMMARY_EXAMPLE)
    }

    #[test]
    fn verdicts() {
        assert_eq!(
            run("Boot is open. Subgoal is met.").unwrap(),
            SummaryResult { summary: "Boot is open. Subgoal is met.".into(), met: true }
        );
        assert!(!run("The action is not valid. Subgoal is not met.").unwrap().met);
        assert!(!run("Wrench acquired.").unwrap().met);
        assert!(!run("The subgoal has not been met.").unwrap().met);
        assert_eq!(run("\n\n  Boot open.  \nextra").unwrap().summary, "Boot open.");
        assert_eq!(run("  \n "), Err(BackendError::EmptySummary));
    }

    #[test]
    fn prompt_layout() {
        let p = summarization_prompt("Open the boot.", &steps(), "EX");
        assert!(p.contains(SUMMARY_INSTRUCTIONS));
        assert!(p.ends_with("##Trajectory\nAction: Open boot.\nObservation: Boot is open.\n\n##Subgoal:\nOpen the boot.\n\n###Output:\n"));
    }
}
