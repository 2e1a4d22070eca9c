//! Prompt assembly for the flat (STD) and chunked (OURS) layouts.

use super::ChatRequest;
use crate::memory::WorkingMemory;

/// Protocol note inserted before the examples in the chunked layout.
pub const OURS_NOTE: &str = "Note: A subgoal is a milestone goal that you need to complete in order to achieve the final goal. When there is an unfinished subgoal, you need to ground the given subgoal to corresponding executable actions for solving the given task in the following format: \"Action: {action}\". When there is no current subgoal or you believe the previous subgoal has been completed (based on past actions and observations), you need to output the next subgoal to be completed and its first action in the following format: \"Subgoal: {subgoal}\n\
Action: {action}\". You cannot output two subgoals consecutively. Detailed trajectory information (action-observation pair) of previously satisfied subgoals will be hidden for context efficiency. If you believe that the detailed trajectory information of a particular subgoal is crucial for the current subgoal, you can use Action: \"retrieve(subgoal_id)\" to obtain the detailed trajectory information.";

const EXAMPLES_HEADING: &str = "Here are examples:";
const GOAL_PREFIX: &str =
    "You should perform actions to accomplish the goal: The goal is to satisfy the following conditions: ";
const HELP_LINE: &str =
    "You should use the following commands for help when your action cannot be understood: check valid actions";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PromptLayout {
    /// Instructions, example, goal and the full action/observation history.
    Std,
    /// Adds the subgoal protocol note; history is rendered by chunk.
    Ours,
}

/// Everything before the initial observation. Ends with a line break so the
/// memory rendering can be appended directly.
pub fn prompt_header(layout: PromptLayout, instructions: &str, example: &str, goal_text: &str) -> String {
    let instructions = instructions.trim_end();
    let example = example.trim_end();
    match layout {
        PromptLayout::Std => format!(
            "{instructions}\n\n{EXAMPLES_HEADING}\n\n{example}\n{GOAL_PREFIX}{goal_text}\n{HELP_LINE}\n"
        ),
        PromptLayout::Ours => format!(
            "{instructions}\n\n{OURS_NOTE}\n\n{EXAMPLES_HEADING}\n\n{example}\n{GOAL_PREFIX}{goal_text}\n\n{HELP_LINE}\n\n"
        ),
    }
}

pub fn build_prompt(
    layout: PromptLayout,
    instructions: &str,
    example: &str,
    goal_text: &str,
    memory: &WorkingMemory,
) -> ChatRequest {
    let mut text = prompt_header(layout, instructions, example, goal_text);
    text.push_str(&memory.render());
    ChatRequest::new(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memory::token_count;

    #[test]
    fn header_and_body_tokens_add_up() {
        let mut mem = WorkingMemory::chunked("Boot is closed.");
        mem.open_subgoal("Open the boot.").unwrap();
        mem.append_step("Open boot.", "Boot is open.", true).unwrap();
        for layout in [PromptLayout::Std, PromptLayout::Ours] {
            let header = prompt_header(layout, "Do things.", "Example.", "w1 is in boot.");
            let req = build_prompt(layout, "Do things.", "Example.", "w1 is in boot.", &mem);
            assert_eq!(token_count(&req.user_text), token_count(&header) + token_count(&mem.render()));
        }
    }

    #[test]
    fn note_only_in_chunked_layout() {
        let std = prompt_header(PromptLayout::Std, "i", "e", "g");
        let ours = prompt_header(PromptLayout::Ours, "i", "e", "g");
        assert!(!std.contains("Note: A subgoal is a milestone goal"));
        assert!(ours.contains("Note: A subgoal is a milestone goal"));
        assert!(OURS_NOTE.contains("\"Subgoal: {subgoal}\nAction: {action}\""));
    }
}
