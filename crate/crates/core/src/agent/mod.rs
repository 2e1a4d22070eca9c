//! The interactive loop: prompt, reply, decision, environment step, memory
//! update — once per step until the goal holds or the budget runs out.

mod suite;
mod trial;

pub use suite::{
    records_from_jsonl, records_to_jsonl, run_suite, write_trajectory_logs, Backends, SuiteResult, TrialSpec,
};
pub use trial::{run_trial, LogEvent, StepRecord, TrialFailure, TrialRecord, RETRIEVED_SUFFIX};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::backend::PromptLayout;
use crate::memory::MemoryMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Variant {
    /// Flat history of every action and observation.
    Std,
    /// Subgoal chunks, summarized on close, retrievable by id.
    Ours,
    /// Chunks close with the last observation instead of a model summary.
    OursNoOs,
    /// Summaries without retrieval.
    OursNoTr,
    /// Subgoals only: chunks never collapse.
    Td,
}

impl Variant {
    pub const ALL: [Variant; 5] = [Variant::Std, Variant::Ours, Variant::OursNoOs, Variant::OursNoTr, Variant::Td];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Std => "STD",
            Variant::Ours => "OURS",
            Variant::OursNoOs => "OURS_NO_OS",
            Variant::OursNoTr => "OURS_NO_TR",
            Variant::Td => "TD",
        }
    }

    pub fn memory_mode(self) -> MemoryMode {
        match self {
            Variant::Std => MemoryMode::Flat,
            _ => MemoryMode::Chunked,
        }
    }

    pub fn layout(self) -> PromptLayout {
        match self {
            Variant::Std => PromptLayout::Std,
            _ => PromptLayout::Ours,
        }
    }

    pub fn summarizes(self) -> bool {
        matches!(self, Variant::Ours | Variant::OursNoTr)
    }

    pub fn retrieval_enabled(self) -> bool {
        matches!(self, Variant::Ours | Variant::OursNoOs)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .trim()
            .to_ascii_uppercase()
            .chars()
            .map(|c| if c == '-' || c == ' ' { '_' } else { c })
            .collect();
        let key = key.replace("W/O_", "NO_").replace("W/O", "NO_");
        match key.as_str() {
            "STD" => Ok(Variant::Std),
            "OURS" => Ok(Variant::Ours),
            "OURS_NO_OS" => Ok(Variant::OursNoOs),
            "OURS_NO_TR" => Ok(Variant::OursNoTr),
            "TD" => Ok(Variant::Td),
            _ => Err(format!(
                "unknown variant '{s}' (expected STD, OURS, OURS_NO_OS, OURS_NO_TR or TD)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentConfig {
    pub variant: Variant,
    pub max_steps: usize,
    /// Cap on subgoal chunks per trial; unset means only the step budget applies.
    pub max_chunks: Option<usize>,
    /// Recorded for log reproducibility.
    pub seed: u64,
}

impl AgentConfig {
    pub const DEFAULT_MAX_STEPS: usize = 30;

    pub fn new(variant: Variant) -> Self {
        Self {
            variant,
            max_steps: Self::DEFAULT_MAX_STEPS,
            max_chunks: None,
            seed: 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>(), Ok(v));
            assert_eq!(serde_json::to_string(&v).unwrap(), format!("\"{}\"", v.name()));
        }
        assert_eq!("ours-w/o-os".parse::<Variant>(), Ok(Variant::OursNoOs));
        assert_eq!("ours_no_tr".parse::<Variant>(), Ok(Variant::OursNoTr));
        assert!("reflexion".parse::<Variant>().is_err());
    }
}
