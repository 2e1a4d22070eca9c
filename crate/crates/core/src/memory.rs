//! Working memory: the in-trial history shown to the model each turn.
//!
//! `Flat` keeps every action/observation pair. `Chunked` groups steps under
//! subgoals; once a chunk is closed it renders as its subgoal plus a one-line
//! summary, unless it has been re-expanded by a retrieval.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MemoryMode {
    Flat,
    Chunked,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryStep {
    pub action_text: String,
    pub observation_text: String,
    pub executable: bool,
    pub step_index: usize,
}

impl MemoryStep {
    pub fn action_line(&self) -> String {
        format!("Action: {}", self.action_text)
    }

    pub fn observation_line(&self) -> String {
        format!("Observation: {}", self.observation_text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryChunk {
    pub chunk_id: usize,
    pub subgoal: String,
    pub steps: Vec<MemoryStep>,
    pub summary: Option<String>,
    pub met: Option<bool>,
    pub expanded: bool,
}

impl MemoryChunk {
    pub fn is_closed(&self) -> bool {
        self.summary.is_some()
    }

    /// Whether the chunk renders as subgoal + summary only.
    pub fn is_collapsed(&self) -> bool {
        self.is_closed() && !self.expanded
    }

    /// The collapsed observation line, adding the verdict clause from the
    /// stored flag when the summary does not already carry one.
    pub fn summary_line(&self) -> Option<String> {
        let summary = self.summary.as_deref()?;
        let lower = summary.to_lowercase();
        let has_clause = lower.contains("subgoal is met") || lower.contains("subgoal is not met");
        let clause = match (has_clause, self.met) {
            (false, Some(true)) => " Subgoal is met.",
            (false, Some(false)) => " Subgoal is not met.",
            _ => "",
        };
        Some(format!("Observation: {summary}{clause}"))
    }

    fn push_step_lines(&self, out: &mut Vec<String>) {
        for s in &self.steps {
            out.push(s.action_line());
            out.push(s.observation_line());
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MemoryError {
    #[error("no open subgoal chunk")]
    NoOpenChunk,
    #[error("the previous subgoal chunk is still open")]
    PreviousChunkOpen,
    #[error("no subgoal chunk with id {0}")]
    UnknownChunk(usize),
    #[error("subgoal chunk {0} is still open")]
    ChunkOpen(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkingMemory {
    pub initial_observation: String,
    pub mode: MemoryMode,
    chunks: Vec<MemoryChunk>,
    /// When false, closed chunks keep rendering their full steps.
    collapse_closed: bool,
    next_step: usize,
}

impl WorkingMemory {
    pub fn new(mode: MemoryMode, initial_observation: impl Into<String>) -> Self {
        let chunks = match mode {
            MemoryMode::Flat => vec![MemoryChunk {
                chunk_id: 1,
                subgoal: String::new(),
                steps: Vec::new(),
                summary: None,
                met: None,
                expanded: false,
            }],
            MemoryMode::Chunked => Vec::new(),
        };
        Self {
            initial_observation: initial_observation.into(),
            mode,
            chunks,
            collapse_closed: true,
            next_step: 0,
        }
    }

    pub fn flat(initial_observation: impl Into<String>) -> Self {
        Self::new(MemoryMode::Flat, initial_observation)
    }

    pub fn chunked(initial_observation: impl Into<String>) -> Self {
        Self::new(MemoryMode::Chunked, initial_observation)
    }

    /// Chunked memory whose closed chunks are never collapsed.
    pub fn uncollapsed(initial_observation: impl Into<String>) -> Self {
        Self {
            collapse_closed: false,
            ..Self::chunked(initial_observation)
        }
    }

    pub fn chunks(&self) -> &[MemoryChunk] {
        &self.chunks
    }

    pub fn chunk(&self, id: usize) -> Option<&MemoryChunk> {
        id.checked_sub(1).and_then(|i| self.chunks.get(i))
    }

    pub fn open_chunk(&self) -> Option<&MemoryChunk> {
        self.chunks.last().filter(|c| !c.is_closed())
    }

    pub fn steps(&self) -> impl Iterator<Item = &MemoryStep> {
        self.chunks.iter().flat_map(|c| c.steps.iter())
    }

    pub fn step_count(&self) -> usize {
        self.next_step
    }

    pub fn append_step(
        &mut self,
        action_text: impl Into<String>,
        observation_text: impl Into<String>,
        executable: bool,
    ) -> Result<(), MemoryError> {
        let step_index = self.next_step;
        let chunk = match self.chunks.last_mut() {
            Some(c) if !c.is_closed() => c,
            _ => return Err(MemoryError::NoOpenChunk),
        };
        chunk.steps.push(MemoryStep {
            action_text: action_text.into(),
            observation_text: observation_text.into(),
            executable,
            step_index,
        });
        self.next_step += 1;
        Ok(())
    }

    /// Starts a new chunk. A no-op in flat mode.
    pub fn open_subgoal(&mut self, subgoal: impl Into<String>) -> Result<usize, MemoryError> {
        if self.mode == MemoryMode::Flat {
            return Ok(1);
        }
        if self.open_chunk().is_some() {
            return Err(MemoryError::PreviousChunkOpen);
        }
        let chunk_id = self.chunks.len() + 1;
        self.chunks.push(MemoryChunk {
            chunk_id,
            subgoal: subgoal.into(),
            steps: Vec::new(),
            summary: None,
            met: None,
            expanded: false,
        });
        Ok(chunk_id)
    }

    /// Closes the open chunk and re-collapses every expanded chunk. `met` is
    /// `None` when no verdict is known. A no-op in flat mode.
    pub fn close_chunk(&mut self, summary: impl Into<String>, met: Option<bool>) -> Result<(), MemoryError> {
        if self.mode == MemoryMode::Flat {
            return Ok(());
        }
        let chunk = match self.chunks.last_mut() {
            Some(c) if !c.is_closed() => c,
            _ => return Err(MemoryError::NoOpenChunk),
        };
        let summary: String = summary.into();
        // summaries are single lines
        chunk.summary = Some(summary.trim().replace(['\r', '\n'], " "));
        chunk.met = met;
        for c in &mut self.chunks {
            c.expanded = false;
        }
        Ok(())
    }

    /// Marks a closed chunk for full rendering until the current chunk closes.
    pub fn expand(&mut self, chunk_id: usize) -> Result<(), MemoryError> {
        if self.mode == MemoryMode::Flat {
            return Err(MemoryError::UnknownChunk(chunk_id));
        }
        let chunk = chunk_id
            .checked_sub(1)
            .and_then(|i| self.chunks.get_mut(i))
            .ok_or(MemoryError::UnknownChunk(chunk_id))?;
        if !chunk.is_closed() {
            return Err(MemoryError::ChunkOpen(chunk_id));
        }
        chunk.expanded = true;
        Ok(())
    }

    /// The history part of the prompt, without the initial observation.
    pub fn render_body(&self) -> String {
        match self.mode {
            MemoryMode::Flat => {
                let mut lines = Vec::new();
                for c in &self.chunks {
                    c.push_step_lines(&mut lines);
                }
                lines.join("\n")
            }
            MemoryMode::Chunked => self
                .chunks
                .iter()
                .map(|c| {
                    let mut lines = vec![format!("{} Subgoal: {}", c.chunk_id, c.subgoal)];
                    match c.summary_line() {
                        Some(line) if self.collapse_closed && !c.expanded => lines.push(line),
                        _ => c.push_step_lines(&mut lines),
                    }
                    lines.join("\n")
                })
                .collect::<Vec<_>>()
                .join("\n\n"),
        }
    }

    /// Initial observation followed by the history body.
    pub fn render(&self) -> String {
        let first = format!("Observation: {}", self.initial_observation);
        let body = self.render_body();
        let sep = match self.mode {
            MemoryMode::Flat => "\n",
            MemoryMode::Chunked => "\n\n",
        };
        if body.is_empty() {
            first
        } else {
            format!("{first}{sep}{body}")
        }
    }
}

/// Deterministic approximate token count: each whitespace-separated word
/// contributes one token per alphanumeric run and one per other character,
/// so `"Open boot."` counts 3 and counts add across whitespace joins.
pub fn token_count(text: &str) -> usize {
    text.split_whitespace()
        .map(|word| {
            let mut n = 0;
            let mut in_run = false;
            for ch in word.chars() {
                if ch.is_alphanumeric() {
                    if !in_run {
                        n += 1;
                        in_run = true;
                    }
                } else {
                    n += 1;
                    in_run = false;
                }
            }
            n
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn token_examples() {
        assert_eq!(token_count(""), 0);
        assert_eq!(token_count("Open boot."), 3);
        assert_eq!(token_count("the-hub1"), 3);
        assert_eq!(token_count("  a\tb\n"), 2);
    }

    #[test]
    fn flat_appends_to_implicit_chunk() {
        let mut m = WorkingMemory::flat("x");
        m.append_step("Open boot.", "Boot is open.", true).unwrap();
        assert_eq!(m.chunks().len(), 1);
        assert_eq!(m.chunks()[0].steps.len(), 1);
        m.open_subgoal("ignored").unwrap();
        m.close_chunk("ignored", Some(true)).unwrap();
        assert_eq!(m.chunks().len(), 1);
        assert_eq!(m.render(), "Observation: x\nAction: Open boot.\nObservation: Boot is open.");
    }

    #[test]
    fn chunk_lifecycle_errors() {
        let mut m = WorkingMemory::chunked("x");
        assert_eq!(m.append_step("a", "o", true), Err(MemoryError::NoOpenChunk));
        assert_eq!(m.close_chunk("s", Some(true)), Err(MemoryError::NoOpenChunk));
        assert_eq!(m.open_subgoal("Open the boot to access the tools."), Ok(1));
        assert_eq!(m.open_subgoal("again"), Err(MemoryError::PreviousChunkOpen));
        assert_eq!(m.expand(1), Err(MemoryError::ChunkOpen(1)));
        m.append_step("Open boot.", "Boot is open.", true).unwrap();
        m.close_chunk("Boot is open.", Some(true)).unwrap();
        assert_eq!(m.open_subgoal("next"), Ok(2));
        assert_eq!(m.expand(99), Err(MemoryError::UnknownChunk(99)));
        assert_eq!(m.expand(0), Err(MemoryError::UnknownChunk(0)));
        let ids: Vec<_> = m.chunks().iter().map(|c| c.chunk_id).collect();
        assert_eq!(ids, [1, 2]);
    }

    #[test]
    fn verdict_clause_from_flag() {
        let mut m = WorkingMemory::chunked("x");
        m.open_subgoal("g").unwrap();
        m.append_step("a", "o", false).unwrap();
        m.close_chunk("The action is not valid.", Some(false)).unwrap();
        assert!(m.render_body().ends_with("Observation: The action is not valid. Subgoal is not met."));

        let mut m = WorkingMemory::chunked("x");
        m.open_subgoal("g").unwrap();
        m.append_step("a", "o", true).unwrap();
        m.close_chunk("Boot is open. Subgoal is met.", Some(true)).unwrap();
        assert!(m.render_body().ends_with("Observation: Boot is open. Subgoal is met."));
    }

    #[test]
    fn closing_recollapses_expansions() {
        let mut m = WorkingMemory::chunked("x");
        m.open_subgoal("one").unwrap();
        m.append_step("a1", "o1", true).unwrap();
        m.close_chunk("s1", Some(true)).unwrap();
        m.open_subgoal("two").unwrap();
        m.expand(1).unwrap();
        assert!(m.render_body().contains("Action: a1"));
        m.append_step("a2", "o2", true).unwrap();
        m.close_chunk("s2", Some(true)).unwrap();
        assert!(!m.render_body().contains("Action: a1"));
        assert!(m.chunks().iter().all(|c| !c.expanded));
    }

    #[test]
    fn uncollapsed_keeps_steps() {
        let mut m = WorkingMemory::uncollapsed("x");
        m.open_subgoal("one").unwrap();
        m.append_step("a1", "o1", true).unwrap();
        m.close_chunk("s1", Some(true)).unwrap();
        assert_eq!(m.render_body(), "1 Subgoal: one\nAction: a1\nObservation: o1");
    }
}
