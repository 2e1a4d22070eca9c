use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{AgentConfig, Variant};
use crate::backend::{build_prompt, parse_decision, summarize, AgentDecision, BackendError, ChatBackend,
    DEFAULT_SUMMARY_EXAMPLE};
use crate::domains::{DomainKind, LoadedTask};
use crate::env::{Environment, INVALID_ACTION_OBSERVATION};
use crate::memory::{token_count, MemoryMode, WorkingMemory};

/// Observation for a successful retrieval is `trajectory of Subgoal {k}` + this.
pub const RETRIEVED_SUFFIX: &str = " is retrieved.";

fn retrieved_observation(k: usize) -> String {
    format!("trajectory of Subgoal {k}{RETRIEVED_SUFFIX}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// 1-based.
    pub step_index: usize,
    pub decision: AgentDecision,
    pub action_text: String,
    pub observation: String,
    pub executable: bool,
    pub progress: f64,
    pub context_tokens: usize,
    pub wall_ms: f64,
}

/// One line of the per-trial trajectory log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEvent {
    pub event: String,
    pub trial_id: String,
    pub step_index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chunk_id: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tokens: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub executable: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub progress: Option<f64>,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_id: String,
    pub task: DomainKind,
    pub instance: String,
    pub variant: Variant,
    pub seed: u64,
    pub max_steps: usize,
    pub per_step: Vec<StepRecord>,
    pub initial_progress: f64,
    pub final_progress: f64,
    /// Running maximum over the trajectory, including the initial state.
    pub max_progress: f64,
    pub success: bool,
    pub steps_used: usize,
    pub chunks: usize,
    pub total_wall_ms: f64,
    /// Fallbacks taken during the trial, e.g. a failed summarization.
    pub degradations: Vec<String>,
    #[serde(skip)]
    pub events: Vec<LogEvent>,
}

impl TrialRecord {
    /// Copy with every wall-clock field zeroed, for byte-level comparisons.
    pub fn without_wall_time(&self) -> Self {
        let mut r = self.clone();
        r.total_wall_ms = 0.0;
        for s in &mut r.per_step {
            s.wall_ms = 0.0;
        }
        for e in &mut r.events {
            e.wall_ms = 0.0;
        }
        r
    }

    pub fn mean_context_tokens(&self) -> f64 {
        if self.per_step.is_empty() {
            0.0
        } else {
            self.per_step.iter().map(|s| s.context_tokens as f64).sum::<f64>() / self.per_step.len() as f64
        }
    }
}

/// A trial aborted by a backend error; excluded from metrics, kept in the
/// failure manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial_id: String,
    pub task: DomainKind,
    pub instance: String,
    pub variant: Variant,
    pub seed: u64,
    pub steps_completed: usize,
    pub error: String,
    #[serde(skip, default = "unknown_error")]
    pub kind: BackendError,
}

fn unknown_error() -> BackendError {
    BackendError::Transport(String::new())
}

struct Loop<'a> {
    config: &'a AgentConfig,
    trial_id: String,
    env: Environment,
    mem: WorkingMemory,
    summarizer: &'a dyn ChatBackend,
    events: Vec<LogEvent>,
    degradations: Vec<String>,
    started: Instant,
}

struct Outcome {
    action_text: String,
    observation: String,
    executable: bool,
}

impl Outcome {
    fn invalid(action_text: String) -> Self {
        Self {
            action_text,
            observation: INVALID_ACTION_OBSERVATION.to_string(),
            executable: false,
        }
    }
}

impl Loop<'_> {
    fn elapsed_ms(&self) -> f64 {
        self.started.elapsed().as_secs_f64() * 1000.0
    }

    fn log(&mut self, event: &str, step: usize, chunk_id: Option<usize>, text: Option<String>) {
        let wall_ms = self.elapsed_ms();
        self.events.push(LogEvent {
            event: event.into(),
            trial_id: self.trial_id.clone(),
            step_index: step,
            chunk_id,
            text,
            tokens: None,
            executable: None,
            progress: None,
            wall_ms,
        });
    }

    fn open_chunk_id(&self) -> Option<usize> {
        self.mem.open_chunk().map(|c| c.chunk_id)
    }

    fn close_open_chunk(&mut self, step: usize, final_obs: Option<&str>) {
        let Some(chunk) = self.mem.open_chunk().cloned() else {
            return;
        };
        let last_obs = chunk
            .steps
            .last()
            .map(|s| s.observation_text.clone())
            .unwrap_or_else(|| "No action was taken.".to_string());
        let (summary, met) = if let Some(obs) = final_obs {
            (obs.to_string(), Some(true))
        } else if self.config.variant.summarizes() && !chunk.steps.is_empty() {
            match summarize(self.summarizer, &chunk.subgoal, &chunk.steps, DEFAULT_SUMMARY_EXAMPLE) {
                Ok(r) => (r.summary, Some(r.met)),
                Err(e) => {
                    self.degradations
                        .push(format!("step {step}: summarizing chunk {} failed ({e}); kept last observation", chunk.chunk_id));
                    (last_obs, None)
                }
            }
        } else {
            (last_obs, None)
        };
        self.mem
            .close_chunk(summary.clone(), met)
            .expect("an open chunk exists");
        self.log("chunk_close", step, Some(chunk.chunk_id), Some(summary));
    }

    fn env_action(&mut self, action: &str) -> Outcome {
        let out = self.env.act(action);
        Outcome {
            action_text: action.to_string(),
            observation: out.observation,
            executable: out.executable,
        }
    }

    fn retrieve(&mut self, step: usize, k: usize, action_text: String) -> Outcome {
        if !self.config.variant.retrieval_enabled() {
            return Outcome::invalid(action_text);
        }
        match self.mem.expand(k) {
            Ok(()) => {
                self.log("expand", step, Some(k), None);
                Outcome {
                    action_text,
                    observation: retrieved_observation(k),
                    executable: true,
                }
            }
            Err(_) => Outcome::invalid(action_text),
        }
    }

    fn dispatch(&mut self, step: usize, decision: &AgentDecision) -> Outcome {
        let chunked = self.mem.mode == MemoryMode::Chunked;
        match decision {
            AgentDecision::Act { action } => {
                if chunked && self.mem.open_chunk().is_none() {
                    // a subgoal must come first
                    return Outcome::invalid(action.clone());
                }
                self.env_action(action)
            }
            AgentDecision::NewSubgoal { subgoal, action } => {
                if !chunked {
                    return self.env_action(action);
                }
                self.close_open_chunk(step, None);
                if self
                    .config
                    .max_chunks
                    .is_some_and(|cap| self.mem.chunks().len() >= cap)
                {
                    return Outcome::invalid(action.clone());
                }
                let id = self.mem.open_subgoal(subgoal.clone()).expect("previous chunk was closed");
                self.log("subgoal_open", step, Some(id), Some(subgoal.clone()));
                match AgentDecision::retrieval_target(action) {
                    Some(k) => self.retrieve(step, k, action.clone()),
                    None => self.env_action(action),
                }
            }
            AgentDecision::Retrieve { chunk_id } => self.retrieve(step, *chunk_id, format!("retrieve({chunk_id})")),
            AgentDecision::Malformed { raw } => {
                let first = raw.lines().map(str::trim).find(|l| !l.is_empty()).unwrap_or("");
                Outcome::invalid(first.to_string())
            }
        }
    }
}

/// Runs one trial. Backend failures abort the trial and are returned as errors.
pub fn run_trial(
    config: &AgentConfig,
    task: &LoadedTask,
    policy: &dyn ChatBackend,
    summarizer: Option<&dyn ChatBackend>,
) -> Result<TrialRecord, TrialFailure> {
    let variant = config.variant;
    let trial_id = format!("{}-{}-{}-s{}", task.kind, task.instance, variant, config.seed);
    let env = Environment::new(task.state.clone(), task.goal.clone());
    let init = env.observation();
    let mem = match variant {
        Variant::Std => WorkingMemory::flat(init),
        Variant::Td => WorkingMemory::uncollapsed(init),
        _ => WorkingMemory::chunked(init),
    };
    let example = match variant.layout() {
        crate::backend::PromptLayout::Std => task.example_std,
        crate::backend::PromptLayout::Ours => task.example_ours,
    };
    let goal_text = env.goal_text();
    let mut lp = Loop {
        config,
        trial_id: trial_id.clone(),
        env,
        mem,
        summarizer: summarizer.unwrap_or(policy),
        events: Vec::new(),
        degradations: Vec::new(),
        started: Instant::now(),
    };

    let initial = lp.env.progress();
    let mut max_progress = initial;
    let mut per_step = Vec::new();
    let mut done = initial.is_complete();

    let mut step = 0;
    while !done && step < config.max_steps.max(1) {
        step += 1;
        let step_start = Instant::now();
        let request = build_prompt(variant.layout(), task.instructions, example, &goal_text, &lp.mem);
        let tokens = token_count(&request.user_text);
        let reply = policy.complete(&request).map_err(|e| TrialFailure {
            trial_id: trial_id.clone(),
            task: task.kind,
            instance: task.instance.clone(),
            variant,
            seed: config.seed,
            steps_completed: step - 1,
            error: e.to_string(),
            kind: e,
        })?;
        let decision = parse_decision(&reply, variant.memory_mode());
        let out = lp.dispatch(step, &decision);

        if lp.open_chunk_id().is_some() || lp.mem.mode == MemoryMode::Flat {
            lp.mem
                .append_step(out.action_text.clone(), out.observation.clone(), out.executable)
                .expect("open chunk checked");
        }
        let progress = lp.env.progress();
        if progress > max_progress {
            max_progress = progress;
        }
        done = progress.is_complete();

        let wall_ms = step_start.elapsed().as_secs_f64() * 1000.0;
        lp.events.push(LogEvent {
            event: "step".into(),
            trial_id: trial_id.clone(),
            step_index: step,
            chunk_id: lp.open_chunk_id(),
            text: Some(format!("Action: {}\nObservation: {}", out.action_text, out.observation)),
            tokens: Some(tokens),
            executable: Some(out.executable),
            progress: Some(progress.value()),
            wall_ms: lp.elapsed_ms(),
        });
        per_step.push(StepRecord {
            step_index: step,
            decision,
            action_text: out.action_text,
            observation: out.observation.clone(),
            executable: out.executable,
            progress: progress.value(),
            context_tokens: tokens,
            wall_ms,
        });
        if done {
            lp.close_open_chunk(step, Some(&out.observation));
        }
    }

    let final_progress = lp.env.progress();
    let total_wall_ms = lp.elapsed_ms();
    let steps_used = per_step.len();
    let render_tokens = token_count(&lp.mem.render());
    lp.events.push(LogEvent {
        event: "render_stats".into(),
        trial_id: trial_id.clone(),
        step_index: steps_used,
        chunk_id: None,
        text: None,
        tokens: Some(render_tokens),
        executable: None,
        progress: Some(final_progress.value()),
        wall_ms: total_wall_ms,
    });
    Ok(TrialRecord {
        trial_id,
        task: task.kind,
        instance: task.instance.clone(),
        variant,
        seed: config.seed,
        max_steps: config.max_steps,
        per_step,
        initial_progress: initial.value(),
        final_progress: final_progress.value(),
        max_progress: max_progress.value(),
        success: max_progress.is_complete(),
        steps_used,
        chunks: if lp.mem.mode == MemoryMode::Chunked { lp.mem.chunks().len() } else { 0 },
        total_wall_ms,
        degradations: lp.degradations,
        events: lp.events,
    })
}
