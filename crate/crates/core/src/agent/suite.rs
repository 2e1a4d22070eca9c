use std::fs;
use std::io;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_trial, AgentConfig, TrialFailure, TrialRecord, Variant};
use crate::backend::{BackendError, ChatBackend};
use crate::domains::{load_domain, DomainKind};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TrialSpec {
    pub task: DomainKind,
    pub instance: String,
    pub variant: Variant,
    #[serde(default)]
    pub seed: u64,
}

impl TrialSpec {
    pub fn new(task: DomainKind, instance: impl Into<String>, variant: Variant) -> Self {
        Self {
            task,
            instance: instance.into(),
            variant,
            seed: 0,
        }
    }
}

/// Policy and (optionally distinct) summarizer for one trial.
#[derive(Clone)]
pub struct Backends {
    pub policy: Arc<dyn ChatBackend>,
    pub summarizer: Option<Arc<dyn ChatBackend>>,
}

impl Backends {
    pub fn shared(policy: Arc<dyn ChatBackend>) -> Self {
        Self { policy, summarizer: None }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub records: Vec<TrialRecord>,
    pub failures: Vec<TrialFailure>,
}

impl SuiteResult {
    pub fn all_succeeded(&self) -> bool {
        self.failures.is_empty()
    }
}

fn failure(spec: &TrialSpec, error: BackendError) -> TrialFailure {
    TrialFailure {
        trial_id: format!("{}-{}-{}-s{}", spec.task, spec.instance, spec.variant, spec.seed),
        task: spec.task,
        instance: spec.instance.clone(),
        variant: spec.variant,
        seed: spec.seed,
        steps_completed: 0,
        error: error.to_string(),
        kind: error,
    }
}

fn run_one<F>(spec: &TrialSpec, base: &AgentConfig, backends: &F) -> Result<TrialRecord, TrialFailure>
where
    F: Fn(&TrialSpec) -> Result<Backends, BackendError> + Sync,
{
    let task = load_domain(spec.task, &spec.instance)
        .map_err(|e| failure(spec, BackendError::InvalidRequest(e.to_string())))?;
    let b = backends(spec).map_err(|e| failure(spec, e))?;
    let config = AgentConfig {
        variant: spec.variant,
        seed: spec.seed,
        ..base.clone()
    };
    run_trial(&config, &task, &*b.policy, b.summarizer.as_deref())
}

/// Runs every trial with up to `parallelism` worker threads. `backends` is
/// called once per trial, so replay scripts can be per-trial while an HTTP
/// client can be shared. Output is ordered by (task, instance, variant, seed)
/// regardless of scheduling.
pub fn run_suite<F>(specs: &[TrialSpec], base: &AgentConfig, parallelism: usize, backends: F) -> SuiteResult
where
    F: Fn(&TrialSpec) -> Result<Backends, BackendError> + Sync,
{
    let mut ordered: Vec<&TrialSpec> = specs.iter().collect();
    ordered.sort();
    let run = || -> Vec<Result<TrialRecord, TrialFailure>> {
        ordered.par_iter().map(|s| run_one(s, base, &backends)).collect()
    };
    let outcomes = match rayon::ThreadPoolBuilder::new().num_threads(parallelism.max(1)).build() {
        Ok(pool) => pool.install(run),
        Err(_) => ordered.iter().map(|s| run_one(s, base, &backends)).collect(),
    };
    let mut result = SuiteResult::default();
    for o in outcomes {
        match o {
            Ok(r) => result.records.push(r),
            Err(f) => result.failures.push(f),
        }
    }
    result
}

/// One JSON document per line. With `include_wall` false every wall-clock
/// field is zeroed so reruns compare byte-for-byte.
pub fn records_to_jsonl(records: &[TrialRecord], include_wall: bool) -> String {
    let mut out = String::new();
    for r in records {
        let line = if include_wall {
            serde_json::to_string(r)
        } else {
            serde_json::to_string(&r.without_wall_time())
        }
        .expect("records serialize");
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn records_from_jsonl(text: &str) -> Result<Vec<TrialRecord>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}

/// Writes `{trial_id}.jsonl` per trial, one log event per line.
pub fn write_trajectory_logs(dir: &Path, records: &[TrialRecord]) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    for r in records {
        let mut text = String::new();
        for e in &r.events {
            text.push_str(&serde_json::to_string(e).map_err(io::Error::other)?);
            text.push('\n');
        }
        fs::write(dir.join(format!("{}.jsonl", r.trial_id)), text)?;
    }
    Ok(())
}
