//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use chunkwm_core::agent::{run_trial, AgentConfig, StepRecord, TrialRecord, Variant};
use chunkwm_core::backend::{AgentDecision, ChatBackend, ReplayBackend};
use chunkwm_core::domains::{load_domain, DomainKind, LoadedTask};
use chunkwm_core::env::schema::{AtomSpec, Term};
use chunkwm_core::env::{EnvState, Environment, GroundAction};
use rand::seq::IndexedRandom;
use rand::Rng;

pub const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{FIXTURES}/{name}")).unwrap()
}

// ---------------------------------------------------------------------------
// String-level STRIPS interpreter, written against the declarative tables only.

fn ground_atom(atom: &AtomSpec, args: &[String]) -> Option<String> {
    let mut parts = Vec::new();
    for t in atom.terms {
        parts.push(match t {
            Term::Param(i) => args.get(*i)?.clone(),
            Term::Const(c) => c.to_string(),
        });
    }
    Some(format!("{}({})", atom.pred, parts.join(",")))
}

/// A state as the oracle sees it: fact strings and object types by name.
pub struct StringState {
    pub facts: BTreeSet<String>,
    pub types: BTreeMap<String, String>,
}

impl StringState {
    pub fn of(state: &EnvState) -> Self {
        Self {
            facts: state.fact_strings().into_iter().collect(),
            types: state
                .objects
                .iter()
                .map(|(_, name, ty)| (name.to_string(), ty.to_string()))
                .collect(),
        }
    }

    /// Preconditions, parameter types and distinctness.
    pub fn applicable(&self, kind: DomainKind, schema: usize, args: &[String]) -> bool {
        let spec = &kind.spec().schemas[schema];
        if args.len() != spec.params.len() {
            return false;
        }
        for (a, allowed) in args.iter().zip(spec.params) {
            match self.types.get(a) {
                Some(t) if allowed.contains(&t.as_str()) => {}
                _ => return false,
            }
        }
        if spec.distinct.iter().any(|&(i, j)| args[i] == args[j]) {
            return false;
        }
        spec.pre
            .iter()
            .all(|p| ground_atom(p, args).is_some_and(|f| self.facts.contains(&f)))
    }
}

pub fn naive_applicable(kind: DomainKind, state: &EnvState, schema: usize, args: &[String]) -> bool {
    StringState::of(state).applicable(kind, schema, args)
}

/// `(facts - del) + add`, as sorted fact strings.
pub fn naive_apply(kind: DomainKind, state: &EnvState, schema: usize, args: &[String]) -> Vec<String> {
    let spec = &kind.spec().schemas[schema];
    let mut facts: BTreeSet<String> = state.fact_strings().into_iter().collect();
    for d in spec.del {
        if let Some(f) = ground_atom(d, args) {
            facts.remove(&f);
        }
    }
    for a in spec.add {
        if let Some(f) = ground_atom(a, args) {
            facts.insert(f);
        }
    }
    facts.into_iter().collect()
}

pub fn arg_names(state: &EnvState, action: &GroundAction) -> Vec<String> {
    action.args.iter().map(|&a| state.objects.name(a)).collect()
}

/// Every object tuple of every schema's arity, typed or not.
pub fn all_tuples(kind: DomainKind, state: &EnvState) -> Vec<GroundAction> {
    let n = state.objects.len();
    let mut out = Vec::new();
    for (sid, spec) in kind.spec().schemas.iter().enumerate() {
        let arity = spec.params.len();
        let mut idx = vec![0u16; arity];
        loop {
            out.push(GroundAction::new(sid as u8, &idx));
            let mut k = arity;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                idx[k] += 1;
                if (idx[k] as usize) < n {
                    break;
                }
                idx[k] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    out
}

/// States visited by a uniform random walk over valid actions.
pub fn random_walk_states(task: &LoadedTask, rng: &mut impl Rng, len: usize) -> Vec<EnvState> {
    let domain = task.kind.domain();
    let mut s = task.state.clone();
    let mut out = vec![s.clone()];
    for _ in 0..len {
        let valid = domain.enumerate_valid(&s);
        let Some(a) = valid.choose(rng) else { break };
        s = domain.apply(&s, a);
        out.push(s.clone());
    }
    out
}

// ---------------------------------------------------------------------------
// Random action strings.

const JUNK: &[&str] = &[
    "the", "a", "from", "on", "in", "to", "with", "hub", "nut", "boot", "please", "xyzzy", "42", "retrieve(1)",
    "", "!!", "look", "check", "valid", "actions", "around", "of", "fastening", "room", "hand", "left", "right",
];

/// Mixture of well-formed surfaces, shuffled word salads over the domain's
/// vocabulary, and junk.
pub fn random_action_string(task: &LoadedTask, state: &EnvState, rng: &mut impl Rng) -> String {
    let domain = task.kind.domain();
    let objects: Vec<String> = state.objects.iter().map(|(_, n, _)| n.to_string()).collect();
    let schemas: Vec<&str> = domain.schemas().iter().map(|s| s.name).collect();
    match rng.random_range(0..5) {
        0 => {
            // surface of a random tuple (often ill-typed or inapplicable)
            let sid = rng.random_range(0..schemas.len());
            let arity = domain.schemas()[sid].params.len();
            let args: Vec<u16> = (0..arity).map(|_| rng.random_range(0..objects.len()) as u16).collect();
            let surface = GroundAction::new(sid as u8, &args).surface(domain, &state.objects);
            if rng.random_bool(0.5) {
                surface.to_lowercase()
            } else {
                surface
            }
        }
        1 => {
            let n = rng.random_range(1..6);
            (0..n)
                .map(|_| match rng.random_range(0..3) {
                    0 => schemas.choose(rng).unwrap().to_string(),
                    1 => objects.choose(rng).unwrap().clone(),
                    _ => JUNK.choose(rng).unwrap().to_string(),
                })
                .collect::<Vec<_>>()
                .join(" ")
        }
        2 => {
            let name = schemas.choose(rng).unwrap();
            let n = rng.random_range(0..8);
            let args: Vec<String> = (0..n).map(|_| objects.choose(rng).unwrap().clone()).collect();
            format!("{name} {}", args.join(" "))
        }
        3 => {
            let len = rng.random_range(0..24);
            (0..len)
                .map(|_| {
                    let c = rng.random_range(0x20u8..0x7f);
                    c as char
                })
                .collect()
        }
        _ => format!("{} {}", JUNK.choose(rng).unwrap(), objects.choose(rng).unwrap()),
    }
}

// ---------------------------------------------------------------------------
// Scripted trials.

#[derive(Debug, Clone)]
pub struct ScriptChunk {
    pub subgoal: String,
    pub actions: Vec<String>,
}

const SUBGOAL_PHRASES: &[&str] = &[
    "Open the boot to access the tools.",
    "Fetch the tools needed next.",
    "Work on the next goal condition.",
    "Check which actions are available.",
    "Move the objects into place.",
    "Recover from the failed attempt.",
];

/// Random subgoal-chunked policy script. Actions are drawn along a random
/// walk (so many are executable), mixed with invalid strings, meta-actions,
/// and (when `retrieve` is set) retrievals of earlier chunks.
pub fn random_chunks(task: &LoadedTask, rng: &mut impl Rng, retrieve: bool, min_steps: usize) -> Vec<ScriptChunk> {
    let domain = task.kind.domain();
    let mut state = task.state.clone();
    let n_chunks = rng.random_range(2..7);
    let mut chunks = Vec::new();
    for c in 0..n_chunks {
        let len = rng.random_range(min_steps.max(1)..=min_steps.max(1) + 3);
        let mut actions = Vec::new();
        for j in 0..len {
            let roll = rng.random_range(0..10);
            let a = if retrieve && c > 0 && j == 0 && roll < 3 {
                format!("retrieve({})", rng.random_range(1..=c + 1))
            } else if roll < 6 {
                match domain.enumerate_valid(&state).choose(rng) {
                    Some(a) => {
                        let s = a.surface(domain, &state.objects);
                        state = domain.apply(&state, a);
                        s
                    }
                    None => "look around".into(),
                }
            } else if roll < 8 {
                format!("frobnicate widget{}", rng.next_u32() % 1000)
            } else {
                "check valid actions".into()
            };
            actions.push(a);
        }
        chunks.push(ScriptChunk {
            subgoal: SUBGOAL_PHRASES.choose(rng).unwrap().to_string(),
            actions,
        });
    }
    chunks
}

pub fn policy_replies(chunks: &[ScriptChunk]) -> Vec<String> {
    let mut out = Vec::new();
    for c in chunks {
        for (j, a) in c.actions.iter().enumerate() {
            if j == 0 {
                out.push(format!("Subgoal: {}\nAction: {a}", c.subgoal));
            } else {
                out.push(format!("Action: {a}"));
            }
        }
    }
    out
}

pub struct ScriptedRun {
    pub record: TrialRecord,
    pub prompts: Vec<String>,
}

/// Runs `chunks` as the policy, with a separate summarizer that answers
/// `Summary {n}. Subgoal is met.`
pub fn run_scripted(task: &LoadedTask, variant: Variant, chunks: &[ScriptChunk]) -> ScriptedRun {
    let replies = policy_replies(chunks);
    let policy = Arc::new(ReplayBackend::new(replies.clone()));
    let summaries: Vec<String> = (1..=chunks.len() + 1).map(|n| format!("Summary {n}. Subgoal is met.")).collect();
    let summarizer = ReplayBackend::new(summaries);
    let mut config = AgentConfig::new(variant);
    config.max_steps = replies.len();
    let record = run_trial(&config, task, &*policy, Some(&summarizer as &dyn ChatBackend)).unwrap();
    ScriptedRun {
        record,
        prompts: policy.prompts(),
    }
}

// ---------------------------------------------------------------------------
// Memory reconstruction from a trial record, independent of WorkingMemory.

#[derive(Debug, Clone, Default)]
pub struct ShadowChunk {
    pub id: usize,
    pub subgoal: String,
    pub lines: Vec<String>,
    /// Collapsed observation line once closed.
    pub summary: Option<String>,
    pub expanded: bool,
}

/// Chunk states as seen by the prompt of step `step` (1-based), i.e. after
/// steps `1..step` were dispatched, for a trial run by [`run_scripted`].
/// A new subgoal closes the open chunk (with the scripted summary, or the
/// last observation when the variant does not summarize) and clears
/// expansions; a valid retrieval expands a closed chunk.
pub fn shadow_chunks(steps: &[StepRecord], step: usize, variant: Variant) -> Vec<ShadowChunk> {
    let mut chunks: Vec<ShadowChunk> = Vec::new();
    for s in steps.iter().take(step - 1) {
        let mut retrieve_target = None;
        match &s.decision {
            AgentDecision::NewSubgoal { subgoal, action } => {
                let n = chunks.len();
                if let Some(open) = chunks.last_mut() {
                    open.summary = Some(if variant.summarizes() {
                        format!("Observation: Summary {n}. Subgoal is met.")
                    } else {
                        open.lines.last().cloned().unwrap()
                    });
                }
                for c in chunks.iter_mut() {
                    c.expanded = false;
                }
                chunks.push(ShadowChunk {
                    id: n + 1,
                    subgoal: subgoal.clone(),
                    ..Default::default()
                });
                retrieve_target = AgentDecision::retrieval_target(action);
            }
            AgentDecision::Retrieve { chunk_id } => retrieve_target = Some(*chunk_id),
            _ => {}
        }
        if let Some(k) = retrieve_target {
            if variant.retrieval_enabled() && k >= 1 && k <= chunks.len() && chunks[k - 1].summary.is_some() {
                chunks[k - 1].expanded = true;
            }
        }
        if let Some(open) = chunks.last_mut() {
            open.lines.push(format!("Action: {}", s.action_text));
            open.lines.push(format!("Observation: {}", s.observation));
        }
    }
    chunks
}

/// Whether a closed chunk shows only its subgoal and summary.
pub fn shadow_collapsed(c: &ShadowChunk, variant: Variant) -> bool {
    c.summary.is_some() && !c.expanded && variant != Variant::Td
}

pub fn shadow_block(c: &ShadowChunk, variant: Variant) -> String {
    let mut lines = vec![format!("{} Subgoal: {}", c.id, c.subgoal)];
    if shadow_collapsed(c, variant) {
        lines.push(c.summary.clone().unwrap());
    } else {
        lines.extend(c.lines.iter().cloned());
    }
    lines.join("\n")
}

/// Expected memory rendering: initial observation, blank line, chunk blocks
/// separated by blank lines.
pub fn shadow_render(initial: &str, chunks: &[ShadowChunk], variant: Variant) -> String {
    let mut out = format!("Observation: {initial}");
    if !chunks.is_empty() {
        out.push_str("\n\n");
        out.push_str(&chunks.iter().map(|c| shadow_block(c, variant)).collect::<Vec<_>>().join("\n\n"));
    }
    out
}

// ---------------------------------------------------------------------------
// Wilcoxon by enumeration.

/// Average ranks of `|d|` by counting, O(n^2).
pub fn naive_ranks(d: &[f64]) -> Vec<f64> {
    d.iter()
        .map(|x| {
            let less = d.iter().filter(|y| y.abs() < x.abs()).count() as f64;
            let eq = d.iter().filter(|y| y.abs() == x.abs()).count() as f64;
            less + (eq + 1.0) / 2.0
        })
        .collect()
}

/// `(W, p)` with p = share of the 2^n sign assignments whose W is at most
/// the observed one.
pub fn brute_force_wilcoxon(x: &[f64], y: &[f64]) -> (f64, f64) {
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
    let ranks = naive_ranks(&d);
    let total: f64 = ranks.iter().sum();
    let plus: f64 = ranks.iter().zip(&d).filter(|(_, d)| **d > 0.0).map(|(r, _)| r).sum();
    let w = plus.min(total - plus);
    let n = d.len();
    let mut hits = 0u64;
    for mask in 0u64..(1 << n) {
        let p: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if p.min(total - p) <= w + 1e-9 {
            hits += 1;
        }
    }
    (w, hits as f64 / (1u64 << n) as f64)
}

// ---------------------------------------------------------------------------
// Random trial records for metric oracles.

pub fn random_record(rng: &mut impl Rng, task: DomainKind, variant: Variant, idx: usize) -> TrialRecord {
    let max_steps = rng.random_range(1..=30);
    let steps_used = rng.random_range(0..=max_steps);
    let total = rng.random_range(1..=6u32);
    let initial = rng.random_range(0..total) as f64 / total as f64;
    let mut best = initial;
    let mut per_step = Vec::new();
    for i in 1..=steps_used {
        let p = rng.random_range(0..=total) as f64 / total as f64;
        best = best.max(p);
        per_step.push(StepRecord {
            step_index: i,
            decision: AgentDecision::Act { action: "x".into() },
            action_text: "x".into(),
            observation: "y".into(),
            executable: rng.random_bool(0.6),
            progress: p,
            context_tokens: rng.random_range(50..2000),
            wall_ms: rng.random_range(0.0..100.0),
        });
    }
    let final_progress = per_step.last().map(|s| s.progress).unwrap_or(initial);
    TrialRecord {
        trial_id: format!("{task}-{idx}-{variant}"),
        task,
        instance: format!("i{idx}"),
        variant,
        seed: idx as u64,
        max_steps,
        per_step,
        initial_progress: initial,
        final_progress,
        max_progress: best,
        success: best == 1.0,
        steps_used,
        chunks: 0,
        total_wall_ms: rng.random_range(1.0..5000.0),
        degradations: vec![],
        events: vec![],
    }
}

pub fn load(kind: DomainKind, id: &str) -> LoadedTask {
    load_domain(kind, id).unwrap()
}

pub fn replay(kind: DomainKind, id: &str, actions: &[&str]) -> Vec<String> {
    let task = load(kind, id);
    let mut env = Environment::new(task.state.clone(), task.goal.clone());
    actions.iter().map(|a| env.act(a).observation).collect()
}
