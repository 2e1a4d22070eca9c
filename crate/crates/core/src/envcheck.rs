//! Self-checks for the bundled domains: schema table, domain invariants over
//! reachable states, validity agreement, reference-plan and BFS solvability,
//! and transcript replay against the domain's worked example.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::domains::{load_domain, reference_plans, DomainKind};
use crate::env::{
    bfs_solve, meta_action, reachable_states, Environment, GroundAction, ParsedAction, INVALID_ACTION_OBSERVATION,
};

/// Instances with more reachable states than this skip the exhaustive checks.
pub const EXHAUSTIVE_STATE_LIMIT: usize = 10_000;

/// Schema names and arities per domain, in declaration order.
pub fn expected_schemas(kind: DomainKind) -> &'static [(&'static str, usize)] {
    match kind {
        DomainKind::Blocksworld => &[("pickup", 1), ("putdown", 1), ("stack", 2), ("unstack", 2)],
        DomainKind::Gripper => &[("move", 2), ("pick", 3), ("drop", 3)],
        DomainKind::Tyreworld => &[
            ("open", 1),
            ("close", 1),
            ("fetch", 2),
            ("put-away", 2),
            ("loosen", 2),
            ("tighten", 2),
            ("jack-up", 1),
            ("jack-down", 1),
            ("undo", 2),
            ("do-up", 2),
            ("remove-wheel", 2),
            ("put-on-wheel", 2),
            ("inflate", 1),
        ],
        DomainKind::Barman => &[
            ("grasp", 2),
            ("leave", 2),
            ("fill-shot", 5),
            ("refill-shot", 5),
            ("empty-shot", 3),
            ("clean-shot", 4),
            ("pour-shot-to-clean-shaker", 6),
            ("pour-shot-to-used-shaker", 6),
            ("empty-shaker", 5),
            ("clean-shaker", 3),
            ("shake", 6),
            ("pour-shaker-to-shot", 6),
        ],
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: String,
    /// Instance id, or `-` for domain-wide checks.
    pub instance: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvCheckReport {
    pub task: DomainKind,
    pub results: Vec<CheckResult>,
}

impl EnvCheckReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.results.iter().filter(|r| !r.passed)
    }

    /// One line per check: `PASS|FAIL  check  instance  detail`.
    pub fn matrix(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            out.push_str(&format!(
                "{:<4}  {:<20} {:<4} {}\n",
                if r.passed { "PASS" } else { "FAIL" },
                r.check,
                r.instance,
                r.detail
            ));
        }
        out
    }
}

fn result(check: &str, instance: &str, outcome: Result<String, String>) -> CheckResult {
    let passed = outcome.is_ok();
    CheckResult {
        check: check.into(),
        instance: instance.into(),
        passed,
        detail: outcome.unwrap_or_else(|e| e),
    }
}

fn check_schemas(kind: DomainKind) -> Result<String, String> {
    let got: Vec<(&str, usize)> = kind.spec().schemas.iter().map(|s| (s.name, s.params.len())).collect();
    let want = expected_schemas(kind);
    if got == want {
        Ok(format!("{} schemas", got.len()))
    } else {
        Err(format!("expected {want:?}, found {got:?}"))
    }
}

/// Every object tuple of the right arity, well-typed or not.
fn all_tuples(kind: DomainKind, n_objects: usize) -> Vec<GroundAction> {
    let mut out = Vec::new();
    for (sid, spec) in kind.spec().schemas.iter().enumerate() {
        let arity = spec.params.len();
        let total = n_objects.pow(arity as u32);
        for mut code in 0..total {
            let mut args = vec![0u16; arity];
            for slot in args.iter_mut().rev() {
                *slot = (code % n_objects) as u16;
                code /= n_objects;
            }
            out.push(GroundAction::new(sid as u8, &args));
        }
    }
    out
}

fn check_exhaustive(kind: DomainKind, instance: &str) -> Vec<CheckResult> {
    let task = match load_domain(kind, instance) {
        Ok(t) => t,
        Err(e) => return vec![result("load", instance, Err(e.to_string()))],
    };
    let domain = kind.domain();
    let states = match reachable_states(domain, &task.state, EXHAUSTIVE_STATE_LIMIT) {
        Ok(s) => s,
        Err(_) => {
            return vec![result(
                "exhaustive",
                instance,
                Ok(format!("skipped: more than {EXHAUSTIVE_STATE_LIMIT} reachable states")),
            )]
        }
    };

    let mut invariant_errors = Vec::new();
    for s in &states {
        for v in (domain.spec.invariants)(domain, s) {
            if invariant_errors.len() < 3 {
                invariant_errors.push(v);
            }
        }
    }
    let inv = if invariant_errors.is_empty() {
        Ok(format!("{} reachable states", states.len()))
    } else {
        Err(invariant_errors.join("; "))
    };

    // Tuples with more arity than 3 get expensive; the typed groundings
    // cover them instead.
    let n = task.state.objects.len();
    let tuples: Vec<GroundAction> = if kind.spec().schemas.iter().all(|s| s.params.len() <= 3) {
        all_tuples(kind, n)
    } else {
        domain.groundings(&task.state.objects)
    };
    let mut disagreements = Vec::new();
    let mut pairs = 0usize;
    for s in &states {
        let listed = domain.enumerate_valid(s);
        let listed: BTreeSet<&GroundAction> = listed.iter().collect();
        for a in &tuples {
            pairs += 1;
            let (next, out) = domain.step(s, &task.goal, &ParsedAction::Ground(a.clone()));
            let ok = out.executable == listed.contains(a)
                && (out.executable || (next.facts == s.facts && out.observation.starts_with(INVALID_ACTION_OBSERVATION)));
            if !ok && disagreements.len() < 3 {
                disagreements.push(format!("{} in state {:?}", a.signature(domain, &s.objects), s.fact_strings()));
            }
        }
        for a in &listed {
            let surface = a.surface(domain, &s.objects);
            if domain.normalize_action(&s.objects, &surface) != ParsedAction::Ground((*a).clone()) && disagreements.len() < 3 {
                disagreements.push(format!("surface '{surface}' does not parse back"));
            }
        }
    }
    let agree = if disagreements.is_empty() {
        Ok(format!("{pairs} (state, action) pairs"))
    } else {
        Err(disagreements.join("; "))
    };
    vec![result("invariants", instance, inv), result("validity-agreement", instance, agree)]
}

fn check_plans(kind: DomainKind, instance: &str, max_depth: usize) -> Vec<CheckResult> {
    let task = match load_domain(kind, instance) {
        Ok(t) => t,
        Err(e) => return vec![result("load", instance, Err(e.to_string()))],
    };
    let replay = reference_plans(kind, instance).map_err(|e| e.to_string()).and_then(|plan| {
        let mut env = Environment::new(task.state.clone(), task.goal.clone());
        for p in &plan {
            let out = env.execute(p);
            if !out.executable {
                return Err(format!("step {p:?} is not executable"));
            }
        }
        if env.progress().is_complete() {
            Ok(format!("{} steps reach the goal", plan.len()))
        } else {
            Err("plan ends before the goal".into())
        }
    });
    let domain = kind.domain();
    let bfs = match bfs_solve(domain, &task.state, &task.goal, max_depth) {
        None => Err(format!("no plan within depth {max_depth}")),
        Some(plan) => {
            let mut env = Environment::new(task.state.clone(), task.goal.clone());
            for a in &plan {
                env.execute(&ParsedAction::Ground(a.clone()));
            }
            if env.progress().is_complete() {
                Ok(format!("{} steps (bound {max_depth})", plan.len()))
            } else {
                Err("BFS plan does not reach the goal".into())
            }
        }
    };
    vec![result("reference-plan", instance, replay), result("bfs-solvable", instance, bfs)]
}

/// `Action:`/`Observation:` pairs following the blank line after the initial
/// observation of a worked example.
pub fn transcript_pairs(text: &str) -> Vec<(String, String)> {
    let mut pairs = Vec::new();
    let mut action: Option<String> = None;
    for line in text.lines() {
        let line = line.trim();
        if let Some(a) = line.strip_prefix("Action: ") {
            action = Some(a.to_string());
        } else if let Some(o) = line.strip_prefix("Observation: ") {
            if let Some(a) = action.take() {
                pairs.push((a, o.to_string()));
            }
        }
    }
    pairs
}

/// Items of a valid-actions listing, without meta-actions. `None` if `obs`
/// is not such a listing.
pub fn valid_action_items(obs: &str) -> Option<BTreeSet<String>> {
    let body = obs.strip_prefix("Valid actions are: ")?;
    let body = body.strip_suffix(" Check valid actions. Look around.").unwrap_or(body);
    Some(
        body.split(", ")
            .map(str::trim)
            .filter(|i| !i.is_empty() && meta_action(i).is_none())
            .map(str::to_string)
            .collect(),
    )
}

/// Observations match verbatim, except that valid-action listings compare as
/// sets (order and the meta-action tail are presentation details).
pub fn observations_match(expected: &str, got: &str) -> bool {
    if expected == got {
        return true;
    }
    match (valid_action_items(expected), valid_action_items(got)) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    }
}

/// Replays the domain's STD worked example against `instance`, comparing
/// every observation. Returns mismatches as `(turn, expected, got)`.
pub fn replay_transcript(kind: DomainKind, instance: &str) -> Result<Vec<(usize, String, String)>, String> {
    let task = load_domain(kind, instance).map_err(|e| e.to_string())?;
    let mut env = Environment::new(task.state.clone(), task.goal.clone());
    let mut mismatches = Vec::new();
    let pairs = transcript_pairs(task.example_std);
    if pairs.is_empty() {
        return Err("worked example has no action/observation pairs".into());
    }
    let initial = task
        .example_std
        .lines()
        .find_map(|l| l.strip_prefix("Observation: "))
        .unwrap_or("");
    if initial != env.observation() {
        mismatches.push((0, initial.to_string(), env.observation()));
    }
    for (i, (action, expected)) in pairs.iter().enumerate() {
        let got = env.act(action).observation;
        if !observations_match(expected, &got) {
            mismatches.push((i + 1, expected.clone(), got));
        }
    }
    Ok(mismatches)
}

/// Bundled instance each domain's worked example starts from, if any.
pub fn example_instance(kind: DomainKind) -> Option<&'static str> {
    match kind {
        DomainKind::Tyreworld => Some("t1"),
        _ => None,
    }
}

/// Runs every check for one domain.
pub fn envcheck(kind: DomainKind) -> EnvCheckReport {
    let mut results = vec![result("schemas", "-", check_schemas(kind))];
    if let Some(inst) = example_instance(kind) {
        let outcome = match replay_transcript(kind, inst) {
            Ok(m) if m.is_empty() => Ok("every observation reproduced".to_string()),
            Ok(m) => Err(m
                .iter()
                .map(|(t, e, g)| format!("turn {t}: expected '{e}', got '{g}'"))
                .collect::<Vec<_>>()
                .join("; ")),
            Err(e) => Err(e),
        };
        results.push(result("example-replay", inst, outcome));
    }
    for id in kind.instances() {
        let depth = load_domain(kind, id).map(|t| t.max_depth).unwrap_or(0);
        results.extend(check_exhaustive(kind, id));
        results.extend(check_plans(kind, id, depth));
    }
    EnvCheckReport { task: kind, results }
}
