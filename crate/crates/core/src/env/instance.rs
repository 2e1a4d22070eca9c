//! Plain-text instance files.
//!
//! ```text
//! # comment
//! OBJECTS
//! b1: block
//! b2: block
//! INIT
//! on-table(b1)
//! arm-empty()
//! GOAL
//! on(b1,b2)
//! ```
//!
//! Every fact is `predicate(arg,...)`; zero-arity predicates may drop the
//! parentheses. Unknown predicates, objects, or types are rejected with the
//! offending line number.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use super::schema::Domain;
use super::state::{EnvState, Fact, GoalSpec, ObjectTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct InstanceError {
    pub line: usize,
    pub message: String,
}

impl InstanceError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Objects,
    Init,
    Goal,
}

/// Parsed initial state and goal of one instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub state: EnvState,
    pub goal: GoalSpec,
}

fn split_fact(text: &str) -> Option<(&str, Vec<&str>)> {
    let text = text.trim();
    match text.find('(') {
        None => {
            if text.is_empty() || text.contains(char::is_whitespace) || text.contains(')') {
                None
            } else {
                Some((text, Vec::new()))
            }
        }
        Some(open) => {
            let inner = text[open + 1..].strip_suffix(')')?;
            let name = text[..open].trim();
            if name.is_empty() {
                return None;
            }
            let args: Vec<&str> = if inner.trim().is_empty() {
                Vec::new()
            } else {
                inner.split(',').map(str::trim).collect()
            };
            if args.iter().any(|a| a.is_empty()) {
                return None;
            }
            Some((name, args))
        }
    }
}

pub fn parse_instance(domain: &Domain, text: &str) -> Result<Instance, InstanceError> {
    let mut section = None;
    let mut seen = Vec::new();
    let mut objects: Vec<(String, String, usize)> = Vec::new();
    let mut init_lines = Vec::new();
    let mut goal_lines = Vec::new();
    let total_lines = text.lines().count();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let header = match line {
            "OBJECTS" => Some(Section::Objects),
            "INIT" => Some(Section::Init),
            "GOAL" => Some(Section::Goal),
            _ => None,
        };
        if let Some(h) = header {
            if seen.contains(&h) {
                return Err(InstanceError::new(line_no, format!("duplicate {line} section")));
            }
            seen.push(h);
            section = Some(h);
            continue;
        }
        match section {
            None => {
                return Err(InstanceError::new(
                    line_no,
                    "content before the first section header",
                ))
            }
            Some(Section::Objects) => {
                let (name, ty) = line.split_once(':').ok_or_else(|| {
                    InstanceError::new(line_no, "expected `name: type` in OBJECTS")
                })?;
                let (name, ty) = (name.trim(), ty.trim());
                if name.is_empty() || name.contains(char::is_whitespace) {
                    return Err(InstanceError::new(line_no, format!("bad object name `{name}`")));
                }
                if !domain.spec.types.contains(&ty) {
                    return Err(InstanceError::new(
                        line_no,
                        format!("unknown type `{ty}` for domain {}", domain.kind()),
                    ));
                }
                if domain.is_reserved_word(name) {
                    return Err(InstanceError::new(
                        line_no,
                        format!("object name `{name}` is a reserved action word"),
                    ));
                }
                if objects.iter().any(|(n, _, _)| n == name) {
                    return Err(InstanceError::new(line_no, format!("duplicate object `{name}`")));
                }
                objects.push((name.to_string(), ty.to_string(), line_no));
            }
            Some(Section::Init) => init_lines.push((line_no, line)),
            Some(Section::Goal) => goal_lines.push((line_no, line)),
        }
    }

    for (s, label) in [
        (Section::Objects, "OBJECTS"),
        (Section::Init, "INIT"),
        (Section::Goal, "GOAL"),
    ] {
        if !seen.contains(&s) {
            return Err(InstanceError::new(
                total_lines,
                format!("missing {label} section"),
            ));
        }
    }

    let table = Arc::new(ObjectTable::new(
        objects.iter().map(|(n, t, _)| (n.clone(), t.clone())),
    ));
    let parse_fact = |line_no: usize, line: &str| -> Result<Fact, InstanceError> {
        let (pred, args) = split_fact(line)
            .ok_or_else(|| InstanceError::new(line_no, format!("malformed fact `{line}`")))?;
        domain
            .fact(&table, pred, &args)
            .map_err(|m| InstanceError::new(line_no, m))
    };

    let mut facts = BTreeSet::new();
    for (line_no, line) in init_lines {
        facts.insert(parse_fact(line_no, line)?);
    }
    let mut conditions = Vec::new();
    for (line_no, line) in goal_lines {
        let f = parse_fact(line_no, line)?;
        if !conditions.contains(&f) {
            conditions.push(f);
        }
    }
    let goal = GoalSpec::new(conditions)
        .ok_or_else(|| InstanceError::new(total_lines, "GOAL section is empty"))?;
    let state = EnvState::new(domain.kind(), table, facts);
    let violations = (domain.spec.invariants)(domain, &state);
    if let Some(v) = violations.first() {
        return Err(InstanceError::new(0, format!("initial state violates invariant: {v}")));
    }
    Ok(Instance { state, goal })
}

/// Serializes a state and goal back into the instance format.
pub fn write_instance(domain: &Domain, state: &EnvState, goal: &GoalSpec) -> String {
    let mut out = String::from("OBJECTS\n");
    for (_, name, ty) in state.objects.iter() {
        out.push_str(&format!("{name}: {ty}\n"));
    }
    out.push_str("INIT\n");
    for f in &state.facts {
        out.push_str(&domain.fact_to_string(&state.objects, f));
        out.push('\n');
    }
    out.push_str("GOAL\n");
    for f in &goal.conditions {
        out.push_str(&domain.fact_to_string(&state.objects, f));
        out.push('\n');
    }
    out
}
