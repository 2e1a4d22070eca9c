//! The four bundled planning domains and their instance files.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{parse_instance, Domain, EnvState, Fact, GoalSpec, InstanceError, ParsedAction};

pub mod barman;
pub mod blocksworld;
pub mod gripper;
pub mod tyreworld;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Blocksworld,
    Gripper,
    Tyreworld,
    Barman,
}

impl DomainKind {
    pub const ALL: [DomainKind; 4] = [
        DomainKind::Blocksworld,
        DomainKind::Gripper,
        DomainKind::Tyreworld,
        DomainKind::Barman,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DomainKind::Blocksworld => "blocksworld",
            DomainKind::Gripper => "gripper",
            DomainKind::Tyreworld => "tyreworld",
            DomainKind::Barman => "barman",
        }
    }

    pub fn spec(self) -> &'static crate::env::DomainSpec {
        match self {
            DomainKind::Blocksworld => &blocksworld::SPEC,
            DomainKind::Gripper => &gripper::SPEC,
            DomainKind::Tyreworld => &tyreworld::SPEC,
            DomainKind::Barman => &barman::SPEC,
        }
    }

    /// The compiled domain, built once per process.
    pub fn domain(self) -> &'static Domain {
        static CELLS: [OnceLock<Domain>; 4] = [
            OnceLock::new(),
            OnceLock::new(),
            OnceLock::new(),
            OnceLock::new(),
        ];
        CELLS[self as usize].get_or_init(|| Domain::compile(self.spec()))
    }

    fn bundle(self) -> &'static Bundle {
        match self {
            DomainKind::Blocksworld => &BLOCKSWORLD,
            DomainKind::Gripper => &GRIPPER,
            DomainKind::Tyreworld => &TYREWORLD,
            DomainKind::Barman => &BARMAN,
        }
    }

    /// Identifiers of the bundled instances, in a fixed order.
    pub fn instances(self) -> Vec<&'static str> {
        self.bundle().instances.iter().map(|i| i.id).collect()
    }
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("task '{0}' is out of scope: it needs an external interactive-fiction game suite")]
    OutOfScope(String),
    #[error("unknown task '{0}' (expected blocksworld, gripper, tyreworld or barman)")]
    UnknownDomain(String),
    #[error("{domain} has no bundled instance '{instance}'")]
    UnknownInstance { domain: DomainKind, instance: String },
    #[error("{domain}/{instance}: {source}")]
    Instance {
        domain: DomainKind,
        instance: String,
        source: InstanceError,
    },
    #[error("{domain}/{instance} plan line {line}: '{text}' does not parse")]
    Plan {
        domain: DomainKind,
        instance: String,
        line: usize,
        text: String,
    },
}

impl FromStr for DomainKind {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        DomainKind::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| {
                if lower == "jericho" {
                    DomainError::OutOfScope(s.to_string())
                } else {
                    DomainError::UnknownDomain(s.to_string())
                }
            })
    }
}

/// Number of facts with predicate `pred` whose arguments satisfy `filter`.
pub(crate) fn count_facts(state: &EnvState, pred: u8, filter: impl Fn(&[u16; 2]) -> bool) -> usize {
    let lo = Fact { pred, args: [0, 0] };
    let hi = Fact {
        pred,
        args: [u16::MAX, u16::MAX],
    };
    state.facts.range(lo..=hi).filter(|f| filter(&f.args)).count()
}

struct BundledInstance {
    id: &'static str,
    text: &'static str,
    plan: &'static str,
    /// Depth bound used by solvability checks.
    max_depth: usize,
}

struct Bundle {
    instructions: &'static str,
    example_std: &'static str,
    example_ours: &'static str,
    instances: &'static [BundledInstance],
}

macro_rules! data {
    ($path:literal) => {
        include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/", $path))
    };
}

macro_rules! instance {
    ($dom:literal, $id:literal, $depth:expr) => {
        BundledInstance {
            id: $id,
            text: include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/", $dom, "/", $id, ".inst")),
            plan: include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/", $dom, "/", $id, ".plan")),
            max_depth: $depth,
        }
    };
}

static BLOCKSWORLD: Bundle = Bundle {
    instructions: data!("blocksworld/instructions.txt"),
    example_std: data!("blocksworld/example_std.txt"),
    example_ours: data!("blocksworld/example_ours.txt"),
    instances: &[
        instance!("blocksworld", "b3", 10),
        instance!("blocksworld", "b4", 14),
        instance!("blocksworld", "b5", 16),
    ],
};

static GRIPPER: Bundle = Bundle {
    instructions: data!("gripper/instructions.txt"),
    example_std: data!("gripper/example_std.txt"),
    example_ours: data!("gripper/example_ours.txt"),
    instances: &[
        instance!("gripper", "g1", 6),
        instance!("gripper", "g2", 10),
        instance!("gripper", "g3", 14),
        instance!("gripper", "g4", 14),
    ],
};

static TYREWORLD: Bundle = Bundle {
    instructions: data!("tyreworld/instructions.txt"),
    example_std: data!("tyreworld/example_std.txt"),
    example_ours: data!("tyreworld/example_ours.txt"),
    instances: &[
        instance!("tyreworld", "t1", 10),
        instance!("tyreworld", "t2", 16),
    ],
};

static BARMAN: Bundle = Bundle {
    instructions: data!("barman/instructions.txt"),
    example_std: data!("barman/example_std.txt"),
    example_ours: data!("barman/example_ours.txt"),
    instances: &[instance!("barman", "m1", 14)],
};

/// A loaded task: initial state, goal, and the prompt material for its domain.
#[derive(Debug, Clone)]
pub struct LoadedTask {
    pub kind: DomainKind,
    pub instance: String,
    pub state: EnvState,
    pub goal: GoalSpec,
    pub instructions: &'static str,
    pub example_std: &'static str,
    pub example_ours: &'static str,
    pub max_depth: usize,
}

fn find(kind: DomainKind, instance: &str) -> Result<&'static BundledInstance, DomainError> {
    kind.bundle()
        .instances
        .iter()
        .find(|i| i.id == instance)
        .ok_or_else(|| DomainError::UnknownInstance {
            domain: kind,
            instance: instance.to_string(),
        })
}

pub fn load_domain(kind: DomainKind, instance: &str) -> Result<LoadedTask, DomainError> {
    let bundled = find(kind, instance)?;
    let bundle = kind.bundle();
    let parsed = parse_instance(kind.domain(), bundled.text).map_err(|source| DomainError::Instance {
        domain: kind,
        instance: instance.to_string(),
        source,
    })?;
    Ok(LoadedTask {
        kind,
        instance: instance.to_string(),
        state: parsed.state,
        goal: parsed.goal,
        instructions: bundle.instructions.trim_end(),
        example_std: bundle.example_std.trim_end(),
        example_ours: bundle.example_ours.trim_end(),
        max_depth: bundled.max_depth,
    })
}

/// Raw action lines of the stored reference plan (comments and blanks removed).
pub fn reference_plan_lines(kind: DomainKind, instance: &str) -> Result<Vec<&'static str>, DomainError> {
    let bundled = find(kind, instance)?;
    Ok(bundled
        .plan
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .collect())
}

/// The stored reference plan, normalized against the instance's objects.
/// Meta-actions in the file are kept; they do not change the state.
pub fn reference_plans(kind: DomainKind, instance: &str) -> Result<Vec<ParsedAction>, DomainError> {
    let task = load_domain(kind, instance)?;
    let domain = kind.domain();
    reference_plan_lines(kind, instance)?
        .into_iter()
        .enumerate()
        .map(|(i, line)| match domain.normalize_action(&task.state.objects, line) {
            ParsedAction::Unparseable(text) => Err(DomainError::Plan {
                domain: kind,
                instance: instance.to_string(),
                line: i + 1,
                text,
            }),
            parsed => Ok(parsed),
        })
        .collect()
}
