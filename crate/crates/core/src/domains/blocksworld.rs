use crate::atom;
use crate::env::schema::{Domain, DomainSpec, PredicateSpec, SchemaSpec, P0, P1};
use crate::env::EnvState;

use super::{count_facts, DomainKind};

const B: &[&str] = &["block"];

pub static SPEC: DomainSpec = DomainSpec {
    kind: DomainKind::Blocksworld,
    types: &["block"],
    predicates: &[
        PredicateSpec { name: "on", params: &[B, B], template: "{0} is on {1}.", goal_template: None },
        PredicateSpec { name: "on-table", params: &[B], template: "{0} is on the table.", goal_template: None },
        PredicateSpec { name: "clear", params: &[B], template: "The {0} is clear.", goal_template: None },
        PredicateSpec { name: "arm-empty", params: &[], template: "Robot arm is empty.", goal_template: None },
        PredicateSpec { name: "holding", params: &[B], template: "You have {0}.", goal_template: None },
    ],
    schemas: &[
        SchemaSpec {
            name: "pickup",
            params: &[B],
            pre: &[atom!("clear", P0), atom!("on-table", P0), atom!("arm-empty")],
            add: &[atom!("holding", P0)],
            del: &[atom!("clear", P0), atom!("on-table", P0), atom!("arm-empty")],
            distinct: &[],
            observe: &[atom!("holding", P0)],
            surface: "Pickup {0}.",
        },
        SchemaSpec {
            name: "putdown",
            params: &[B],
            pre: &[atom!("holding", P0)],
            add: &[atom!("clear", P0), atom!("arm-empty"), atom!("on-table", P0)],
            del: &[atom!("holding", P0)],
            distinct: &[],
            observe: &[atom!("on-table", P0)],
            surface: "Putdown {0}.",
        },
        SchemaSpec {
            name: "stack",
            params: &[B, B],
            pre: &[atom!("holding", P0), atom!("clear", P1)],
            add: &[atom!("arm-empty"), atom!("clear", P0), atom!("on", P0, P1)],
            del: &[atom!("holding", P0), atom!("clear", P1)],
            distinct: &[(0, 1)],
            observe: &[atom!("on", P0, P1)],
            surface: "Stack {0} on {1}.",
        },
        SchemaSpec {
            name: "unstack",
            params: &[B, B],
            pre: &[atom!("on", P0, P1), atom!("clear", P0), atom!("arm-empty")],
            add: &[atom!("holding", P0), atom!("clear", P1)],
            del: &[atom!("on", P0, P1), atom!("clear", P0), atom!("arm-empty")],
            distinct: &[(0, 1)],
            observe: &[atom!("holding", P0), atom!("clear", P1)],
            surface: "Unstack {0} from {1}.",
        },
    ],
    capitalize: false,
    fillers: &["the", "on", "onto", "from", "to", "top", "of", "block", "table", "a"],
    aliases: &[("pick-up", "pickup"), ("put-down", "putdown")],
    invariants,
};

fn invariants(domain: &Domain, state: &EnvState) -> Vec<String> {
    let mut out = Vec::new();
    let id = |p: &str| domain.predicate_id(p).expect("blocksworld predicate");
    let (on, table, clear, empty, holding) = (
        id("on"),
        id("on-table"),
        id("clear"),
        id("arm-empty"),
        id("holding"),
    );
    let held = count_facts(state, holding, |_| true);
    if held > 1 {
        out.push(format!("{held} blocks held at once"));
    }
    let arm_empty = count_facts(state, empty, |_| true) == 1;
    if arm_empty == (held == 1) {
        out.push("arm-empty must hold exactly when no block is held".into());
    }
    for b in state.objects.of_types(B) {
        let name = state.objects.name(b);
        let places = count_facts(state, table, |a| a[0] == b)
            + count_facts(state, on, |a| a[0] == b)
            + count_facts(state, holding, |a| a[0] == b);
        if places != 1 {
            out.push(format!("{name} is in {places} places"));
        }
        let covered = count_facts(state, on, |a| a[1] == b) > 0;
        let is_held = count_facts(state, holding, |a| a[0] == b) > 0;
        let is_clear = count_facts(state, clear, |a| a[0] == b) > 0;
        if is_clear != (!covered && !is_held) {
            out.push(format!("clear({name}) disagrees with what is on it"));
        }
        if count_facts(state, on, |a| a[1] == b) > 1 {
            out.push(format!("more than one block on {name}"));
        }
        if count_facts(state, on, |a| a[0] == b && a[1] == b) > 0 {
            out.push(format!("{name} is on itself"));
        }
    }
    out
}
