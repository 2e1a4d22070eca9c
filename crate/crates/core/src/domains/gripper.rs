use crate::atom;
use crate::env::schema::{Domain, DomainSpec, PredicateSpec, SchemaSpec, P0, P1, P2};
use crate::env::EnvState;

use super::{count_facts, DomainKind};

const ROOM: &[&str] = &["room"];
const BALL: &[&str] = &["ball"];
const GRIPPER: &[&str] = &["gripper"];

pub static SPEC: DomainSpec = DomainSpec {
    kind: DomainKind::Gripper,
    types: &["room", "ball", "gripper"],
    predicates: &[
        PredicateSpec { name: "room", params: &[ROOM], template: "Room {0}.", goal_template: None },
        PredicateSpec { name: "ball", params: &[BALL], template: "{0} is a ball.", goal_template: None },
        PredicateSpec { name: "gripper", params: &[GRIPPER], template: "{0} is a gripper.", goal_template: None },
        PredicateSpec { name: "at-robby", params: &[ROOM], template: "Robby is at {0}.", goal_template: None },
        PredicateSpec { name: "at", params: &[BALL, ROOM], template: "{0} is at {1}.", goal_template: None },
        PredicateSpec { name: "free", params: &[GRIPPER], template: "{0} is free.", goal_template: None },
        PredicateSpec { name: "carry", params: &[BALL, GRIPPER], template: "{0} is carrying {1}.", goal_template: None },
    ],
    schemas: &[
        SchemaSpec {
            name: "move",
            params: &[ROOM, ROOM],
            pre: &[atom!("at-robby", P0)],
            add: &[atom!("at-robby", P1)],
            del: &[atom!("at-robby", P0)],
            distinct: &[(0, 1)],
            observe: &[atom!("at-robby", P1)],
            surface: "Move from {0} to {1}.",
        },
        SchemaSpec {
            name: "pick",
            params: &[BALL, ROOM, GRIPPER],
            pre: &[atom!("at", P0, P1), atom!("at-robby", P1), atom!("free", P2)],
            add: &[atom!("carry", P0, P2)],
            del: &[atom!("at", P0, P1), atom!("free", P2)],
            distinct: &[],
            observe: &[atom!("carry", P0, P2)],
            surface: "Pick up {0} at {1} with arm {2}.",
        },
        SchemaSpec {
            name: "drop",
            params: &[BALL, ROOM, GRIPPER],
            pre: &[atom!("carry", P0, P2), atom!("at-robby", P1)],
            add: &[atom!("at", P0, P1), atom!("free", P2)],
            del: &[atom!("carry", P0, P2)],
            distinct: &[],
            observe: &[atom!("at", P0, P1)],
            surface: "Drop {0} at {1} with arm {2}.",
        },
    ],
    capitalize: true,
    fillers: &["from", "to", "up", "at", "with", "arm", "in", "the", "room", "ball", "gripper", "using", "hand", "a"],
    aliases: &[("pick-up", "pick"), ("pickup", "pick"), ("put-down", "drop")],
    invariants,
};

fn invariants(domain: &Domain, state: &EnvState) -> Vec<String> {
    let mut out = Vec::new();
    let id = |p: &str| domain.predicate_id(p).expect("gripper predicate");
    let (at_robby, at, free, carry) = (id("at-robby"), id("at"), id("free"), id("carry"));
    let robby = count_facts(state, at_robby, |_| true);
    if robby != 1 {
        out.push(format!("robot is in {robby} rooms"));
    }
    for b in state.objects.of_types(BALL) {
        let places =
            count_facts(state, at, |a| a[0] == b) + count_facts(state, carry, |a| a[0] == b);
        if places != 1 {
            out.push(format!("{} is in {places} places", state.objects.name(b)));
        }
    }
    for g in state.objects.of_types(GRIPPER) {
        let load = count_facts(state, carry, |a| a[1] == g);
        let is_free = count_facts(state, free, |a| a[0] == g) == 1;
        if load > 1 {
            out.push(format!("{} carries {load} balls", state.objects.name(g)));
        }
        if is_free == (load > 0) {
            out.push(format!("free({}) disagrees with its load", state.objects.name(g)));
        }
    }
    out
}
