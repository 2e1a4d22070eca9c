//! Barman: mixing cocktails with two hands, shot glasses and a shaker.
//!
//! Preconditions and effects follow the standard IPC barman domain, which the
//! action glosses only name.

use crate::atom;
use crate::env::schema::{Domain, DomainSpec, PredicateSpec, SchemaSpec, P0, P1, P2, P3, P4, P5};
use crate::env::EnvState;

use super::{count_facts, DomainKind};

const HAND: &[&str] = &["hand"];
const LEVEL: &[&str] = &["level"];
const INGREDIENT: &[&str] = &["ingredient"];
const COCKTAIL: &[&str] = &["cocktail"];
const BEVERAGE: &[&str] = &["ingredient", "cocktail"];
const DISPENSER: &[&str] = &["dispenser"];
const SHOT: &[&str] = &["shot"];
const SHAKER: &[&str] = &["shaker"];
const CONTAINER: &[&str] = &["shot", "shaker"];

pub static SPEC: DomainSpec = DomainSpec {
    kind: DomainKind::Barman,
    types: &["hand", "level", "ingredient", "cocktail", "dispenser", "shot", "shaker"],
    predicates: &[
        PredicateSpec { name: "ontable", params: &[CONTAINER], template: "{0} is on the table.", goal_template: None },
        PredicateSpec { name: "holding", params: &[HAND, CONTAINER], template: "{0} hand is holding {1}.", goal_template: None },
        PredicateSpec { name: "handempty", params: &[HAND], template: "{0} hand is empty.", goal_template: None },
        PredicateSpec { name: "empty", params: &[CONTAINER], template: "{0} is empty.", goal_template: None },
        PredicateSpec { name: "contains", params: &[CONTAINER, BEVERAGE], template: "{0} contains {1}.", goal_template: None },
        PredicateSpec { name: "clean", params: &[CONTAINER], template: "{0} is clean.", goal_template: None },
        PredicateSpec { name: "used", params: &[CONTAINER, BEVERAGE], template: "{0} is used with {1}.", goal_template: None },
        PredicateSpec { name: "dispenses", params: &[DISPENSER, INGREDIENT], template: "{0} dispenses {1}.", goal_template: None },
        PredicateSpec { name: "shaker-empty-level", params: &[SHAKER, LEVEL], template: "{0} is at empty level {1}.", goal_template: None },
        PredicateSpec { name: "shaker-level", params: &[SHAKER, LEVEL], template: "{0} is at level {1}.", goal_template: None },
        PredicateSpec { name: "next", params: &[LEVEL, LEVEL], template: "Level {0} is next to level {1}.", goal_template: None },
        PredicateSpec { name: "unshaked", params: &[SHAKER], template: "{0} is unshaked.", goal_template: None },
        PredicateSpec { name: "shaked", params: &[SHAKER], template: "{0} is shaked.", goal_template: None },
        PredicateSpec { name: "cocktail-part1", params: &[COCKTAIL, INGREDIENT], template: "{0} part1 ingredient is {1}.", goal_template: None },
        PredicateSpec { name: "cocktail-part2", params: &[COCKTAIL, INGREDIENT], template: "{0} part2 ingredient is {1}.", goal_template: None },
    ],
    schemas: &[
        SchemaSpec {
            name: "grasp",
            params: &[HAND, CONTAINER],
            pre: &[atom!("ontable", P1), atom!("handempty", P0)],
            add: &[atom!("holding", P0, P1)],
            del: &[atom!("ontable", P1), atom!("handempty", P0)],
            distinct: &[],
            observe: &[atom!("holding", P0, P1)],
            surface: "{0} grasp {1}.",
        },
        SchemaSpec {
            name: "leave",
            params: &[HAND, CONTAINER],
            pre: &[atom!("holding", P0, P1)],
            add: &[atom!("handempty", P0), atom!("ontable", P1)],
            del: &[atom!("holding", P0, P1)],
            distinct: &[],
            observe: &[atom!("ontable", P1), atom!("handempty", P0)],
            surface: "{0} leave {1}.",
        },
        SchemaSpec {
            name: "fill-shot",
            params: &[SHOT, INGREDIENT, HAND, HAND, DISPENSER],
            pre: &[
                atom!("holding", P2, P0),
                atom!("handempty", P3),
                atom!("dispenses", P4, P1),
                atom!("empty", P0),
                atom!("clean", P0),
            ],
            add: &[atom!("contains", P0, P1), atom!("used", P0, P1)],
            del: &[atom!("empty", P0), atom!("clean", P0)],
            distinct: &[(2, 3)],
            observe: &[atom!("contains", P0, P1)],
            surface: "fill-shot {0} {1} {2} {3} {4}.",
        },
        SchemaSpec {
            name: "refill-shot",
            params: &[SHOT, INGREDIENT, HAND, HAND, DISPENSER],
            pre: &[
                atom!("holding", P2, P0),
                atom!("handempty", P3),
                atom!("dispenses", P4, P1),
                atom!("empty", P0),
                atom!("used", P0, P1),
            ],
            add: &[atom!("contains", P0, P1)],
            del: &[atom!("empty", P0)],
            distinct: &[(2, 3)],
            observe: &[atom!("contains", P0, P1)],
            surface: "refill-shot {0} {1} {2} {3} {4}.",
        },
        SchemaSpec {
            name: "empty-shot",
            params: &[HAND, SHOT, BEVERAGE],
            pre: &[atom!("holding", P0, P1), atom!("contains", P1, P2)],
            add: &[atom!("empty", P1)],
            del: &[atom!("contains", P1, P2)],
            distinct: &[],
            observe: &[atom!("empty", P1)],
            surface: "empty-shot {0} {1} {2}.",
        },
        SchemaSpec {
            name: "clean-shot",
            params: &[SHOT, BEVERAGE, HAND, HAND],
            pre: &[
                atom!("holding", P2, P0),
                atom!("handempty", P3),
                atom!("empty", P0),
                atom!("used", P0, P1),
            ],
            add: &[atom!("clean", P0)],
            del: &[atom!("used", P0, P1)],
            distinct: &[(2, 3)],
            observe: &[atom!("clean", P0)],
            surface: "clean-shot {0} {1} {2} {3}.",
        },
        SchemaSpec {
            name: "pour-shot-to-clean-shaker",
            params: &[SHOT, INGREDIENT, SHAKER, HAND, LEVEL, LEVEL],
            pre: &[
                atom!("holding", P3, P0),
                atom!("contains", P0, P1),
                atom!("empty", P2),
                atom!("clean", P2),
                atom!("shaker-level", P2, P4),
                atom!("next", P4, P5),
            ],
            add: &[
                atom!("empty", P0),
                atom!("contains", P2, P1),
                atom!("unshaked", P2),
                atom!("shaker-level", P2, P5),
            ],
            del: &[
                atom!("contains", P0, P1),
                atom!("empty", P2),
                atom!("clean", P2),
                atom!("shaker-level", P2, P4),
            ],
            distinct: &[],
            observe: &[atom!("contains", P2, P1), atom!("shaker-level", P2, P5)],
            surface: "pour-shot-to-clean-shaker {0} {1} {2} {3} {4} {5}.",
        },
        SchemaSpec {
            name: "pour-shot-to-used-shaker",
            params: &[SHOT, INGREDIENT, SHAKER, HAND, LEVEL, LEVEL],
            pre: &[
                atom!("holding", P3, P0),
                atom!("contains", P0, P1),
                atom!("unshaked", P2),
                atom!("shaker-level", P2, P4),
                atom!("next", P4, P5),
            ],
            add: &[
                atom!("contains", P2, P1),
                atom!("empty", P0),
                atom!("shaker-level", P2, P5),
            ],
            del: &[atom!("contains", P0, P1), atom!("shaker-level", P2, P4)],
            distinct: &[],
            observe: &[atom!("contains", P2, P1), atom!("shaker-level", P2, P5)],
            surface: "pour-shot-to-used-shaker {0} {1} {2} {3} {4} {5}.",
        },
        SchemaSpec {
            name: "empty-shaker",
            params: &[HAND, SHAKER, COCKTAIL, LEVEL, LEVEL],
            pre: &[
                atom!("holding", P0, P1),
                atom!("contains", P1, P2),
                atom!("shaked", P1),
                atom!("shaker-level", P1, P3),
                atom!("shaker-empty-level", P1, P4),
            ],
            add: &[atom!("shaker-level", P1, P4), atom!("empty", P1)],
            del: &[
                atom!("shaked", P1),
                atom!("shaker-level", P1, P3),
                atom!("contains", P1, P2),
            ],
            distinct: &[],
            observe: &[atom!("empty", P1)],
            surface: "empty-shaker {0} {1} {2} {3} {4}.",
        },
        SchemaSpec {
            name: "clean-shaker",
            params: &[HAND, HAND, SHAKER],
            pre: &[atom!("holding", P0, P2), atom!("handempty", P1), atom!("empty", P2)],
            add: &[atom!("clean", P2)],
            del: &[],
            distinct: &[(0, 1)],
            observe: &[atom!("clean", P2)],
            surface: "clean-shaker {0} {1} {2}.",
        },
        SchemaSpec {
            name: "shake",
            params: &[COCKTAIL, INGREDIENT, INGREDIENT, SHAKER, HAND, HAND],
            pre: &[
                atom!("holding", P4, P3),
                atom!("handempty", P5),
                atom!("contains", P3, P1),
                atom!("contains", P3, P2),
                atom!("cocktail-part1", P0, P1),
                atom!("cocktail-part2", P0, P2),
                atom!("unshaked", P3),
            ],
            add: &[atom!("shaked", P3), atom!("contains", P3, P0)],
            del: &[
                atom!("unshaked", P3),
                atom!("contains", P3, P1),
                atom!("contains", P3, P2),
            ],
            distinct: &[(4, 5)],
            observe: &[atom!("contains", P3, P0)],
            surface: "shake {0} {1} {2} {3} {4} {5}.",
        },
        SchemaSpec {
            name: "pour-shaker-to-shot",
            params: &[BEVERAGE, SHOT, HAND, SHAKER, LEVEL, LEVEL],
            pre: &[
                atom!("holding", P2, P3),
                atom!("shaked", P3),
                atom!("empty", P1),
                atom!("clean", P1),
                atom!("contains", P3, P0),
                atom!("shaker-level", P3, P4),
                atom!("next", P5, P4),
            ],
            add: &[atom!("contains", P1, P0), atom!("shaker-level", P3, P5)],
            del: &[atom!("clean", P1), atom!("empty", P1), atom!("shaker-level", P3, P4)],
            distinct: &[],
            observe: &[atom!("contains", P1, P0)],
            surface: "pour-shaker-to-shot {0} {1} {2} {3} {4} {5}.",
        },
    ],
    capitalize: true,
    fillers: &["hand", "the", "from", "to", "into", "with", "in", "a"],
    aliases: &[],
    invariants,
};

fn invariants(domain: &Domain, state: &EnvState) -> Vec<String> {
    let mut out = Vec::new();
    let id = |p: &str| domain.predicate_id(p).expect("barman predicate");
    let objs = &state.objects;
    let (ontable, holding, handempty, empty, contains) =
        (id("ontable"), id("holding"), id("handempty"), id("empty"), id("contains"));
    let (level, empty_level, next, shaked, unshaked) = (
        id("shaker-level"),
        id("shaker-empty-level"),
        id("next"),
        id("shaked"),
        id("unshaked"),
    );

    for h in objs.of_types(HAND) {
        let held = count_facts(state, holding, |x| x[0] == h);
        let free = count_facts(state, handempty, |x| x[0] == h) == 1;
        if held > 1 || free == (held == 1) {
            out.push(format!("hand {} holds {held} containers but empty={free}", objs.name(h)));
        }
    }
    for c in objs.of_types(CONTAINER) {
        let places = count_facts(state, ontable, |x| x[0] == c) + count_facts(state, holding, |x| x[1] == c);
        if places != 1 {
            out.push(format!("{} is in {places} places", objs.name(c)));
        }
    }
    for s in objs.of_types(SHOT) {
        let n = count_facts(state, contains, |x| x[0] == s);
        let is_empty = count_facts(state, empty, |x| x[0] == s) == 1;
        if n > 1 || is_empty == (n == 1) {
            out.push(format!("shot {} holds {n} beverages but empty={is_empty}", objs.name(s)));
        }
    }

    // the level chain has no cycles, so "exceeds the top" means "has no level"
    let levels = objs.of_types(LEVEL);
    let bottom: Vec<_> = levels
        .iter()
        .copied()
        .filter(|&l| count_facts(state, next, |x| x[1] == l) == 0)
        .collect();
    for s in objs.of_types(SHAKER) {
        let name = objs.name(s);
        let current: Vec<_> = levels
            .iter()
            .copied()
            .filter(|&l| count_facts(state, level, |x| x[0] == s && x[1] == l) == 1)
            .collect();
        if current.len() != 1 {
            out.push(format!("shaker {name} is at {} levels", current.len()));
            continue;
        }
        let is_empty = count_facts(state, empty, |x| x[0] == s) == 1;
        let at_empty_level = count_facts(state, empty_level, |x| x[0] == s && x[1] == current[0]) == 1;
        if is_empty && !at_empty_level {
            out.push(format!("shaker {name} is empty above its empty level"));
        }
        if is_empty && count_facts(state, contains, |x| x[0] == s) > 0 {
            out.push(format!("shaker {name} is empty but has contents"));
        }
        if !bottom.is_empty() && at_empty_level && !bottom.contains(&current[0]) {
            out.push(format!("shaker {name} has an empty level above the bottom"));
        }
        let shake_flags = count_facts(state, shaked, |x| x[0] == s) + count_facts(state, unshaked, |x| x[0] == s);
        if shake_flags > 1 {
            out.push(format!("shaker {name} is both shaked and unshaked"));
        }
    }
    out
}
