use crate::atom;
use crate::env::schema::{Domain, DomainSpec, PredicateSpec, SchemaSpec, Term, P0, P1};
use crate::env::EnvState;

use super::{count_facts, DomainKind};

const CONTAINER: &[&str] = &["container"];
const OBJ: &[&str] = &["tool", "wheel", "nut"];
const NUT: &[&str] = &["nut"];
const HUB: &[&str] = &["hub"];
const WHEEL: &[&str] = &["wheel"];

const WRENCH: Term = Term::Const("wrench");
const JACK: Term = Term::Const("jack");
const PUMP: Term = Term::Const("pump");

pub static SPEC: DomainSpec = DomainSpec {
    kind: DomainKind::Tyreworld,
    types: &["container", "tool", "wheel", "nut", "hub"],
    predicates: &[
        PredicateSpec { name: "open", params: &[CONTAINER], template: "{0} is open.", goal_template: None },
        PredicateSpec { name: "closed", params: &[CONTAINER], template: "{0} is closed.", goal_template: None },
        PredicateSpec { name: "locked", params: &[CONTAINER], template: "{0} is locked.", goal_template: None },
        PredicateSpec { name: "unlocked", params: &[CONTAINER], template: "{0} is unlocked.", goal_template: None },
        PredicateSpec { name: "in", params: &[OBJ, CONTAINER], template: "{0} is in {1}.", goal_template: None },
        PredicateSpec { name: "have", params: &[OBJ], template: "You have {0}.", goal_template: None },
        PredicateSpec { name: "tight", params: &[NUT, HUB], template: "The nut {0} on the hub {1} is tight.", goal_template: None },
        PredicateSpec { name: "loose", params: &[NUT, HUB], template: "The nut {0} on the hub {1} is loose.", goal_template: None },
        PredicateSpec { name: "on-ground", params: &[HUB], template: "Hub {0} is on the ground.", goal_template: None },
        PredicateSpec { name: "not-on-ground", params: &[HUB], template: "Hub {0} is not on the ground.", goal_template: None },
        PredicateSpec { name: "fastened", params: &[HUB], template: "Hub {0} is fastened.", goal_template: None },
        PredicateSpec { name: "unfastened", params: &[HUB], template: "Hub {0} is unfastened.", goal_template: None },
        PredicateSpec { name: "free", params: &[HUB], template: "Hub {0} is free.", goal_template: None },
        PredicateSpec { name: "on", params: &[WHEEL, HUB], template: "Wheel {0} is on hub {1}.", goal_template: Some("{0} is on {1}.") },
        PredicateSpec { name: "intact", params: &[WHEEL], template: "Wheel {0} is intact.", goal_template: None },
        PredicateSpec { name: "inflated", params: &[WHEEL], template: "Wheel {0} is inflated.", goal_template: None },
        PredicateSpec { name: "not-inflated", params: &[WHEEL], template: "Wheel {0} is not inflated.", goal_template: None },
    ],
    schemas: &[
        SchemaSpec {
            name: "open",
            params: &[CONTAINER],
            pre: &[atom!("unlocked", P0), atom!("closed", P0)],
            add: &[atom!("open", P0)],
            del: &[atom!("closed", P0)],
            distinct: &[],
            observe: &[atom!("open", P0)],
            surface: "Open {0}.",
        },
        SchemaSpec {
            name: "close",
            params: &[CONTAINER],
            pre: &[atom!("open", P0)],
            add: &[atom!("closed", P0)],
            del: &[atom!("open", P0)],
            distinct: &[],
            observe: &[atom!("closed", P0)],
            surface: "Close {0}.",
        },
        SchemaSpec {
            name: "fetch",
            params: &[OBJ, CONTAINER],
            pre: &[atom!("in", P0, P1), atom!("open", P1)],
            add: &[atom!("have", P0)],
            del: &[atom!("in", P0, P1)],
            distinct: &[],
            observe: &[atom!("have", P0)],
            surface: "Fetch {0} from {1}.",
        },
        SchemaSpec {
            name: "put-away",
            params: &[OBJ, CONTAINER],
            pre: &[atom!("have", P0), atom!("open", P1)],
            add: &[atom!("in", P0, P1)],
            del: &[atom!("have", P0)],
            distinct: &[],
            observe: &[atom!("in", P0, P1)],
            surface: "Put-away {0} in {1}.",
        },
        SchemaSpec {
            name: "loosen",
            params: &[NUT, HUB],
            pre: &[atom!("have", WRENCH), atom!("tight", P0, P1), atom!("on-ground", P1)],
            add: &[atom!("loose", P0, P1)],
            del: &[atom!("tight", P0, P1)],
            distinct: &[],
            observe: &[atom!("loose", P0, P1)],
            surface: "Loosen the nut {0} on the hub {1}.",
        },
        SchemaSpec {
            name: "tighten",
            params: &[NUT, HUB],
            pre: &[atom!("have", WRENCH), atom!("loose", P0, P1), atom!("on-ground", P1)],
            add: &[atom!("tight", P0, P1)],
            del: &[atom!("loose", P0, P1)],
            distinct: &[],
            observe: &[atom!("tight", P0, P1)],
            surface: "Tighten the nut {0} on the hub {1}.",
        },
        SchemaSpec {
            name: "jack-up",
            params: &[HUB],
            pre: &[atom!("on-ground", P0), atom!("have", JACK)],
            add: &[atom!("not-on-ground", P0)],
            del: &[atom!("on-ground", P0), atom!("have", JACK)],
            distinct: &[],
            observe: &[atom!("not-on-ground", P0)],
            surface: "Jack-up the hub {0}.",
        },
        SchemaSpec {
            name: "jack-down",
            params: &[HUB],
            pre: &[atom!("not-on-ground", P0)],
            add: &[atom!("on-ground", P0), atom!("have", JACK)],
            del: &[atom!("not-on-ground", P0)],
            distinct: &[],
            observe: &[atom!("on-ground", P0)],
            surface: "Jack-down the hub {0}.",
        },
        SchemaSpec {
            name: "undo",
            params: &[NUT, HUB],
            pre: &[
                atom!("not-on-ground", P1),
                atom!("fastened", P1),
                atom!("have", WRENCH),
                atom!("loose", P0, P1),
            ],
            add: &[atom!("have", P0), atom!("unfastened", P1)],
            del: &[atom!("fastened", P1), atom!("loose", P0, P1)],
            distinct: &[],
            observe: &[atom!("unfastened", P1)],
            surface: "Undo the fastening of the nut {0} on the hub {1}.",
        },
        SchemaSpec {
            name: "do-up",
            params: &[NUT, HUB],
            pre: &[
                atom!("have", WRENCH),
                atom!("unfastened", P1),
                atom!("not-on-ground", P1),
                atom!("have", P0),
            ],
            add: &[atom!("loose", P0, P1), atom!("fastened", P1)],
            del: &[atom!("unfastened", P1), atom!("have", P0)],
            distinct: &[],
            observe: &[atom!("fastened", P1)],
            surface: "Do-up the nut {0} on the hub {1}.",
        },
        SchemaSpec {
            name: "remove-wheel",
            params: &[WHEEL, HUB],
            pre: &[atom!("not-on-ground", P1), atom!("on", P0, P1), atom!("unfastened", P1)],
            add: &[atom!("have", P0), atom!("free", P1)],
            del: &[atom!("on", P0, P1)],
            distinct: &[],
            observe: &[atom!("have", P0)],
            surface: "Remove-wheel {0} from the hub {1}.",
        },
        SchemaSpec {
            name: "put-on-wheel",
            params: &[WHEEL, HUB],
            pre: &[
                atom!("have", P0),
                atom!("free", P1),
                atom!("unfastened", P1),
                atom!("not-on-ground", P1),
            ],
            add: &[atom!("on", P0, P1)],
            del: &[atom!("have", P0), atom!("free", P1)],
            distinct: &[],
            observe: &[atom!("on", P0, P1)],
            surface: "Put-on-wheel {0} on the hub {1}.",
        },
        SchemaSpec {
            name: "inflate",
            params: &[WHEEL],
            pre: &[atom!("have", PUMP), atom!("not-inflated", P0), atom!("intact", P0)],
            add: &[atom!("inflated", P0)],
            del: &[atom!("not-inflated", P0)],
            distinct: &[],
            observe: &[atom!("inflated", P0)],
            surface: "Inflate the wheel {0}.",
        },
    ],
    capitalize: true,
    fillers: &[
        "the", "nut", "hub", "wheel", "from", "in", "into", "on", "of", "fastening", "to", "a", "an",
        "with",
    ],
    aliases: &[("putaway", "put-away"), ("jackup", "jack-up"), ("jackdown", "jack-down"), ("doup", "do-up")],
    invariants,
};

fn invariants(domain: &Domain, state: &EnvState) -> Vec<String> {
    let mut out = Vec::new();
    let id = |p: &str| domain.predicate_id(p).expect("tyreworld predicate");
    let objs = &state.objects;
    let pairs = [
        ("open", "closed", CONTAINER),
        ("locked", "unlocked", CONTAINER),
        ("on-ground", "not-on-ground", HUB),
        ("fastened", "unfastened", HUB),
    ];
    for (a, b, ty) in pairs {
        let (pa, pb) = (id(a), id(b));
        for o in objs.of_types(ty) {
            let n = count_facts(state, pa, |x| x[0] == o) + count_facts(state, pb, |x| x[0] == o);
            if n != 1 {
                out.push(format!("{} must be exactly one of {a}/{b}", objs.name(o)));
            }
        }
    }

    let (inside, have, on, tight, loose, raised, free) = (
        id("in"),
        id("have"),
        id("on"),
        id("tight"),
        id("loose"),
        id("not-on-ground"),
        id("free"),
    );
    let stored = |o| count_facts(state, inside, |x| x[0] == o) + count_facts(state, have, |x| x[0] == o);
    for t in objs.of_types(&["tool"]) {
        let mut places = stored(t);
        // a jack in use sits under a raised hub
        if objs.name_ref(t) == Some("jack") {
            places += count_facts(state, raised, |_| true);
        }
        if places != 1 {
            out.push(format!("tool {} is in {places} places", objs.name(t)));
        }
    }
    for w in objs.of_types(WHEEL) {
        let places = stored(w) + count_facts(state, on, |x| x[0] == w);
        if places != 1 {
            out.push(format!("wheel {} is in {places} places", objs.name(w)));
        }
    }
    for n in objs.of_types(NUT) {
        let places = stored(n)
            + count_facts(state, tight, |x| x[0] == n)
            + count_facts(state, loose, |x| x[0] == n);
        if places != 1 {
            out.push(format!("nut {} is in {places} places", objs.name(n)));
        }
    }
    for h in objs.of_types(HUB) {
        let wheels = count_facts(state, on, |x| x[1] == h);
        let is_free = count_facts(state, free, |x| x[0] == h) == 1;
        if wheels > 1 || is_free == (wheels == 1) {
            out.push(format!("hub {} has {wheels} wheel(s) but free={is_free}", objs.name(h)));
        }
    }
    out
}
