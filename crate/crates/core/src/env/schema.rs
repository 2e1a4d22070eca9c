//! Static domain tables and their compiled form.
//!
//! A domain is described once as plain data (predicates with sentence
//! templates, STRIPS action schemas with typed parameters) and compiled into
//! a [`Domain`] with predicate names resolved to indices.

use std::collections::HashMap;

use arrayvec::ArrayVec;

use super::state::{EnvState, Fact, ObjId, ObjectTable, MAX_FACT_ARITY};
use crate::domains::DomainKind;

/// Largest action-schema arity across all bundled domains.
pub const MAX_ACTION_ARITY: usize = 6;

/// Argument of an atom inside a schema: a schema parameter or a named constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Term {
    Param(usize),
    Const(&'static str),
}

pub const P0: Term = Term::Param(0);
pub const P1: Term = Term::Param(1);
pub const P2: Term = Term::Param(2);
pub const P3: Term = Term::Param(3);
pub const P4: Term = Term::Param(4);
pub const P5: Term = Term::Param(5);

#[derive(Debug, Clone, Copy)]
pub struct AtomSpec {
    pub pred: &'static str,
    pub terms: &'static [Term],
}

/// Shorthand for building an [`AtomSpec`] in a const table.
#[macro_export]
macro_rules! atom {
    ($pred:literal $(, $t:expr)* $(,)?) => {
        $crate::env::schema::AtomSpec { pred: $pred, terms: &[$($t),*] }
    };
}

#[derive(Debug, Clone, Copy)]
pub struct PredicateSpec {
    pub name: &'static str,
    /// Allowed object types per argument position.
    pub params: &'static [&'static [&'static str]],
    /// Sentence used in observations; `{i}` is replaced by argument `i`.
    pub template: &'static str,
    /// Sentence used in goal text when it differs from `template`.
    pub goal_template: Option<&'static str>,
}

#[derive(Debug, Clone, Copy)]
pub struct SchemaSpec {
    pub name: &'static str,
    pub params: &'static [&'static [&'static str]],
    pub pre: &'static [AtomSpec],
    pub add: &'static [AtomSpec],
    pub del: &'static [AtomSpec],
    /// Parameter index pairs that must bind to different objects.
    pub distinct: &'static [(usize, usize)],
    /// Added atoms reported in the success observation, in this order.
    pub observe: &'static [AtomSpec],
    /// Canonical display form; `{i}` is replaced by argument `i`.
    pub surface: &'static str,
}

pub type InvariantCheck = fn(&Domain, &EnvState) -> Vec<String>;

pub struct DomainSpec {
    pub kind: DomainKind,
    pub types: &'static [&'static str],
    pub predicates: &'static [PredicateSpec],
    pub schemas: &'static [SchemaSpec],
    /// Upper-case the first letter of each observation sentence.
    pub capitalize: bool,
    /// Connective words the action parser skips.
    pub fillers: &'static [&'static str],
    /// Alternative spellings mapped to schema names (hyphen-joined, lower case).
    pub aliases: &'static [(&'static str, &'static str)],
    pub invariants: InvariantCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum CTerm {
    Param(u8),
    Const(&'static str),
}

#[derive(Debug, Clone)]
pub(crate) struct CAtom {
    pub pred: u8,
    pub terms: ArrayVec<CTerm, MAX_FACT_ARITY>,
}

#[derive(Debug, Clone)]
pub(crate) struct CSchema {
    pub pre: Vec<CAtom>,
    pub add: Vec<CAtom>,
    pub del: Vec<CAtom>,
    pub observe: Vec<CAtom>,
}

/// A compiled domain: vocabulary, schemas and rendering rules.
pub struct Domain {
    pub spec: &'static DomainSpec,
    pred_index: HashMap<&'static str, u8>,
    pub(crate) compiled: Vec<CSchema>,
}

impl std::fmt::Debug for Domain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_tuple("Domain").field(&self.spec.kind).finish()
    }
}

impl Domain {
    pub fn compile(spec: &'static DomainSpec) -> Self {
        let pred_index: HashMap<&'static str, u8> = spec
            .predicates
            .iter()
            .enumerate()
            .map(|(i, p)| (p.name, i as u8))
            .collect();
        let conv = |a: &AtomSpec| -> CAtom {
            let pred = *pred_index
                .get(a.pred)
                .unwrap_or_else(|| panic!("{:?}: unknown predicate {}", spec.kind, a.pred));
            let arity = spec.predicates[pred as usize].params.len();
            assert_eq!(arity, a.terms.len(), "arity of {} in schema table", a.pred);
            let terms = a
                .terms
                .iter()
                .map(|t| match *t {
                    Term::Param(i) => CTerm::Param(i as u8),
                    Term::Const(c) => CTerm::Const(c),
                })
                .collect();
            CAtom { pred, terms }
        };
        let compiled = spec
            .schemas
            .iter()
            .map(|s| CSchema {
                pre: s.pre.iter().map(conv).collect(),
                add: s.add.iter().map(conv).collect(),
                del: s.del.iter().map(conv).collect(),
                observe: s.observe.iter().map(conv).collect(),
            })
            .collect();
        Self {
            spec,
            pred_index,
            compiled,
        }
    }

    pub fn kind(&self) -> DomainKind {
        self.spec.kind
    }

    pub fn predicate_id(&self, name: &str) -> Option<u8> {
        self.pred_index.get(name).copied()
    }

    pub fn predicate(&self, id: u8) -> &'static PredicateSpec {
        &self.spec.predicates[id as usize]
    }

    pub fn schemas(&self) -> &'static [SchemaSpec] {
        self.spec.schemas
    }

    pub fn schema_id(&self, name: &str) -> Option<u8> {
        self.spec
            .schemas
            .iter()
            .position(|s| s.name == name)
            .map(|i| i as u8)
    }

    /// Builds a fact from names, checking arity, object existence and types.
    pub fn fact(&self, objects: &ObjectTable, pred: &str, args: &[&str]) -> Result<Fact, String> {
        let id = self
            .predicate_id(pred)
            .ok_or_else(|| format!("unknown predicate `{pred}`"))?;
        let spec = self.predicate(id);
        if spec.params.len() != args.len() {
            return Err(format!(
                "predicate `{pred}` takes {} argument(s), got {}",
                spec.params.len(),
                args.len()
            ));
        }
        let mut ids = Vec::with_capacity(args.len());
        for (arg, allowed) in args.iter().zip(spec.params) {
            let oid = objects
                .id(arg)
                .ok_or_else(|| format!("unknown object `{arg}`"))?;
            let ty = objects.type_of(oid).unwrap_or_default();
            if !allowed.contains(&ty) {
                return Err(format!(
                    "object `{arg}` has type `{ty}`, predicate `{pred}` expects {}",
                    allowed.join("|")
                ));
            }
            ids.push(oid);
        }
        Ok(Fact::new(id, &ids))
    }

    pub fn fact_to_string(&self, objects: &ObjectTable, fact: &Fact) -> String {
        let spec = self.predicate(fact.pred);
        let args: Vec<String> = fact.args[..spec.params.len()]
            .iter()
            .map(|&a| objects.name(a))
            .collect();
        format!("{}({})", spec.name, args.join(","))
    }

    fn fill_template(template: &str, objects: &ObjectTable, args: &[ObjId]) -> String {
        let mut out = template.to_string();
        for (i, &a) in args.iter().enumerate() {
            out = out.replace(&format!("{{{i}}}"), &objects.name(a));
        }
        out
    }

    /// Observation sentence for one fact.
    pub fn sentence(&self, objects: &ObjectTable, fact: &Fact) -> String {
        let spec = self.predicate(fact.pred);
        let s = Self::fill_template(spec.template, objects, &fact.args[..spec.params.len()]);
        if self.spec.capitalize {
            capitalize_first(&s)
        } else {
            s
        }
    }

    /// Goal-text sentence for one fact (never capitalized).
    pub fn goal_sentence(&self, objects: &ObjectTable, fact: &Fact) -> String {
        let spec = self.predicate(fact.pred);
        let template = spec.goal_template.unwrap_or(spec.template);
        Self::fill_template(template, objects, &fact.args[..spec.params.len()])
    }

    /// Words the action parser treats as reserved; object names may not use them.
    pub fn is_reserved_word(&self, word: &str) -> bool {
        let w = word.to_lowercase();
        self.spec.fillers.contains(&w.as_str())
            || self.spec.schemas.iter().any(|s| s.name == w)
            || self.spec.aliases.iter().any(|(a, _)| *a == w)
    }
}

pub(crate) fn capitalize_first(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

/// A schema instantiated with concrete objects.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAction {
    pub schema: u8,
    pub args: ArrayVec<ObjId, MAX_ACTION_ARITY>,
}

impl GroundAction {
    pub fn new(schema: u8, args: &[ObjId]) -> Self {
        Self {
            schema,
            args: args.iter().copied().collect(),
        }
    }

    pub fn name(&self, domain: &Domain) -> &'static str {
        domain.spec.schemas[self.schema as usize].name
    }

    /// Canonical display string, e.g. `Loosen the nut nuts1 on the hub the-hub1.`
    pub fn surface(&self, domain: &Domain, objects: &ObjectTable) -> String {
        let spec = &domain.spec.schemas[self.schema as usize];
        Domain::fill_template(spec.surface, objects, &self.args)
    }

    /// Schema-style form, e.g. `loosen nuts1 the-hub1`.
    pub fn signature(&self, domain: &Domain, objects: &ObjectTable) -> String {
        let mut parts = vec![self.name(domain).to_string()];
        parts.extend(self.args.iter().map(|&a| objects.name(a)));
        parts.join(" ")
    }
}
