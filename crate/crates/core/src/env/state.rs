use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::domains::DomainKind;

/// Index of an object inside an [`ObjectTable`]. Ids follow lexicographic
/// name order, so sorting ids sorts names.
pub type ObjId = u16;

/// Largest predicate arity across all bundled domains.
pub const MAX_FACT_ARITY: usize = 2;

/// Typed object table of one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectTable {
    names: Vec<String>,
    types: Vec<String>,
    index: HashMap<String, ObjId>,
}

impl ObjectTable {
    /// Builds a table from `(name, type)` pairs. Ids are assigned in sorted
    /// name order. Duplicate names keep the first type.
    pub fn new<I, S, T>(objects: I) -> Self
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        let mut pairs: Vec<(String, String)> = Vec::new();
        for (n, t) in objects {
            let n = n.into();
            if !pairs.iter().any(|(m, _)| *m == n) {
                pairs.push((n, t.into()));
            }
        }
        pairs.sort();
        let index = pairs
            .iter()
            .enumerate()
            .map(|(i, (n, _))| (n.clone(), i as ObjId))
            .collect();
        let (names, types) = pairs.into_iter().unzip();
        Self {
            names,
            types,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn id(&self, name: &str) -> Option<ObjId> {
        self.index.get(name).copied()
    }

    /// Name of an object; undeclared ids render as `?<id>`.
    pub fn name(&self, id: ObjId) -> String {
        self.names
            .get(id as usize)
            .cloned()
            .unwrap_or_else(|| format!("?{id}"))
    }

    pub fn name_ref(&self, id: ObjId) -> Option<&str> {
        self.names.get(id as usize).map(String::as_str)
    }

    pub fn type_of(&self, id: ObjId) -> Option<&str> {
        self.types.get(id as usize).map(String::as_str)
    }

    pub fn contains(&self, id: ObjId) -> bool {
        (id as usize) < self.names.len()
    }

    /// Ids of all objects whose type is in `types`, in name order.
    pub fn of_types(&self, types: &[&str]) -> Vec<ObjId> {
        (0..self.names.len())
            .filter(|&i| types.contains(&self.types[i].as_str()))
            .map(|i| i as ObjId)
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ObjId, &str, &str)> {
        self.names
            .iter()
            .zip(&self.types)
            .enumerate()
            .map(|(i, (n, t))| (i as ObjId, n.as_str(), t.as_str()))
    }
}

/// A ground atom: predicate index into the domain vocabulary plus object ids.
/// Unused argument slots are always zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fact {
    pub pred: u8,
    pub args: [ObjId; MAX_FACT_ARITY],
}

impl Fact {
    pub fn new(pred: u8, args: &[ObjId]) -> Self {
        let mut a = [0; MAX_FACT_ARITY];
        a[..args.len()].copy_from_slice(args);
        Self { pred, args: a }
    }
}

/// Complete symbolic world state of one domain instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvState {
    pub domain: DomainKind,
    pub objects: Arc<ObjectTable>,
    pub facts: BTreeSet<Fact>,
}

impl EnvState {
    pub fn new(domain: DomainKind, objects: Arc<ObjectTable>, facts: BTreeSet<Fact>) -> Self {
        Self {
            domain,
            objects,
            facts,
        }
    }

    pub fn holds(&self, fact: &Fact) -> bool {
        self.facts.contains(fact)
    }

    /// Facts rendered as `predicate(arg,...)`, sorted.
    pub fn fact_strings(&self) -> Vec<String> {
        let domain = self.domain.domain();
        self.facts
            .iter()
            .map(|f| domain.fact_to_string(&self.objects, f))
            .collect()
    }
}

/// Ordered list of goal conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoalSpec {
    pub conditions: Vec<Fact>,
}

impl GoalSpec {
    /// Returns `None` for an empty condition list.
    pub fn new(conditions: Vec<Fact>) -> Option<Self> {
        if conditions.is_empty() {
            None
        } else {
            Some(Self { conditions })
        }
    }

    pub fn satisfied_count(&self, state: &EnvState) -> usize {
        self.conditions.iter().filter(|c| state.holds(c)).count()
    }
}

/// Fraction of goal conditions satisfied, kept as an exact ratio.
#[derive(Debug, Clone, Copy, Default)]
pub struct Progress {
    pub met: u32,
    pub total: u32,
}

impl Progress {
    pub fn new(met: u32, total: u32) -> Self {
        Self { met, total }
    }

    pub fn value(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.met as f64 / self.total as f64
        }
    }

    pub fn is_complete(&self) -> bool {
        self.total > 0 && self.met == self.total
    }
}

impl PartialEq for Progress {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}

impl Eq for Progress {}

impl PartialOrd for Progress {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Progress {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.met as u64 * other.total as u64).cmp(&(other.met as u64 * self.total as u64))
    }
}

impl fmt::Display for Progress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.met, self.total)
    }
}
