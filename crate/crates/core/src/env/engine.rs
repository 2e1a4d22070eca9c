use std::collections::BTreeSet;

use super::schema::{CAtom, CTerm, Domain, GroundAction};
use super::state::{EnvState, Fact, GoalSpec, ObjId, ObjectTable, Progress};

/// Observation returned for every unparseable or inapplicable action.
pub const INVALID_ACTION_OBSERVATION: &str =
    "The action is not valid and therefore takes no effect. Please check valid actions.";

/// Suffix appended to the observation once every goal condition holds.
pub const GOAL_COMPLETED: &str = "Goal is completed.";

const VALID_ACTIONS_PREFIX: &str = "Valid actions are:";
const META_ACTIONS_SUFFIX: &str = "Check valid actions. Look around.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetaAction {
    CheckValidActions,
    LookAround,
}

/// Result of normalizing a raw action line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedAction {
    Ground(GroundAction),
    Meta(MetaAction),
    Unparseable(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub observation: String,
    pub executable: bool,
    pub progress: Progress,
    pub done: bool,
}

impl Domain {
    fn resolve(objects: &ObjectTable, term: CTerm, args: &[ObjId]) -> Option<ObjId> {
        match term {
            CTerm::Param(i) => args.get(i as usize).copied(),
            CTerm::Const(name) => objects.id(name),
        }
    }

    fn ground_atom(objects: &ObjectTable, atom: &CAtom, args: &[ObjId]) -> Option<Fact> {
        let mut ids = [0 as ObjId; 2];
        for (slot, t) in atom.terms.iter().enumerate() {
            ids[slot] = Self::resolve(objects, *t, args)?;
        }
        Some(Fact::new(atom.pred, &ids[..atom.terms.len()]))
    }

    /// Arity, parameter types and distinctness constraints.
    pub fn is_well_typed(&self, objects: &ObjectTable, action: &GroundAction) -> bool {
        let Some(spec) = self.spec.schemas.get(action.schema as usize) else {
            return false;
        };
        if spec.params.len() != action.args.len() {
            return false;
        }
        let typed = action.args.iter().zip(spec.params).all(|(&a, allowed)| {
            objects
                .type_of(a)
                .is_some_and(|ty| allowed.contains(&ty))
        });
        typed
            && spec
                .distinct
                .iter()
                .all(|&(i, j)| action.args[i] != action.args[j])
    }

    /// Whether every precondition of `action` holds in `state`.
    pub fn is_applicable(&self, state: &EnvState, action: &GroundAction) -> bool {
        if !self.is_well_typed(&state.objects, action) {
            return false;
        }
        let compiled = &self.compiled[action.schema as usize];
        compiled.pre.iter().all(|atom| {
            Self::ground_atom(&state.objects, atom, &action.args).is_some_and(|f| state.holds(&f))
        })
    }

    /// Applies delete then add effects. Callers check applicability first.
    pub fn apply(&self, state: &EnvState, action: &GroundAction) -> EnvState {
        let compiled = &self.compiled[action.schema as usize];
        let mut facts = state.facts.clone();
        for atom in &compiled.del {
            if let Some(f) = Self::ground_atom(&state.objects, atom, &action.args) {
                facts.remove(&f);
            }
        }
        for atom in &compiled.add {
            if let Some(f) = Self::ground_atom(&state.objects, atom, &action.args) {
                facts.insert(f);
            }
        }
        EnvState::new(state.domain, state.objects.clone(), facts)
    }

    /// Every well-typed grounding of every schema, in schema order and then
    /// lexicographic argument order.
    pub fn groundings(&self, objects: &ObjectTable) -> Vec<GroundAction> {
        let mut out = Vec::new();
        for (sid, spec) in self.spec.schemas.iter().enumerate() {
            let domains: Vec<Vec<ObjId>> = spec.params.iter().map(|t| objects.of_types(t)).collect();
            if domains.iter().any(Vec::is_empty) {
                continue;
            }
            let mut idx = vec![0usize; domains.len()];
            'odometer: loop {
                let args: Vec<ObjId> = idx.iter().zip(&domains).map(|(&i, d)| d[i]).collect();
                if spec.distinct.iter().all(|&(i, j)| args[i] != args[j]) {
                    out.push(GroundAction::new(sid as u8, &args));
                }
                // rightmost position varies fastest
                let mut k = domains.len();
                loop {
                    if k == 0 {
                        break 'odometer;
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < domains[k].len() {
                        break;
                    }
                    idx[k] = 0;
                }
            }
        }
        out
    }

    /// Ground actions whose preconditions hold, in deterministic order.
    pub fn enumerate_valid(&self, state: &EnvState) -> Vec<GroundAction> {
        self.groundings(&state.objects)
            .into_iter()
            .filter(|a| self.is_applicable(state, a))
            .collect()
    }

    pub fn progress(&self, state: &EnvState, goal: &GoalSpec) -> Progress {
        Progress::new(
            goal.satisfied_count(state) as u32,
            goal.conditions.len() as u32,
        )
    }

    /// Sentences sorted case-insensitively, ties broken by the raw text.
    fn sorted_sentences(&self, objects: &ObjectTable, facts: &BTreeSet<Fact>) -> Vec<String> {
        let mut sentences: Vec<String> = facts.iter().map(|f| self.sentence(objects, f)).collect();
        sentences.sort_by(|a, b| {
            a.to_lowercase()
                .cmp(&b.to_lowercase())
                .then_with(|| a.cmp(b))
        });
        sentences
    }

    /// Full natural-language rendering of a state.
    pub fn render_observation(&self, state: &EnvState) -> String {
        self.sorted_sentences(&state.objects, &state.facts).join(" ")
    }

    /// Goal text such as `b1 is on b2., b2 is on b3.`
    pub fn goal_text(&self, objects: &ObjectTable, goal: &GoalSpec) -> String {
        goal.conditions
            .iter()
            .map(|c| self.goal_sentence(objects, c))
            .collect::<Vec<_>>()
            .join(", ")
    }

    pub fn valid_actions_observation(&self, state: &EnvState) -> String {
        let surfaces: Vec<String> = self
            .enumerate_valid(state)
            .iter()
            .map(|a| a.surface(self, &state.objects))
            .collect();
        if surfaces.is_empty() {
            format!("{VALID_ACTIONS_PREFIX} {META_ACTIONS_SUFFIX}")
        } else {
            format!(
                "{VALID_ACTIONS_PREFIX} {} {META_ACTIONS_SUFFIX}",
                surfaces.join(", ")
            )
        }
    }

    fn success_observation(&self, state: &EnvState, action: &GroundAction) -> String {
        let compiled = &self.compiled[action.schema as usize];
        compiled
            .observe
            .iter()
            .filter_map(|atom| Self::ground_atom(&state.objects, atom, &action.args))
            .map(|f| self.sentence(&state.objects, &f))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Pure transition function. Invalid actions leave the state untouched and
    /// are reported in-band through the observation text.
    pub fn step(
        &self,
        state: &EnvState,
        goal: &GoalSpec,
        action: &ParsedAction,
    ) -> (EnvState, StepOutcome) {
        let (next, observation, executable) = match action {
            ParsedAction::Ground(a) if self.is_applicable(state, a) => {
                let next = self.apply(state, a);
                let obs = self.success_observation(&next, a);
                (next, obs, true)
            }
            ParsedAction::Meta(MetaAction::CheckValidActions) => {
                (state.clone(), self.valid_actions_observation(state), true)
            }
            ParsedAction::Meta(MetaAction::LookAround) => {
                (state.clone(), self.render_observation(state), true)
            }
            ParsedAction::Ground(_) | ParsedAction::Unparseable(_) => {
                (state.clone(), INVALID_ACTION_OBSERVATION.to_string(), false)
            }
        };
        let progress = self.progress(&next, goal);
        let done = progress.is_complete();
        let observation = if done {
            if observation.is_empty() {
                GOAL_COMPLETED.to_string()
            } else {
                format!("{observation} {GOAL_COMPLETED}")
            }
        } else {
            observation
        };
        (
            next,
            StepOutcome {
                observation,
                executable,
                progress,
                done,
            },
        )
    }
}
