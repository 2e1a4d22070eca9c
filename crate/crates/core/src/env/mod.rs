//! Environment abstraction shared by all planning domains: facts and states,
//! action normalization, the transition function, valid-action enumeration,
//! goal progress, and a breadth-first search oracle.

mod engine;
mod instance;
mod parse;
pub mod schema;
mod search;
mod state;

pub use engine::{MetaAction, ParsedAction, StepOutcome, GOAL_COMPLETED, INVALID_ACTION_OBSERVATION};
pub use instance::{parse_instance, write_instance, Instance, InstanceError};
pub use parse::meta_action;
pub use schema::{Domain, DomainSpec, GroundAction, PredicateSpec, SchemaSpec};
pub use search::{bfs_solve, reachable_states, StateLimitExceeded};
pub use state::{EnvState, Fact, GoalSpec, ObjId, ObjectTable, Progress};

/// A running environment: one instance plus its current state.
#[derive(Debug, Clone)]
pub struct Environment {
    domain: &'static Domain,
    state: EnvState,
    goal: GoalSpec,
}

impl Environment {
    pub fn new(state: EnvState, goal: GoalSpec) -> Self {
        Self {
            domain: state.domain.domain(),
            state,
            goal,
        }
    }

    pub fn domain(&self) -> &'static Domain {
        self.domain
    }

    pub fn state(&self) -> &EnvState {
        &self.state
    }

    pub fn goal(&self) -> &GoalSpec {
        &self.goal
    }

    pub fn observation(&self) -> String {
        self.domain.render_observation(&self.state)
    }

    pub fn goal_text(&self) -> String {
        self.domain.goal_text(&self.state.objects, &self.goal)
    }

    pub fn progress(&self) -> Progress {
        self.domain.progress(&self.state, &self.goal)
    }

    pub fn normalize(&self, raw: &str) -> ParsedAction {
        self.domain.normalize_action(&self.state.objects, raw)
    }

    pub fn valid_actions(&self) -> Vec<GroundAction> {
        self.domain.enumerate_valid(&self.state)
    }

    pub fn surface(&self, action: &GroundAction) -> String {
        action.surface(self.domain, &self.state.objects)
    }

    /// Normalizes `raw` and executes it, replacing the current state.
    pub fn act(&mut self, raw: &str) -> StepOutcome {
        let parsed = self.normalize(raw);
        self.execute(&parsed)
    }

    pub fn execute(&mut self, action: &ParsedAction) -> StepOutcome {
        let (next, outcome) = self.domain.step(&self.state, &self.goal, action);
        self.state = next;
        outcome
    }
}
