//! Breadth-first search over the transition system. Used as an oracle for
//! environment correctness and for minimal-step reference plans.

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::schema::{Domain, GroundAction};
use super::state::{EnvState, Fact, GoalSpec};

struct Node {
    parent: usize,
    action: Option<GroundAction>,
    depth: usize,
}

/// Shortest plan reaching every goal condition, or `None` if no plan of at
/// most `max_depth` actions exists. Successors are expanded in
/// `enumerate_valid` order, which fixes the tie-break between equal-length plans.
pub fn bfs_solve(
    domain: &Domain,
    start: &EnvState,
    goal: &GoalSpec,
    max_depth: usize,
) -> Option<Vec<GroundAction>> {
    if goal.satisfied_count(start) == goal.conditions.len() {
        return Some(Vec::new());
    }
    let groundings = domain.groundings(&start.objects);
    let mut nodes = vec![Node {
        parent: usize::MAX,
        action: None,
        depth: 0,
    }];
    let mut states: Vec<EnvState> = vec![start.clone()];
    let mut seen: HashMap<BTreeSet<Fact>, usize> = HashMap::new();
    seen.insert(start.facts.clone(), 0);
    let mut queue = VecDeque::from([0usize]);

    while let Some(idx) = queue.pop_front() {
        if nodes[idx].depth >= max_depth {
            continue;
        }
        let state = states[idx].clone();
        for action in &groundings {
            if !domain.is_applicable(&state, action) {
                continue;
            }
            let next = domain.apply(&state, action);
            if seen.contains_key(&next.facts) {
                continue;
            }
            let id = nodes.len();
            seen.insert(next.facts.clone(), id);
            nodes.push(Node {
                parent: idx,
                action: Some(action.clone()),
                depth: nodes[idx].depth + 1,
            });
            let reached = goal.satisfied_count(&next) == goal.conditions.len();
            states.push(next);
            if reached {
                return Some(backtrack(&nodes, id));
            }
            queue.push_back(id);
        }
    }
    None
}

fn backtrack(nodes: &[Node], mut id: usize) -> Vec<GroundAction> {
    let mut plan = Vec::new();
    while let Some(a) = &nodes[id].action {
        plan.push(a.clone());
        id = nodes[id].parent;
    }
    plan.reverse();
    plan
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateLimitExceeded(pub usize);

/// All states reachable from `start`, in BFS discovery order. Fails once more
/// than `limit` distinct states have been discovered.
pub fn reachable_states(
    domain: &Domain,
    start: &EnvState,
    limit: usize,
) -> Result<Vec<EnvState>, StateLimitExceeded> {
    let groundings = domain.groundings(&start.objects);
    let mut seen: BTreeSet<BTreeSet<Fact>> = BTreeSet::new();
    seen.insert(start.facts.clone());
    let mut order = vec![start.clone()];
    let mut head = 0;
    while head < order.len() {
        let state = order[head].clone();
        head += 1;
        for action in &groundings {
            if domain.is_applicable(&state, action) {
                let next = domain.apply(&state, action);
                if seen.insert(next.facts.clone()) {
                    if order.len() >= limit {
                        return Err(StateLimitExceeded(limit));
                    }
                    order.push(next);
                }
            }
        }
    }
    Ok(order)
}
