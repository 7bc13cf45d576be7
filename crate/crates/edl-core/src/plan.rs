//! Shortest-plan search over deterministic domains for epistemic goals.

use std::collections::VecDeque;

use crate::domain::{eval_on_state_idx, Domain};
use crate::error::{Error, Result};
use crate::formula::Formula;

/// A sequence of actions; executed from the agreed start state it ends in a
/// state satisfying the goal it was searched for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plan {
    pub actions: Vec<String>,
}

/// Breadth-first search for a minimum-length action sequence from `start` to
/// a state satisfying `goal`, evaluated at the end state only. Ties are
/// broken by lexicographic action order. `horizon` bounds the plan length
/// and defaults to the number of states, which revisit-pruned search on a
/// deterministic domain can never need to exceed.
pub fn plan(
    d: &Domain,
    start: &str,
    goal: &Formula,
    horizon: Option<usize>,
) -> Result<Option<Plan>> {
    if !d.is_flagged_deterministic() || !d.is_deterministic() {
        return Err(Error::NotDeterministic);
    }
    let horizon = match horizon {
        Some(0) => return Err(Error::InvalidHorizon),
        Some(h) => h,
        None => d.n_states(),
    };
    let s0 = d.state_index(start)?;
    if eval_on_state_idx(d, s0, goal)? {
        return Ok(Some(Plan {
            actions: Vec::new(),
        }));
    }

    let mut seen = vec![false; d.n_states()];
    seen[s0] = true;
    let mut queue = VecDeque::new();
    queue.push_back((s0, Vec::new()));
    while let Some((s, path)) = queue.pop_front() {
        if path.len() == horizon {
            continue;
        }
        for (a, action) in d.actions().iter().enumerate() {
            let next = d.successor(s, a).expect("deterministic domain is total");
            if seen[next] {
                continue;
            }
            seen[next] = true;
            let mut extended = path.clone();
            extended.push(action.clone());
            if eval_on_state_idx(d, next, goal)? {
                return Ok(Some(Plan { actions: extended }));
            }
            queue.push_back((next, extended));
        }
    }
    Ok(None)
}
