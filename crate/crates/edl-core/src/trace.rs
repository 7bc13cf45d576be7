//! Simulating a reference domain: execution traces, observation traces,
//! observed transitions, and the sound-and-complete input sets for the
//! learners.

use std::collections::BTreeSet;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::par::map_vec;
use crate::sig::Obs;

/// A transition as the agent sees it: observations around one action.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ObservedTransition {
    pub from: Obs,
    pub action: String,
    pub to: Obs,
}

/// An alternating sequence of states and actions, by state id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecutionTrace {
    pub states: Vec<String>,
    pub actions: Vec<String>,
}

/// An alternating sequence of observations and actions; one observation more
/// than there are actions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ObservationTrace {
    pub obs: Vec<Obs>,
    pub actions: Vec<String>,
}

impl ObservationTrace {
    pub fn n_actions(&self) -> usize {
        self.actions.len()
    }
}

fn require_deterministic(d: &Domain) -> Result<()> {
    if d.is_flagged_deterministic() && d.is_deterministic() {
        Ok(())
    } else {
        Err(Error::NotDeterministic)
    }
}

/// Runs an action sequence from a state of a deterministic domain.
pub fn execute(d: &Domain, start: &str, actions: &[String]) -> Result<ExecutionTrace> {
    require_deterministic(d)?;
    let mut s = d.state_index(start)?;
    let mut states = vec![start.to_string()];
    for action in actions {
        let a = d.action_index(action)?;
        s = d.successor(s, a).expect("deterministic domain is total");
        states.push(d.state_ids()[s].clone());
    }
    Ok(ExecutionTrace {
        states,
        actions: actions.to_vec(),
    })
}

/// Applies the observation function pointwise to an execution trace.
pub fn observe(d: &Domain, trace: &ExecutionTrace) -> Result<ObservationTrace> {
    if trace.states.len() != trace.actions.len() + 1 {
        return Err(Error::MalformedTrace(
            "an execution trace has one more state than actions".to_string(),
        ));
    }
    let obs = trace
        .states
        .iter()
        .map(|id| Ok(d.obs(d.state_index(id)?)))
        .collect::<Result<Vec<Obs>>>()?;
    Ok(ObservationTrace {
        obs,
        actions: trace.actions.clone(),
    })
}

/// Every transition of the domain as the agent would see it, deduplicated:
/// sound and complete observed-transition input for learning.
pub fn sound_complete_transitions(d: &Domain) -> Result<Vec<ObservedTransition>> {
    require_deterministic(d)?;
    let set: BTreeSet<ObservedTransition> = d
        .transitions()
        .iter()
        .map(|&(s, a, t)| ObservedTransition {
            from: d.obs(s),
            action: d.actions()[a].clone(),
            to: d.obs(t),
        })
        .collect();
    Ok(set.into_iter().collect())
}

/// Controls for [`sound_complete_traces`].
#[derive(Clone, Debug)]
pub struct TraceOpts {
    /// Number of actions per trace; defaults to 2^(2|P|), the bound at which
    /// the trace set is complete for learning. Lowering it forfeits that
    /// guarantee.
    pub length: Option<usize>,
    /// Upper bound on the number of enumerated traces.
    pub budget: u64,
    pub parallel: bool,
}

impl Default for TraceOpts {
    fn default() -> Self {
        TraceOpts {
            length: None,
            budget: 1_000_000,
            parallel: cfg!(feature = "parallel"),
        }
    }
}

/// All observation traces of exactly L actions from the initial state of a
/// deterministic domain — one per action sequence, deduplicated and sorted.
pub fn sound_complete_traces(d: &Domain, opts: &TraceOpts) -> Result<Vec<ObservationTrace>> {
    require_deterministic(d)?;
    let length = opts
        .length
        .unwrap_or_else(|| 1usize << (2 * d.sig().len()));
    let n_actions = d.actions().len();

    let mut count: u128 = 1;
    for _ in 0..length {
        count = count.saturating_mul(n_actions as u128);
        if count > opts.budget as u128 {
            return Err(Error::BudgetExceeded(format!(
                "{n_actions}^{length} traces exceed the budget of {}",
                opts.budget
            )));
        }
    }

    if length == 0 || n_actions == 0 {
        if length > 0 {
            return Ok(Vec::new());
        }
        return Ok(vec![ObservationTrace {
            obs: vec![d.obs(d.initial())],
            actions: Vec::new(),
        }]);
    }

    let jobs: Vec<usize> = (0..n_actions).collect();
    let per_first = map_vec(jobs, opts.parallel, |first| {
        let mut out = Vec::new();
        let s = d
            .successor(d.initial(), first)
            .expect("deterministic domain is total");
        let mut obs = vec![d.obs(d.initial()), d.obs(s)];
        let mut actions = vec![first];
        walk_traces(d, s, length - 1, &mut obs, &mut actions, &mut out);
        out
    });
    let set: BTreeSet<ObservationTrace> = per_first.into_iter().flatten().collect();
    Ok(set.into_iter().collect())
}

fn walk_traces(
    d: &Domain,
    s: usize,
    left: usize,
    obs: &mut Vec<Obs>,
    actions: &mut Vec<usize>,
    out: &mut Vec<ObservationTrace>,
) {
    if left == 0 {
        out.push(ObservationTrace {
            obs: obs.clone(),
            actions: actions
                .iter()
                .map(|&a| d.actions()[a].clone())
                .collect(),
        });
        return;
    }
    for a in 0..d.actions().len() {
        let t = d.successor(s, a).expect("deterministic domain is total");
        obs.push(d.obs(t));
        actions.push(a);
        walk_traces(d, t, left - 1, obs, actions, out);
        obs.pop();
        actions.pop();
    }
}
