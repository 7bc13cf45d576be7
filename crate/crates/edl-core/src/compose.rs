//! Synchronous composition, brute-force enumeration of bisimilar domains,
//! and the behavioural equivalence domain.

use std::collections::BTreeMap;

use crate::domain::{Domain, DomainState};
use crate::equiv::{domain_sort_key, obs_bisimilar};
use crate::error::{Error, Result};
use crate::par::map_vec;
use crate::sig::{val_cmp, Mask, Obs, Signature};

/// The synchronous composition of deterministic, pairwise bisimilar domains
/// over valuations: states are tuples of component states stepping together,
/// observed through the first component (all components must agree).
pub fn sync_compose(domains: &[Domain]) -> Result<Domain> {
    let first = domains.first().ok_or(Error::EmptyComposition)?;
    for d in domains {
        if d.sig() != first.sig() || d.actions() != first.actions() {
            return Err(Error::IncompatibleDomains);
        }
        if !d.is_flagged_deterministic() || !d.is_deterministic() {
            return Err(Error::NotDeterministic);
        }
        if !d.states().iter().all(|s| matches!(s, DomainState::Val(_))) {
            return Err(Error::NonValuationStates);
        }
    }
    let n_actions = first.actions().len();
    let val_at = |i: usize, s: usize| match domains[i].state(s) {
        DomainState::Val(v) => *v,
        _ => unreachable!("checked above"),
    };

    let start: Vec<usize> = domains.iter().map(|d| d.initial()).collect();
    let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::from([(start.clone(), 0)]);
    let mut tuples = vec![start];
    let mut obs: Vec<Obs> = Vec::new();
    let mut trans: Vec<(usize, usize, usize)> = Vec::new();
    let mut head = 0;
    while head < tuples.len() {
        let tuple = tuples[head].clone();
        let o = domains[0].obs(tuple[0]);
        for (i, d) in domains.iter().enumerate() {
            if d.obs(tuple[i]) != o {
                return Err(Error::ComposeObsMismatch);
            }
        }
        obs.push(o);
        for a in 0..n_actions {
            let next: Vec<usize> = domains
                .iter()
                .enumerate()
                .map(|(i, d)| {
                    d.successor(tuple[i], a)
                        .expect("deterministic domain is total")
                })
                .collect();
            let fresh = tuples.len();
            let j = *index.entry(next.clone()).or_insert(fresh);
            if j == tuples.len() {
                tuples.push(next);
            }
            trans.push((head, a, j));
        }
        head += 1;
    }

    let id = |i: usize| format!("g{i}");
    let states: Vec<(String, DomainState)> = tuples
        .iter()
        .enumerate()
        .map(|(i, tuple)| {
            let vals = tuple
                .iter()
                .enumerate()
                .map(|(c, &s)| val_at(c, s))
                .collect();
            (id(i), DomainState::Tuple(vals))
        })
        .collect();
    let obs: Vec<(String, Obs)> = obs.into_iter().enumerate().map(|(i, o)| (id(i), o)).collect();
    let trans: Vec<(String, String, String)> = trans
        .into_iter()
        .map(|(s, a, t)| (id(s), first.actions()[a].clone(), id(t)))
        .collect();
    Domain::new(
        first.sig().clone(),
        first.actions().to_vec(),
        states,
        "g0",
        trans,
        obs,
        true,
    )
}

/// Instance-size limits for [`enumerate_bisimilar`].
#[derive(Clone, Debug)]
pub struct EnumerateOpts {
    pub max_props: usize,
    pub max_actions: usize,
    pub parallel: bool,
}

impl Default for EnumerateOpts {
    fn default() -> Self {
        EnumerateOpts {
            max_props: 2,
            max_actions: 2,
            parallel: cfg!(feature = "parallel"),
        }
    }
}

/// All deterministic, generated, noiselessly observed domains over the
/// signature and actions of `d` whose states are distinct valuations and
/// that are observationally bisimilar to `d` — in canonical order. Brute
/// force by construction: it enumerates every state set, initial state and
/// total transition function, derives the unique observation assignment a
/// bisimulation would force, and confirms survivors with [`obs_bisimilar`].
pub fn enumerate_bisimilar(d: &Domain, opts: &EnumerateOpts) -> Result<Vec<Domain>> {
    let n = d.sig().len();
    if n > opts.max_props {
        return Err(Error::GuardExceeded(format!(
            "{n} propositions (limit {})",
            opts.max_props
        )));
    }
    let n_actions = d.actions().len();
    if n_actions > opts.max_actions {
        return Err(Error::GuardExceeded(format!(
            "{n_actions} actions (limit {})",
            opts.max_actions
        )));
    }
    if !d.is_flagged_deterministic() || !d.is_deterministic() {
        return Err(Error::NotDeterministic);
    }

    let mut all_vals: Vec<Mask> = (0..(1u32 << n)).collect();
    all_vals.sort_by(|a, b| val_cmp(*a, *b));

    let mut jobs = Vec::new();
    for subset in 1u32..(1 << all_vals.len()) {
        let vals: Vec<Mask> = all_vals
            .iter()
            .enumerate()
            .filter(|(i, _)| subset & (1 << i) != 0)
            .map(|(_, v)| *v)
            .collect();
        for s0 in 0..vals.len() {
            jobs.push((vals.clone(), s0));
        }
    }

    let found = map_vec(jobs, opts.parallel, |(vals, s0)| {
        survivors_for_shape(d, &vals, s0)
    });
    let mut out: Vec<Domain> = found.into_iter().flatten().collect::<Result<Vec<_>>>()?;
    out.sort_by_key(domain_sort_key);
    Ok(out)
}

/// All bisimilar candidates over one fixed state set and initial state,
/// trying every total transition function.
fn survivors_for_shape(d: &Domain, vals: &[Mask], s0: usize) -> Vec<Result<Domain>> {
    let k = vals.len();
    let n_actions = d.actions().len();
    let slots = k * n_actions;
    let mut succ = vec![0usize; slots];
    let mut out = Vec::new();
    loop {
        if generated(k, n_actions, s0, &succ) {
            if let Some(obs) = forced_obs(d, vals, s0, &succ) {
                match candidate_domain(d.sig(), d.actions(), vals, s0, &succ, &obs) {
                    Ok(cand) => match obs_bisimilar(d, &cand) {
                        Ok(Some(_)) => out.push(Ok(cand)),
                        Ok(None) => {}
                        Err(e) => out.push(Err(e)),
                    },
                    Err(e) => out.push(Err(e)),
                }
            }
        }
        // Odometer step over all total transition functions.
        let mut i = 0;
        loop {
            if i == slots {
                return out;
            }
            succ[i] += 1;
            if succ[i] < k {
                break;
            }
            succ[i] = 0;
            i += 1;
        }
    }
}

fn generated(k: usize, n_actions: usize, s0: usize, succ: &[usize]) -> bool {
    let mut seen = vec![false; k];
    let mut stack = vec![s0];
    seen[s0] = true;
    let mut count = 1;
    while let Some(s) = stack.pop() {
        for a in 0..n_actions {
            let t = succ[s * n_actions + a];
            if !seen[t] {
                seen[t] = true;
                count += 1;
                stack.push(t);
            }
        }
    }
    count == k
}

/// Walks the product of `d` with the candidate shape. Bisimilarity forces the
/// candidate's observation at every reached state to equal `d`'s at the
/// paired state, so at most one observation assignment can work; returns it
/// if it is consistent and noiseless, `None` otherwise.
fn forced_obs(d: &Domain, vals: &[Mask], s0: usize, succ: &[usize]) -> Option<Vec<Obs>> {
    let k = vals.len();
    let n_actions = d.actions().len();
    let mut assigned: Vec<Option<Obs>> = vec![None; k];
    let mut seen = vec![false; d.n_states() * k];
    let mut stack = vec![(d.initial(), s0)];
    seen[d.initial() * k + s0] = true;
    while let Some((sd, sc)) = stack.pop() {
        let o = d.obs(sd);
        match assigned[sc] {
            None => {
                if o.pos() & !vals[sc] != 0 || o.neg() & vals[sc] != 0 {
                    return None;
                }
                assigned[sc] = Some(o);
            }
            Some(prev) if prev != o => return None,
            _ => {}
        }
        for a in 0..n_actions {
            let next = (
                d.successor(sd, a).expect("deterministic domain is total"),
                succ[sc * n_actions + a],
            );
            if !seen[next.0 * k + next.1] {
                seen[next.0 * k + next.1] = true;
                stack.push(next);
            }
        }
    }
    assigned.into_iter().collect()
}

fn candidate_domain(
    sig: &Signature,
    actions: &[String],
    vals: &[Mask],
    s0: usize,
    succ: &[usize],
    obs: &[Obs],
) -> Result<Domain> {
    let id = |v: Mask| {
        let text: String = sig.literals(v).split_whitespace().collect();
        if text.is_empty() {
            "e".to_string()
        } else {
            text
        }
    };
    let n_actions = actions.len();
    let states: Vec<(String, DomainState)> = vals
        .iter()
        .map(|&v| (id(v), DomainState::Val(v)))
        .collect();
    let obs: Vec<(String, Obs)> = vals.iter().zip(obs.iter()).map(|(&v, &o)| (id(v), o)).collect();
    let mut trans = Vec::with_capacity(succ.len());
    for (s, &v) in vals.iter().enumerate() {
        for (a, action) in actions.iter().enumerate() {
            trans.push((id(v), action.clone(), id(vals[succ[s * n_actions + a]])));
        }
    }
    Domain::new(
        sig.clone(),
        actions.to_vec(),
        states,
        &id(vals[s0]),
        trans,
        obs,
        true,
    )
}

/// The behavioural equivalence domain: the synchronous composition of every
/// domain bisimilar to `d`, in canonical order.
pub fn behavioural_equivalence_domain(d: &Domain, opts: &EnumerateOpts) -> Result<Domain> {
    let all = enumerate_bisimilar(d, opts)?;
    sync_compose(&all)
}
