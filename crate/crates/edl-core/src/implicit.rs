//! Learning domains from observation traces: reconstruct the possible runs
//! behind each trace, turn them into candidate domains, and compose the
//! candidates into a single domain carrying the implicit knowledge.

use std::collections::{BTreeMap, BTreeSet};

use crate::compose::sync_compose;
use crate::domain::{Domain, DomainState};
use crate::equiv::domain_sort_key;
use crate::error::{Error, Result};
use crate::par::map_vec;
use crate::sig::{comp, sort_vals, Mask, Obs, Signature};
use crate::trace::ObservationTrace;

/// Options for the implicit learner.
#[derive(Clone, Debug)]
pub struct ImplicitOpts {
    /// Cap on the number of histories reconstructed for any single trace.
    pub max_histories: usize,
    /// Cap on the number of history combinations considered across traces.
    pub max_combinations: u64,
    /// Enumerate the full product of per-trace history sets instead of the
    /// pruned search. Kept as the reference route; the results must agree.
    pub naive_product: bool,
    pub parallel: bool,
}

impl Default for ImplicitOpts {
    fn default() -> Self {
        ImplicitOpts {
            max_histories: 100_000,
            max_combinations: 1_000_000,
            naive_product: false,
            parallel: cfg!(feature = "parallel"),
        }
    }
}

/// A run through concrete valuations consistent with an observation trace:
/// valuation `i` carries observation `i`, and action `i` leads from valuation
/// `i` to valuation `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct History {
    pub vals: Vec<Mask>,
    pub obs: Vec<Obs>,
    pub actions: Vec<String>,
}

impl History {
    pub fn initial(&self) -> Mask {
        self.vals[0]
    }
}

/// The transition and observation maps accumulated while reading histories.
/// A history set induces a domain exactly when both stay functional.
#[derive(Clone, Debug, Default)]
struct PartialMaps {
    trans: BTreeMap<(Mask, usize), Mask>,
    obs: BTreeMap<Mask, Obs>,
}

#[derive(Debug, Default)]
struct Undo {
    trans: Vec<(Mask, usize)>,
    obs: Vec<Mask>,
}

impl PartialMaps {
    fn note_obs(&mut self, v: Mask, o: Obs, undo: &mut Undo) -> bool {
        match self.obs.get(&v) {
            Some(&prev) => prev == o,
            None => {
                self.obs.insert(v, o);
                undo.obs.push(v);
                true
            }
        }
    }

    fn note_step(&mut self, from: Mask, action: usize, to: Mask, undo: &mut Undo) -> bool {
        match self.trans.get(&(from, action)) {
            Some(&prev) => prev == to,
            None => {
                self.trans.insert((from, action), to);
                undo.trans.push((from, action));
                true
            }
        }
    }

    fn merge(&mut self, vals: &[Mask], obs: &[Obs], steps: &[usize]) -> Option<Undo> {
        let mut undo = Undo::default();
        for (i, &v) in vals.iter().enumerate() {
            if !self.note_obs(v, obs[i], &mut undo)
                || (i < steps.len() && !self.note_step(v, steps[i], vals[i + 1], &mut undo))
            {
                self.rollback(&undo);
                return None;
            }
        }
        Some(undo)
    }

    fn rollback(&mut self, undo: &Undo) {
        for k in &undo.trans {
            self.trans.remove(k);
        }
        for k in &undo.obs {
            self.obs.remove(k);
        }
    }
}

fn validate_trace(sig: &Signature, tau: &ObservationTrace) -> Result<()> {
    if tau.obs.len() != tau.actions.len() + 1 {
        return Err(Error::MalformedTrace(format!(
            "{} observations do not fit {} actions",
            tau.obs.len(),
            tau.actions.len()
        )));
    }
    for o in &tau.obs {
        if (o.pos() | o.neg()) & !sig.full_mask() != 0 {
            return Err(Error::UnknownProposition(
                "trace observation uses bits outside the signature".to_string(),
            ));
        }
    }
    Ok(())
}

fn action_indices(acts: &[String], tau: &ObservationTrace) -> Vec<usize> {
    tau.actions
        .iter()
        .map(|a| acts.binary_search(a).expect("action table covers the trace"))
        .collect()
}

/// Depth-first reconstruction of the valuation sequences consistent with an
/// observation trace. A prefix is extended only while both accumulated maps
/// stay functional; violations never heal under extension, so the pruning is
/// exact.
fn val_sequences(
    sig: &Signature,
    obs: &[Obs],
    steps: &[usize],
    max: usize,
) -> Result<Vec<Vec<Mask>>> {
    let comps: Vec<Vec<Mask>> = obs.iter().map(|&o| comp(o, sig)).collect();
    let mut out = Vec::new();
    let mut maps = PartialMaps::default();
    let mut vals = Vec::with_capacity(obs.len());

    fn step(
        comps: &[Vec<Mask>],
        obs: &[Obs],
        steps: &[usize],
        maps: &mut PartialMaps,
        vals: &mut Vec<Mask>,
        out: &mut Vec<Vec<Mask>>,
        max: usize,
    ) -> Result<()> {
        let i = vals.len() - 1;
        if i == steps.len() {
            if out.len() >= max {
                return Err(Error::BudgetExceeded(format!(
                    "more than {max} histories for one trace"
                )));
            }
            out.push(vals.clone());
            return Ok(());
        }
        let extend = |next: Mask, maps: &mut PartialMaps, vals: &mut Vec<Mask>, out: &mut Vec<Vec<Mask>>| {
            let mut undo = Undo::default();
            if maps.note_step(vals[i], steps[i], next, &mut undo)
                && maps.note_obs(next, obs[i + 1], &mut undo)
            {
                vals.push(next);
                let r = step(comps, obs, steps, maps, vals, out, max);
                vals.pop();
                maps.rollback(&undo);
                r
            } else {
                maps.rollback(&undo);
                Ok(())
            }
        };
        if let Some(&forced) = maps.trans.get(&(vals[i], steps[i])) {
            if obs[i + 1].compatible(forced) {
                extend(forced, maps, vals, out)?;
            }
        } else {
            for &next in &comps[i + 1] {
                extend(next, maps, vals, out)?;
            }
        }
        Ok(())
    }

    for &v0 in &comps[0] {
        let mut undo = Undo::default();
        assert!(maps.note_obs(v0, obs[0], &mut undo));
        vals.push(v0);
        let r = step(&comps, obs, steps, &mut maps, &mut vals, &mut out, max);
        vals.pop();
        maps.rollback(&undo);
        r?;
    }
    Ok(out)
}

/// All histories consistent with a trace, in lexicographic valuation order.
pub fn histories(
    sig: &Signature,
    tau: &ObservationTrace,
    opts: &ImplicitOpts,
) -> Result<Vec<History>> {
    validate_trace(sig, tau)?;
    let mut acts: Vec<String> = tau.actions.clone();
    acts.sort();
    acts.dedup();
    let steps = action_indices(&acts, tau);
    let seqs = val_sequences(sig, &tau.obs, &steps, opts.max_histories)?;
    Ok(seqs
        .into_iter()
        .map(|vals| History {
            vals,
            obs: tau.obs.clone(),
            actions: tau.actions.clone(),
        })
        .collect())
}

/// Reference implementation of [`histories`]: filter the full product of
/// per-position candidate valuations. The pruned search must return the same
/// sequence — both emit histories in lexicographic order over the canonical
/// valuation order, position by position.
pub fn histories_naive(
    sig: &Signature,
    tau: &ObservationTrace,
    opts: &ImplicitOpts,
) -> Result<Vec<History>> {
    validate_trace(sig, tau)?;
    let mut acts: Vec<String> = tau.actions.clone();
    acts.sort();
    acts.dedup();
    let steps = action_indices(&acts, tau);
    let comps: Vec<Vec<Mask>> = tau.obs.iter().map(|&o| comp(o, sig)).collect();
    let total = comps
        .iter()
        .try_fold(1u64, |acc, c| acc.checked_mul(c.len() as u64))
        .filter(|&t| t <= opts.max_combinations)
        .ok_or_else(|| {
            Error::BudgetExceeded(format!(
                "candidate product exceeds {}",
                opts.max_combinations
            ))
        })?;
    let mut out = Vec::new();
    let mut idx = vec![0usize; comps.len()];
    for _ in 0..total {
        let vals: Vec<Mask> = idx.iter().zip(&comps).map(|(&i, c)| c[i]).collect();
        let mut maps = PartialMaps::default();
        if maps.merge(&vals, &tau.obs, &steps).is_some() {
            out.push(History {
                vals,
                obs: tau.obs.clone(),
                actions: tau.actions.clone(),
            });
        }
        for pos in (0..idx.len()).rev() {
            idx[pos] += 1;
            if idx[pos] < comps[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
    Ok(out)
}

fn build_domain(
    sig: &Signature,
    acts: &[String],
    initial: Mask,
    maps: &PartialMaps,
) -> Result<Domain> {
    let id = |v: Mask| {
        let text: String = sig.literals(v).split_whitespace().collect();
        if text.is_empty() {
            "e".to_string()
        } else {
            text
        }
    };
    let mut vals: Vec<Mask> = maps.obs.keys().copied().collect();
    sort_vals(&mut vals);
    let states: Vec<(String, DomainState)> =
        vals.iter().map(|&v| (id(v), DomainState::Val(v))).collect();
    let obs: Vec<(String, Obs)> = vals.iter().map(|&v| (id(v), maps.obs[&v])).collect();
    let trans: Vec<(String, String, String)> = maps
        .trans
        .iter()
        .map(|(&(from, a), &to)| (id(from), acts[a].clone(), id(to)))
        .collect();
    let total = maps.trans.len() == vals.len() * acts.len();
    Domain::new(
        sig.clone(),
        acts.to_vec(),
        states,
        &id(initial),
        trans,
        obs,
        total,
    )
}

/// The domain induced by a set of histories sharing an initial valuation:
/// states, transitions and observations are the unions over the histories.
/// Returns `None` when the unions clash, i.e. when no deterministic domain
/// explains all the histories at once.
pub fn domain_of_histories(sig: &Signature, hs: &[History]) -> Result<Option<Domain>> {
    if hs.is_empty() {
        return Err(Error::InvalidDomain("no histories given".to_string()));
    }
    let initial = hs[0].initial();
    if hs.iter().any(|h| h.initial() != initial) {
        return Err(Error::MixedInitialValuations);
    }
    let mut acts: Vec<String> = hs.iter().flat_map(|h| h.actions.iter().cloned()).collect();
    acts.sort();
    acts.dedup();
    let mut maps = PartialMaps::default();
    for h in hs {
        if h.vals.len() != h.obs.len() || h.vals.len() != h.actions.len() + 1 {
            return Err(Error::MalformedTrace(
                "history shape is inconsistent".to_string(),
            ));
        }
        let steps: Vec<usize> = h
            .actions
            .iter()
            .map(|a| acts.binary_search(a).expect("action table covers histories"))
            .collect();
        if maps.merge(&h.vals, &h.obs, &steps).is_none() {
            return Ok(None);
        }
    }
    Ok(Some(build_domain(sig, &acts, initial, &maps)?))
}

type DomainRep = (Mask, Vec<(Mask, Obs)>, Vec<(Mask, usize, Mask)>);

fn make_rep(initial: Mask, maps: &PartialMaps) -> DomainRep {
    (
        initial,
        maps.obs.iter().map(|(&v, &o)| (v, o)).collect(),
        maps.trans
            .iter()
            .map(|(&(from, a), &to)| (from, a, to))
            .collect(),
    )
}

/// Every domain obtainable by explaining each trace with one history, all
/// histories sharing an initial valuation and inducing a deterministic
/// domain together. Duplicates are collapsed structurally; the result is in
/// canonical order.
pub fn learn_domains(
    sig: &Signature,
    traces: &[ObservationTrace],
    opts: &ImplicitOpts,
) -> Result<Vec<Domain>> {
    for tau in traces {
        validate_trace(sig, tau)?;
    }
    if traces.is_empty() {
        return Ok(Vec::new());
    }
    let mut acts: Vec<String> = traces
        .iter()
        .flat_map(|t| t.actions.iter().cloned())
        .collect();
    acts.sort();
    acts.dedup();

    struct TraceData {
        obs: Vec<Obs>,
        steps: Vec<usize>,
        by_initial: BTreeMap<Mask, Vec<Vec<Mask>>>,
    }
    let mut data = Vec::with_capacity(traces.len());
    for tau in traces {
        let steps = action_indices(&acts, tau);
        let mut by_initial: BTreeMap<Mask, Vec<Vec<Mask>>> = BTreeMap::new();
        for seq in val_sequences(sig, &tau.obs, &steps, opts.max_histories)? {
            by_initial.entry(seq[0]).or_default().push(seq);
        }
        data.push(TraceData {
            obs: tau.obs.clone(),
            steps,
            by_initial,
        });
    }

    let shared: Vec<Mask> = data[0]
        .by_initial
        .keys()
        .filter(|v0| data.iter().all(|d| d.by_initial.contains_key(v0)))
        .copied()
        .collect();
    let mut budget = 0u64;
    for &v0 in &shared {
        let product = data
            .iter()
            .try_fold(1u64, |acc, d| {
                acc.checked_mul(d.by_initial[&v0].len() as u64)
            })
            .filter(|&p| p <= opts.max_combinations)
            .ok_or_else(|| {
                Error::BudgetExceeded(format!(
                    "history combinations exceed {}",
                    opts.max_combinations
                ))
            })?;
        budget = budget.saturating_add(product);
    }
    if budget > opts.max_combinations {
        return Err(Error::BudgetExceeded(format!(
            "history combinations exceed {}",
            opts.max_combinations
        )));
    }

    fn collect_rest(
        data: &[TraceData],
        t: usize,
        v0: Mask,
        maps: &mut PartialMaps,
        reps: &mut BTreeSet<DomainRep>,
    ) {
        if t == data.len() {
            reps.insert(make_rep(v0, maps));
            return;
        }
        for seq in &data[t].by_initial[&v0] {
            if let Some(undo) = maps.merge(seq, &data[t].obs, &data[t].steps) {
                collect_rest(data, t + 1, v0, maps, reps);
                maps.rollback(&undo);
            }
        }
    }

    let jobs: Vec<(Mask, usize)> = shared
        .iter()
        .flat_map(|&v0| (0..data[0].by_initial[&v0].len()).map(move |j| (v0, j)))
        .collect();
    let per_job: Vec<BTreeSet<DomainRep>> = if opts.naive_product {
        map_vec(jobs, opts.parallel, |(v0, j)| {
            let mut reps = BTreeSet::new();
            let lens: Vec<usize> = data.iter().skip(1).map(|d| d.by_initial[&v0].len()).collect();
            let mut idx = vec![0usize; lens.len()];
            loop {
                let mut maps = PartialMaps::default();
                let mut ok = maps
                    .merge(&data[0].by_initial[&v0][j], &data[0].obs, &data[0].steps)
                    .is_some();
                for (t, &i) in idx.iter().enumerate() {
                    if !ok {
                        break;
                    }
                    let d = &data[t + 1];
                    ok = maps.merge(&d.by_initial[&v0][i], &d.obs, &d.steps).is_some();
                }
                if ok {
                    reps.insert(make_rep(v0, &maps));
                }
                let mut pos = idx.len();
                while pos > 0 {
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < lens[pos] {
                        break;
                    }
                    idx[pos] = 0;
                }
                if idx.iter().all(|&i| i == 0) {
                    break;
                }
            }
            reps
        })
    } else {
        map_vec(jobs, opts.parallel, |(v0, j)| {
            let mut reps = BTreeSet::new();
            let mut maps = PartialMaps::default();
            let undo = maps
                .merge(&data[0].by_initial[&v0][j], &data[0].obs, &data[0].steps)
                .expect("a single history is self-consistent");
            collect_rest(&data, 1, v0, &mut maps, &mut reps);
            maps.rollback(&undo);
            reps
        })
    };

    let mut reps = BTreeSet::new();
    for set in per_job {
        reps.extend(set);
    }
    let mut out = Vec::with_capacity(reps.len());
    for (initial, obs, trans) in reps {
        let maps = PartialMaps {
            obs: obs.into_iter().collect(),
            trans: trans.into_iter().map(|(f, a, t)| ((f, a), t)).collect(),
        };
        out.push(build_domain(sig, &acts, initial, &maps)?);
    }
    out.sort_by_key(domain_sort_key);
    Ok(out)
}

/// The single domain the traces warrant: the synchronous composition of
/// [`learn_domains`] in canonical order.
pub fn learn_implicit(
    sig: &Signature,
    traces: &[ObservationTrace],
    opts: &ImplicitOpts,
) -> Result<Domain> {
    let all = learn_domains(sig, traces, opts)?;
    sync_compose(&all)
}
