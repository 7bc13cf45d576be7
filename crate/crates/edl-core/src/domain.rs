//! Partially observable domains: validation, the compatibility domain,
//! domains induced by event models, and formula evaluation on domain states.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::event::EventModel;
use crate::formula::Formula;
use crate::model::EpistemicModel;
use crate::semantics::product_update;
use crate::sig::{sort_vals, Mask, Obs, Signature};

pub use crate::sig::comp;

/// Payload of a domain state. All states of one domain use the same variant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DomainState {
    /// A single valuation (the base case: states are subsets of P).
    Val(Mask),
    /// A set of valuations (compatibility-domain states), sorted, non-empty.
    CompSet(Vec<Mask>),
    /// An ordered tuple of valuations (synchronous-composition states).
    /// Order matters: tuples with equal underlying sets but different order
    /// are distinct states.
    Tuple(Vec<Mask>),
    /// A canonical epistemic model (induced-domain states).
    Model(EpistemicModel),
}

impl DomainState {
    fn variant(&self) -> u8 {
        match self {
            DomainState::Val(_) => 0,
            DomainState::CompSet(_) => 1,
            DomainState::Tuple(_) => 2,
            DomainState::Model(_) => 3,
        }
    }

    /// The distinct valuations underlying the state, sorted.
    pub fn valuations(&self) -> Vec<Mask> {
        let mut vals = match self {
            DomainState::Val(v) => vec![*v],
            DomainState::CompSet(vs) | DomainState::Tuple(vs) => vs.clone(),
            DomainState::Model(m) => m.worlds().iter().map(|w| w.val).collect(),
        };
        sort_vals(&mut vals);
        vals.dedup();
        vals
    }
}

/// A bijection between two domains' states witnessing an isomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoWitness {
    pub pairs: Vec<(String, String)>,
}

/// The set of state pairs reached when checking observational bisimilarity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BisimWitness {
    pub pairs: Vec<(String, String)>,
}

/// A partially observable domain: a transition system over action labels
/// together with a noiseless observation per state.
#[derive(Clone, Debug)]
pub struct Domain {
    sig: Signature,
    actions: Vec<String>,
    state_ids: Vec<String>,
    states: Vec<DomainState>,
    initial: usize,
    trans: Vec<(usize, usize, usize)>,
    obs: Vec<Obs>,
    deterministic: bool,
}

impl Domain {
    /// Builds a domain. Referential integrity (known ids, one observation per
    /// state, a single payload variant) is enforced here; semantic conditions
    /// such as reachability or the determinism flag being truthful are
    /// reported by [`Domain::validate`] instead.
    pub fn new(
        sig: Signature,
        actions: Vec<String>,
        states: Vec<(String, DomainState)>,
        initial: &str,
        transitions: Vec<(String, String, String)>,
        obs: Vec<(String, Obs)>,
        deterministic: bool,
    ) -> Result<Domain> {
        let mut sorted_actions = actions;
        sorted_actions.sort();
        if sorted_actions.windows(2).any(|w| w[0] == w[1]) {
            let dup = sorted_actions
                .windows(2)
                .find(|w| w[0] == w[1])
                .unwrap()[0]
                .clone();
            return Err(Error::DuplicateAction(dup));
        }

        let mut state_ids = Vec::with_capacity(states.len());
        let mut payloads = Vec::with_capacity(states.len());
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        for (id, payload) in states {
            if index.insert(id.clone(), payloads.len()).is_some() {
                return Err(Error::DuplicateState(id));
            }
            let payload = normalize_payload(&sig, &id, payload)?;
            state_ids.push(id);
            payloads.push(payload);
        }
        if payloads.is_empty() {
            return Err(Error::InvalidDomain("no states".to_string()));
        }
        if payloads
            .windows(2)
            .any(|w| w[0].variant() != w[1].variant())
        {
            return Err(Error::InvalidDomain(
                "states mix payload variants".to_string(),
            ));
        }

        let initial = *index
            .get(initial)
            .ok_or_else(|| Error::UnknownState(initial.to_string()))?;

        let action_index = |name: &str| -> Result<usize> {
            sorted_actions
                .binary_search_by(|a| a.as_str().cmp(name))
                .map_err(|_| Error::UnknownAction(name.to_string()))
        };
        let state_index = |id: &str| -> Result<usize> {
            index
                .get(id)
                .copied()
                .ok_or_else(|| Error::UnknownState(id.to_string()))
        };

        let mut trans = Vec::with_capacity(transitions.len());
        for (from, action, to) in &transitions {
            trans.push((state_index(from)?, action_index(action)?, state_index(to)?));
        }
        trans.sort_unstable();
        trans.dedup();

        let mut obs_vec: Vec<Option<Obs>> = vec![None; payloads.len()];
        for (id, o) in obs {
            let i = state_index(&id)?;
            if (o.pos() | o.neg()) & !sig.full_mask() != 0 {
                return Err(Error::UnknownProposition(format!(
                    "observation of `{id}` uses bits outside the signature"
                )));
            }
            if obs_vec[i].replace(o).is_some() {
                return Err(Error::InvalidDomain(format!(
                    "state `{id}` has more than one observation"
                )));
            }
        }
        let obs = obs_vec
            .into_iter()
            .enumerate()
            .map(|(i, o)| {
                o.ok_or_else(|| {
                    Error::InvalidDomain(format!("state `{}` has no observation", state_ids[i]))
                })
            })
            .collect::<Result<Vec<Obs>>>()?;

        Ok(Domain {
            sig,
            actions: sorted_actions,
            state_ids,
            states: payloads,
            initial,
            trans,
            obs,
            deterministic,
        })
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_ids(&self) -> &[String] {
        &self.state_ids
    }

    pub fn states(&self) -> &[DomainState] {
        &self.states
    }

    pub fn state(&self, s: usize) -> &DomainState {
        &self.states[s]
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn obs(&self, s: usize) -> Obs {
        self.obs[s]
    }

    pub fn transitions(&self) -> &[(usize, usize, usize)] {
        &self.trans
    }

    pub fn is_flagged_deterministic(&self) -> bool {
        self.deterministic
    }

    pub fn state_index(&self, id: &str) -> Result<usize> {
        self.state_ids
            .iter()
            .position(|s| s == id)
            .ok_or_else(|| Error::UnknownState(id.to_string()))
    }

    pub fn action_index(&self, name: &str) -> Result<usize> {
        self.actions
            .binary_search_by(|a| a.as_str().cmp(name))
            .map_err(|_| Error::UnknownAction(name.to_string()))
    }

    /// Successor states of `s` under action index `a`.
    pub fn successors(&self, s: usize, a: usize) -> Vec<usize> {
        let lo = self.trans.partition_point(|&(f, b, _)| (f, b) < (s, a));
        let hi = self.trans.partition_point(|&(f, b, _)| (f, b) <= (s, a));
        self.trans[lo..hi].iter().map(|&(_, _, t)| t).collect()
    }

    /// The unique successor, when there is exactly one.
    pub fn successor(&self, s: usize, a: usize) -> Option<usize> {
        let succ = self.successors(s, a);
        match succ.as_slice() {
            [t] => Some(*t),
            _ => None,
        }
    }

    /// Whether every (state, action) pair has at most one successor.
    pub fn is_functional(&self) -> bool {
        self.trans
            .windows(2)
            .all(|w| (w[0].0, w[0].1) != (w[1].0, w[1].1))
    }

    /// Whether every (state, action) pair has at least one successor.
    pub fn is_total(&self) -> bool {
        (0..self.states.len())
            .all(|s| (0..self.actions.len()).all(|a| !self.successors(s, a).is_empty()))
    }

    /// Whether the domain really is deterministic: every action applicable
    /// everywhere, with a unique outcome.
    pub fn is_deterministic(&self) -> bool {
        self.is_functional() && self.is_total()
    }

    /// State indices reachable from the initial state.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.states.len()];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(s) = queue.pop_front() {
            for a in 0..self.actions.len() {
                for t in self.successors(s, a) {
                    if !seen[t] {
                        seen[t] = true;
                        queue.push_back(t);
                    }
                }
            }
        }
        seen
    }

    /// Whether every state is reachable from the initial state.
    pub fn is_generated(&self) -> bool {
        self.reachable().iter().all(|&r| r)
    }

    /// Semantic well-formedness diagnostics: reachability of every state,
    /// truthfulness of the determinism flag (unique outcome and universal
    /// applicability), and noiselessness of observations on valuation
    /// states. Empty iff the domain is valid. (Totality of the observation
    /// map and referential integrity are already enforced on construction.)
    pub fn validate(&self) -> Vec<String> {
        let mut diags = Vec::new();
        for (s, reached) in self.reachable().iter().enumerate() {
            if !reached {
                diags.push(format!(
                    "state `{}` is unreachable from the initial state",
                    self.state_ids[s]
                ));
            }
        }
        if self.deterministic {
            for s in 0..self.states.len() {
                for a in 0..self.actions.len() {
                    let n = self.successors(s, a).len();
                    if n == 0 {
                        diags.push(format!(
                            "flagged deterministic but `{}` has no `{}`-successor",
                            self.state_ids[s], self.actions[a]
                        ));
                    } else if n > 1 {
                        diags.push(format!(
                            "flagged deterministic but `{}` has {} `{}`-successors",
                            self.state_ids[s], n, self.actions[a]
                        ));
                    }
                }
            }
        }
        for (s, payload) in self.states.iter().enumerate() {
            if let DomainState::Val(v) = payload {
                let o = self.obs[s];
                if o.pos() & !v != 0 || o.neg() & v != 0 {
                    diags.push(format!(
                        "observation of `{}` is not noiseless for its valuation",
                        self.state_ids[s]
                    ));
                }
            }
        }
        diags
    }

    /// The epistemic model induced by the state with the given index.
    pub fn induced_model(&self, s: usize) -> EpistemicModel {
        induced_epistemic_model(&self.sig, &self.states[s])
    }

    /// Structural equality up to state and action-set identity: same
    /// signature, actions, payloads, initial state, transition structure,
    /// observations, and flag — ignoring state identifiers.
    pub fn structurally_equal(&self, other: &Domain) -> bool {
        self.sig == other.sig
            && self.actions == other.actions
            && self.states == other.states
            && self.initial == other.initial
            && self.trans == other.trans
            && self.obs == other.obs
            && self.deterministic == other.deterministic
    }
}

fn normalize_payload(sig: &Signature, id: &str, payload: DomainState) -> Result<DomainState> {
    let check = |v: Mask| -> Result<Mask> {
        if v & !sig.full_mask() != 0 {
            Err(Error::UnknownProposition(format!(
                "valuation of state `{id}` uses bits outside the signature"
            )))
        } else {
            Ok(v)
        }
    };
    Ok(match payload {
        DomainState::Val(v) => DomainState::Val(check(v)?),
        DomainState::CompSet(vs) => {
            let mut vs = vs
                .into_iter()
                .map(check)
                .collect::<Result<Vec<Mask>>>()?;
            sort_vals(&mut vs);
            vs.dedup();
            if vs.is_empty() {
                return Err(Error::InvalidDomain(format!(
                    "state `{id}` has an empty compatibility set"
                )));
            }
            DomainState::CompSet(vs)
        }
        DomainState::Tuple(vs) => {
            DomainState::Tuple(vs.into_iter().map(check).collect::<Result<Vec<Mask>>>()?)
        }
        DomainState::Model(m) => {
            if m.sig() != sig {
                return Err(Error::SignatureMismatch);
            }
            DomainState::Model(m.canonicalize())
        }
    })
}

/// The epistemic model induced by a domain state: one world per distinct
/// valuation, all mutually indistinguishable, in canonical form.
pub fn induced_epistemic_model(sig: &Signature, s: &DomainState) -> EpistemicModel {
    match s {
        DomainState::Model(m) => m.clone(),
        other => EpistemicModel::from_components(sig.clone(), vec![other.valuations()]),
    }
}

/// The compatibility domain: states become the sets of valuations compatible
/// with what is observed, merging states that look alike. May be
/// non-deterministic even when the input is deterministic.
pub fn compatibility_domain(d: &Domain) -> Result<Domain> {
    if !d.states.iter().all(|s| matches!(s, DomainState::Val(_))) {
        return Err(Error::NonValuationStates);
    }
    if !d.deterministic || !d.is_deterministic() {
        return Err(Error::NotDeterministic);
    }
    let diags = d.validate();
    if !diags.is_empty() {
        return Err(Error::InvalidDomain(diags.join("; ")));
    }

    let mut index: BTreeMap<(Mask, Mask), usize> = BTreeMap::new();
    let mut map = vec![usize::MAX; d.n_states()];
    let mut states = Vec::new();
    let mut obs = Vec::new();
    for (slot, &o) in map.iter_mut().zip(&d.obs) {
        let next = index.len();
        let c = *index.entry((o.pos(), o.neg())).or_insert(next);
        if c == states.len() {
            states.push((format!("c{c}"), DomainState::CompSet(comp(o, &d.sig))));
            obs.push((format!("c{c}"), o));
        }
        *slot = c;
    }
    let mut transitions = BTreeSet::new();
    for &(s, a, t) in &d.trans {
        transitions.insert((map[s], a, map[t]));
    }
    let transitions: Vec<(String, String, String)> = transitions
        .into_iter()
        .map(|(s, a, t)| (format!("c{s}"), d.actions[a].clone(), format!("c{t}")))
        .collect();
    let initial = format!("c{}", map[d.initial]);
    let mut out = Domain::new(
        d.sig.clone(),
        d.actions.clone(),
        states,
        &initial,
        transitions,
        obs,
        false,
    )?;
    out.deterministic = out.is_deterministic();
    Ok(out)
}

/// The domain induced by one event model per action, starting from an
/// epistemic model: states are the canonical models reachable by repeatedly
/// taking connected components of product updates, observations are what
/// holds (or fails) globally. Empty successors are dropped.
pub fn induced_domain(
    models: &BTreeMap<String, EventModel>,
    m0: &EpistemicModel,
) -> Result<Domain> {
    for e in models.values() {
        if e.sig() != m0.sig() {
            return Err(Error::SignatureMismatch);
        }
    }
    let m0 = m0.canonicalize();
    if m0.is_empty() {
        return Err(Error::InvalidDomain(
            "initial epistemic model is empty".to_string(),
        ));
    }
    let sig = m0.sig().clone();
    let actions: Vec<String> = models.keys().cloned().collect();

    let mut index: BTreeMap<Vec<Vec<Mask>>, usize> = BTreeMap::new();
    let mut found: Vec<EpistemicModel> = Vec::new();
    let mut transitions: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
    index.insert(m0.canonical_key(), 0);
    found.push(m0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let m = found[i].clone();
        for (a, name) in actions.iter().enumerate() {
            let prod = product_update(&m, &models[name])?;
            for cell in prod.canonical_key() {
                let comp_model = EpistemicModel::from_components(sig.clone(), vec![cell]);
                let key = comp_model.canonical_key();
                let next = found.len();
                let j = *index.entry(key).or_insert(next);
                if j == found.len() {
                    found.push(comp_model);
                    queue.push_back(j);
                }
                transitions.insert((i, a, j));
            }
        }
    }

    let obs_of = |m: &EpistemicModel| -> Obs {
        let mut pos = sig.full_mask();
        let mut neg = sig.full_mask();
        for w in m.worlds() {
            pos &= w.val;
            neg &= !w.val;
        }
        Obs::new(pos, neg & sig.full_mask()).expect("globally true and false sets are disjoint")
    };

    let states: Vec<(String, DomainState)> = found
        .iter()
        .enumerate()
        .map(|(i, m)| (format!("m{i}"), DomainState::Model(m.clone())))
        .collect();
    let obs: Vec<(String, Obs)> = found
        .iter()
        .enumerate()
        .map(|(i, m)| (format!("m{i}"), obs_of(m)))
        .collect();
    let transitions: Vec<(String, String, String)> = transitions
        .into_iter()
        .map(|(s, a, t)| (format!("m{s}"), actions[a].clone(), format!("m{t}")))
        .collect();
    let mut out = Domain::new(sig, actions, states, "m0", transitions, obs, false)?;
    out.deterministic = out.is_deterministic();
    Ok(out)
}

/// Evaluates a formula at a domain state: boolean connectives and knowledge
/// are read on the induced epistemic model, and a dynamic modality `[a] f`
/// over an action label holds iff `f` holds at every `a`-successor state.
pub fn eval_on_state(d: &Domain, state: &str, f: &Formula) -> Result<bool> {
    eval_on_state_idx(d, d.state_index(state)?, f)
}

/// Index-based variant of [`eval_on_state`].
pub fn eval_on_state_idx(d: &Domain, s: usize, f: &Formula) -> Result<bool> {
    let m = d.induced_model(s);
    for w in 0..m.n_worlds() {
        if !eval_mixed(d, s, &m, w, f)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn eval_mixed(d: &Domain, s: usize, m: &EpistemicModel, w: usize, f: &Formula) -> Result<bool> {
    match f {
        Formula::Top => Ok(true),
        Formula::Bot => Ok(false),
        Formula::Atom(p) => {
            let i = d
                .sig
                .index_of(p)
                .ok_or_else(|| Error::UnknownProposition(p.clone()))?;
            Ok(m.val_of(w) & (1 << i) != 0)
        }
        Formula::Neg(g) => Ok(!eval_mixed(d, s, m, w, g)?),
        Formula::And(l, r) => {
            let a = eval_mixed(d, s, m, w, l)?;
            let b = eval_mixed(d, s, m, w, r)?;
            Ok(a && b)
        }
        Formula::Or(l, r) => {
            let a = eval_mixed(d, s, m, w, l)?;
            let b = eval_mixed(d, s, m, w, r)?;
            Ok(a || b)
        }
        Formula::Implies(l, r) => {
            let a = eval_mixed(d, s, m, w, l)?;
            let b = eval_mixed(d, s, m, w, r)?;
            Ok(!a || b)
        }
        Formula::Iff(l, r) => {
            let a = eval_mixed(d, s, m, w, l)?;
            let b = eval_mixed(d, s, m, w, r)?;
            Ok(a == b)
        }
        Formula::Know(g) => {
            for v in 0..m.n_worlds() {
                if m.same_component(w, v) && !eval_mixed(d, s, m, v, g)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::KnowWhether(g) => {
            let mut any_true = false;
            let mut any_false = false;
            for v in 0..m.n_worlds() {
                if m.same_component(w, v) {
                    if eval_mixed(d, s, m, v, g)? {
                        any_true = true;
                    } else {
                        any_false = true;
                    }
                }
            }
            Ok(!(any_true && any_false))
        }
        Formula::DynAction(name, g) => match d.action_index(name) {
            Ok(a) => eval_after_action(d, s, a, g),
            Err(_) => Err(Error::UnknownAction(name.clone())),
        },
        // In a domain context a bracketed name denotes an action of the
        // domain; names that are not actions have nothing to resolve to.
        Formula::DynEvent(name, g) => match d.action_index(name) {
            Ok(a) => eval_after_action(d, s, a, g),
            Err(_) => Err(Error::EventModalityInDomainEval(name.clone())),
        },
    }
}

fn eval_after_action(d: &Domain, s: usize, a: usize, g: &Formula) -> Result<bool> {
    for t in d.successors(s, a) {
        if !eval_on_state_idx(d, t, g)? {
            return Ok(false);
        }
    }
    Ok(true)
}
