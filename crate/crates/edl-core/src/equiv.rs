//! Comparing domains: isomorphism, observational bisimilarity, bounded trace
//! equivalence, and a canonical total ordering of domains.

use std::collections::{BTreeSet, VecDeque};

use crate::domain::{BisimWitness, Domain, DomainState, IsoWitness};
use crate::error::{Error, Result};
use crate::sig::{val_cmp, Mask};

/// Rank of every valuation in the valuation order, indexed by mask.
fn val_ranks(n_props: usize) -> Vec<u64> {
    let total = 1u32 << n_props;
    let mut order: Vec<Mask> = (0..total).collect();
    order.sort_by(|a, b| val_cmp(*a, *b));
    let mut rank = vec![0u64; total as usize];
    for (i, m) in order.iter().enumerate() {
        rank[*m as usize] = i as u64;
    }
    rank
}

/// Breadth-first state order from the initial state, expanding actions in
/// sorted order. Defined only for functional generated domains, where it is
/// invariant under state renaming.
fn bfs_order(d: &Domain) -> Option<Vec<usize>> {
    if !d.is_functional() {
        return None;
    }
    let mut pos_of = vec![usize::MAX; d.n_states()];
    let mut order = Vec::with_capacity(d.n_states());
    pos_of[d.initial()] = 0;
    order.push(d.initial());
    let mut head = 0;
    while head < order.len() {
        let s = order[head];
        head += 1;
        for a in 0..d.actions().len() {
            if let Some(t) = d.successors(s, a).first().copied() {
                if pos_of[t] == usize::MAX {
                    pos_of[t] = order.len();
                    order.push(t);
                }
            }
        }
    }
    if order.len() == d.n_states() {
        Some(order)
    } else {
        None
    }
}

/// Shape-and-observations encoding relative to a BFS order: state count,
/// then per state the observation (as valuation ranks) and per action the
/// successor's BFS index plus one (zero for no successor).
fn shape_encoding(d: &Domain, order: &[usize], rank: &[u64]) -> Vec<u64> {
    let mut pos_of = vec![0usize; d.n_states()];
    for (i, &s) in order.iter().enumerate() {
        pos_of[s] = i;
    }
    let mut enc = vec![order.len() as u64];
    for &s in order {
        enc.push(rank[d.obs(s).pos() as usize]);
        enc.push(rank[d.obs(s).neg() as usize]);
        for a in 0..d.actions().len() {
            enc.push(match d.successors(s, a).first() {
                Some(&t) => pos_of[t] as u64 + 1,
                None => 0,
            });
        }
    }
    enc
}

fn payload_encoding(d: &Domain, order: &[usize], rank: &[u64]) -> Vec<u64> {
    let mut enc = Vec::new();
    let push_vals = |enc: &mut Vec<u64>, vs: &[Mask]| {
        enc.push(vs.len() as u64);
        for v in vs {
            enc.push(rank[*v as usize]);
        }
    };
    for &s in order {
        match d.state(s) {
            DomainState::Val(v) => {
                enc.push(0);
                enc.push(rank[*v as usize]);
            }
            DomainState::CompSet(vs) => {
                enc.push(1);
                push_vals(&mut enc, vs);
            }
            DomainState::Tuple(vs) => {
                enc.push(2);
                push_vals(&mut enc, vs);
            }
            DomainState::Model(m) => {
                enc.push(3);
                let key = m.canonical_key();
                enc.push(key.len() as u64);
                for cell in &key {
                    push_vals(&mut enc, cell);
                }
            }
        }
    }
    enc
}

/// A total-order key on domains over a fixed signature and action set:
/// canonical BFS shape encoding first, then state payloads in BFS order.
/// Domains that admit no BFS labelling (non-functional or not generated)
/// sort after all that do, keyed by their raw structure in state-index
/// order.
pub(crate) fn domain_sort_key(d: &Domain) -> Vec<u64> {
    let rank = val_ranks(d.sig().len());
    match bfs_order(d) {
        Some(order) => {
            let mut key = vec![0u64];
            key.extend(shape_encoding(d, &order, &rank));
            key.extend(payload_encoding(d, &order, &rank));
            key
        }
        None => {
            let order: Vec<usize> = (0..d.n_states()).collect();
            let mut key = vec![1u64, d.initial() as u64];
            key.extend(shape_encoding_nondet(d, &rank));
            key.extend(payload_encoding(d, &order, &rank));
            key
        }
    }
}

fn shape_encoding_nondet(d: &Domain, rank: &[u64]) -> Vec<u64> {
    let mut enc = vec![d.n_states() as u64];
    for s in 0..d.n_states() {
        enc.push(rank[d.obs(s).pos() as usize]);
        enc.push(rank[d.obs(s).neg() as usize]);
        for a in 0..d.actions().len() {
            let succ = d.successors(s, a);
            enc.push(succ.len() as u64);
            enc.extend(succ.iter().map(|&t| t as u64));
        }
    }
    enc
}

/// Decides isomorphism: a bijection between the state sets preserving the
/// initial state, transitions in both directions, and observations. State
/// payloads are carried as labels and not required to match. Functional
/// generated domains are compared by canonical BFS encoding; the rest by
/// backtracking seeded by observation equality.
pub fn isomorphic(a: &Domain, b: &Domain) -> Option<IsoWitness> {
    if a.sig() != b.sig()
        || a.actions() != b.actions()
        || a.n_states() != b.n_states()
        || a.transitions().len() != b.transitions().len()
    {
        return None;
    }
    let rank = val_ranks(a.sig().len());
    if let (Some(oa), Some(ob)) = (bfs_order(a), bfs_order(b)) {
        if shape_encoding(a, &oa, &rank) != shape_encoding(b, &ob, &rank) {
            return None;
        }
        let pairs = oa
            .iter()
            .zip(ob.iter())
            .map(|(&i, &j)| (a.state_ids()[i].clone(), b.state_ids()[j].clone()))
            .collect();
        return Some(IsoWitness { pairs });
    }
    backtracking_iso(a, b)
}

fn backtracking_iso(a: &Domain, b: &Domain) -> Option<IsoWitness> {
    let n = a.n_states();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if !assign(a, b, &mut map, &mut used, 0) {
        return None;
    }
    let pairs = map
        .iter()
        .enumerate()
        .map(|(i, &j)| (a.state_ids()[i].clone(), b.state_ids()[j].clone()))
        .collect();
    Some(IsoWitness { pairs })
}

fn assign(a: &Domain, b: &Domain, map: &mut Vec<usize>, used: &mut Vec<bool>, i: usize) -> bool {
    if i == a.n_states() {
        return true;
    }
    for j in 0..b.n_states() {
        if used[j]
            || a.obs(i) != b.obs(j)
            || (i == a.initial()) != (j == b.initial())
            || !consistent(a, b, map, i, j)
        {
            continue;
        }
        map[i] = j;
        used[j] = true;
        if assign(a, b, map, used, i + 1) {
            return true;
        }
        map[i] = usize::MAX;
        used[j] = false;
    }
    false
}

fn consistent(a: &Domain, b: &Domain, map: &[usize], i: usize, j: usize) -> bool {
    let has = |d: &Domain, s: usize, act: usize, t: usize| d.successors(s, act).contains(&t);
    for act in 0..a.actions().len() {
        if has(a, i, act, i) != has(b, j, act, j) {
            return false;
        }
        for (x, &y) in map.iter().enumerate() {
            if y == usize::MAX || x == i {
                continue;
            }
            if has(a, i, act, x) != has(b, j, act, y) || has(a, x, act, i) != has(b, y, act, j) {
                return false;
            }
        }
    }
    true
}

fn require_deterministic(d: &Domain) -> Result<()> {
    if d.is_flagged_deterministic() && d.is_deterministic() {
        Ok(())
    } else {
        Err(Error::NotDeterministic)
    }
}

/// Decides observational bisimilarity of two deterministic domains by
/// exploring the product from the pair of initial states: they are bisimilar
/// iff no reachable pair has differing observations. Returns the reached
/// pair set as the witness relation.
pub fn obs_bisimilar(a: &Domain, b: &Domain) -> Result<Option<BisimWitness>> {
    if a.sig() != b.sig() || a.actions() != b.actions() {
        return Err(Error::IncompatibleDomains);
    }
    require_deterministic(a)?;
    require_deterministic(b)?;
    let start = (a.initial(), b.initial());
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((s, t)) = queue.pop_front() {
        if a.obs(s) != b.obs(t) {
            return Ok(None);
        }
        for act in 0..a.actions().len() {
            let next = (
                a.successor(s, act).expect("deterministic domain is total"),
                b.successor(t, act).expect("deterministic domain is total"),
            );
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    let pairs = seen
        .into_iter()
        .map(|(s, t)| (a.state_ids()[s].clone(), b.state_ids()[t].clone()))
        .collect();
    Ok(Some(BisimWitness { pairs }))
}

/// Compares the observation-trace sets of two deterministic domains up to
/// the given number of actions, by walking all action words and comparing
/// observations pointwise. Deliberately independent of [`obs_bisimilar`]:
/// no product construction, no visited-set pruning.
pub fn trace_equivalent(a: &Domain, b: &Domain, max_actions: usize) -> Result<bool> {
    if a.sig() != b.sig() || a.actions() != b.actions() {
        return Ok(false);
    }
    require_deterministic(a)?;
    require_deterministic(b)?;
    fn walk(a: &Domain, b: &Domain, s: usize, t: usize, left: usize) -> bool {
        if a.obs(s) != b.obs(t) {
            return false;
        }
        if left == 0 {
            return true;
        }
        (0..a.actions().len()).all(|act| {
            walk(
                a,
                b,
                a.successor(s, act).expect("deterministic domain is total"),
                b.successor(t, act).expect("deterministic domain is total"),
                left - 1,
            )
        })
    }
    Ok(walk(a, b, a.initial(), b.initial(), max_actions))
}
