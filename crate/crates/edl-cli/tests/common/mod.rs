//! Shared fixtures: the worked examples exercised across the suites, plus
//! seeded random generators for property tests.
#![allow(dead_code)]

pub mod cli;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use edl_core::domain::{Domain, DomainState};
use edl_core::event::{Event, EventModel, PostOp};
use edl_core::formula::{and, atom, dyn_event, iff, implies, know, kw, neg, or, Formula};
use edl_core::model::EpistemicModel;
use edl_core::sig::{Mask, Obs, Signature};
use edl_core::trace::{ObservationTrace, ObservedTransition};

pub fn sig_p() -> Signature {
    Signature::new(["p"]).unwrap()
}

pub fn sig_pq() -> Signature {
    Signature::new(["p", "q"]).unwrap()
}

pub fn sig_lrs() -> Signature {
    Signature::new(["l", "r", "s"]).unwrap()
}

fn obs(pos: Mask, neg: Mask) -> Obs {
    Obs::new(pos, neg).unwrap()
}

/// Light switch in an unfamiliar room: l the light, r "hand on switch",
/// s "switch up". Out of reach the switch does nothing when flipped.
pub fn light_switch() -> Domain {
    let sig = sig_lrs();
    let val = |text: &str| sig.parse_literals(text).unwrap();
    Domain::new(
        sig.clone(),
        vec!["flip".into(), "move".into()],
        vec![
            ("s0".into(), DomainState::Val(val("~l ~r ~s"))),
            ("s1".into(), DomainState::Val(val("l ~r s"))),
            ("s2".into(), DomainState::Val(val("l r s"))),
            ("s3".into(), DomainState::Val(val("~l r ~s"))),
        ],
        "s0",
        vec![
            ("s0".into(), "flip".into(), "s1".into()),
            ("s1".into(), "flip".into(), "s0".into()),
            ("s2".into(), "flip".into(), "s2".into()),
            ("s3".into(), "flip".into(), "s3".into()),
            ("s0".into(), "move".into(), "s3".into()),
            ("s3".into(), "move".into(), "s0".into()),
            ("s1".into(), "move".into(), "s2".into()),
            ("s2".into(), "move".into(), "s1".into()),
        ],
        vec![
            ("s0".into(), obs(0b000, 0b110)),
            ("s1".into(), obs(0b100, 0b010)),
            ("s2".into(), obs(0b011, 0b000)),
            ("s3".into(), obs(0b010, 0b001)),
        ],
        true,
    )
    .unwrap()
}

/// The six observed light-switch transitions without the out-of-reach flip
/// loops.
pub fn light_sigma6() -> Vec<ObservedTransition> {
    let d = light_switch();
    let o = |i: usize| d.obs(i);
    let t = |from: Obs, action: &str, to: Obs| ObservedTransition {
        from,
        action: action.into(),
        to,
    };
    vec![
        t(o(0), "flip", o(1)),
        t(o(1), "flip", o(0)),
        t(o(0), "move", o(3)),
        t(o(3), "move", o(0)),
        t(o(1), "move", o(2)),
        t(o(2), "move", o(1)),
    ]
}

/// Door-knocking: p the door being unlocked, q somebody being home; one
/// knock action cycling pq -> ~pq -> ~p~q -> pq.
pub fn door() -> Domain {
    cycle3(&sig_pq(), [0b11, 0b10, 0b00], "a")
}

/// A three-state single-action cycle over p,q where states containing q are
/// observed as q and the rest as ¬q.
pub fn cycle3(sig: &Signature, vals: [Mask; 3], action: &str) -> Domain {
    let q_pos = obs(0b10, 0);
    let q_neg = obs(0, 0b10);
    Domain::new(
        sig.clone(),
        vec![action.to_string()],
        vals.iter()
            .enumerate()
            .map(|(i, &v)| (format!("s{i}"), DomainState::Val(v)))
            .collect(),
        "s0",
        (0..3)
            .map(|i| (format!("s{i}"), action.to_string(), format!("s{}", (i + 1) % 3)))
            .collect(),
        vals.iter()
            .enumerate()
            .map(|(i, &v)| (format!("s{i}"), if v & 0b10 != 0 { q_pos } else { q_neg }))
            .collect(),
        true,
    )
    .unwrap()
}

/// The four domains consistent with door-knocking observations, in a fixed
/// reference order D1..D4 (the two `p q`-initial candidates first).
pub fn knock_candidates() -> [Domain; 4] {
    let sig = sig_pq();
    [
        cycle3(&sig, [0b11, 0b10, 0b01], "a"),
        cycle3(&sig, [0b11, 0b10, 0b00], "a"),
        cycle3(&sig, [0b10, 0b11, 0b01], "a"),
        cycle3(&sig, [0b10, 0b11, 0b00], "a"),
    ]
}

/// The period-three knock observation pattern extended to n actions.
pub fn knock_trace(n_actions: usize) -> ObservationTrace {
    let pattern = [obs(0b10, 0), obs(0b10, 0), obs(0, 0b10)];
    ObservationTrace {
        obs: (0..=n_actions).map(|i| pattern[i % 3]).collect(),
        actions: vec!["a".to_string(); n_actions],
    }
}

/// A box that may contain something: flipping the lid alternates between
/// seeing p and seeing nothing.
pub fn box_domain() -> Domain {
    let sig = sig_p();
    Domain::new(
        sig,
        vec!["flip".into()],
        vec![
            ("s0".into(), DomainState::Val(0)),
            ("s1".into(), DomainState::Val(1)),
        ],
        "s0",
        vec![
            ("s0".into(), "flip".into(), "s1".into()),
            ("s1".into(), "flip".into(), "s0".into()),
        ],
        vec![("s0".into(), obs(0, 0)), ("s1".into(), obs(1, 0))],
        true,
    )
    .unwrap()
}

/// The coin-toss event model: toss and cover, outcome unseen.
pub fn coin_toss() -> (EpistemicModel, EventModel) {
    let sig = Signature::new(["h"]).unwrap();
    let m = EpistemicModel::new(sig.clone(), vec![("w0".into(), 1)], vec![vec!["w0".into()]])
        .unwrap();
    let e = EventModel::new(
        sig,
        vec![
            Event {
                id: "e1".into(),
                pre: Formula::Top,
                post: vec![PostOp::True],
            },
            Event {
                id: "e2".into(),
                pre: Formula::Top,
                post: vec![PostOp::False],
            },
        ],
        vec![vec!["e1".into()], vec!["e2".into()]],
    )
    .unwrap();
    (m, e)
}

/// A random valid domain: deterministic, total, generated, noiseless, with
/// exactly `n_props` propositions, exactly `n_actions` actions, and up to
/// `max_states` states.
pub fn rand_domain(
    rng: &mut ChaCha8Rng,
    n_props: usize,
    max_states: usize,
    n_actions: usize,
) -> Domain {
    let names = ["p", "q", "r"];
    let sig = Signature::new(names[..n_props].to_vec()).unwrap();
    let full = sig.full_mask();
    let n_states = rng.gen_range(1..=max_states);
    let actions: Vec<String> = ["a", "b"][..n_actions]
        .iter()
        .map(|a| a.to_string())
        .collect();

    let vals: Vec<Mask> = (0..n_states).map(|_| rng.gen_range(0..=full)).collect();
    let obs: Vec<Obs> = vals
        .iter()
        .map(|&v| {
            let pos = rng.gen_range(0..=full) & v;
            let neg = rng.gen_range(0..=full) & !v & full;
            Obs::new(pos, neg).unwrap()
        })
        .collect();
    let succ: Vec<Vec<usize>> = (0..n_states)
        .map(|_| (0..n_actions).map(|_| rng.gen_range(0..n_states)).collect())
        .collect();

    // Keep the part reachable from state 0.
    let mut keep = vec![false; n_states];
    keep[0] = true;
    let mut queue = vec![0usize];
    while let Some(s) = queue.pop() {
        for &t in &succ[s] {
            if !keep[t] {
                keep[t] = true;
                queue.push(t);
            }
        }
    }
    let index: Vec<usize> = (0..n_states).filter(|&s| keep[s]).collect();
    let renum: Vec<usize> = {
        let mut r = vec![usize::MAX; n_states];
        for (new, &old) in index.iter().enumerate() {
            r[old] = new;
        }
        r
    };
    Domain::new(
        sig,
        actions.clone(),
        index
            .iter()
            .enumerate()
            .map(|(i, &old)| (format!("s{i}"), DomainState::Val(vals[old])))
            .collect(),
        "s0",
        index
            .iter()
            .enumerate()
            .flat_map(|(i, &old)| {
                let actions = &actions;
                let renum = &renum;
                let succ = &succ;
                (0..n_actions).map(move |a| {
                    (
                        format!("s{i}"),
                        actions[a].clone(),
                        format!("s{}", renum[succ[old][a]]),
                    )
                })
            })
            .collect(),
        index
            .iter()
            .enumerate()
            .map(|(i, &old)| (format!("s{i}"), obs[old]))
            .collect(),
        true,
    )
    .unwrap()
}

/// An isomorphic copy of `d`: states renamed and reordered.
pub fn relabel(rng: &mut ChaCha8Rng, d: &Domain) -> Domain {
    let n = d.n_states();
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    let name = |s: usize| format!("t{}", perm[s]);
    Domain::new(
        d.sig().clone(),
        d.actions().to_vec(),
        {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by_key(|&s| perm[s]);
            order
                .iter()
                .map(|&s| (name(s), d.states()[s].clone()))
                .collect()
        },
        &name(d.initial()),
        d.transitions()
            .iter()
            .map(|&(s, a, t)| (name(s), d.actions()[a].clone(), name(t)))
            .collect(),
        (0..n).map(|s| (name(s), d.obs(s))).collect(),
        d.is_flagged_deterministic(),
    )
    .unwrap()
}

/// A behaviourally equivalent variant of `d`: one state is duplicated and
/// some of its incoming transitions are redirected to the copy. The result
/// is bisimilar to `d` but in general not isomorphic.
pub fn split_state(rng: &mut ChaCha8Rng, d: &Domain) -> Domain {
    let n = d.n_states();
    let incoming: Vec<Vec<usize>> = {
        let mut inc = vec![Vec::new(); n];
        for (i, &(_, _, t)) in d.transitions().iter().enumerate() {
            inc[t].push(i);
        }
        inc
    };
    let candidates: Vec<usize> = (0..n).filter(|&s| !incoming[s].is_empty()).collect();
    if candidates.is_empty() {
        return relabel(rng, d);
    }
    let target = candidates[rng.gen_range(0..candidates.len())];
    let copy = n;
    let redirect: Vec<bool> = incoming[target]
        .iter()
        .map(|_| rng.gen_bool(0.5))
        .collect();
    let redirected: std::collections::BTreeSet<usize> = incoming[target]
        .iter()
        .zip(&redirect)
        .filter(|(_, &r)| r)
        .map(|(&e, _)| e)
        .collect();

    let name = |s: usize| format!("u{s}");
    let mut states: Vec<(String, DomainState)> = (0..n)
        .map(|s| (name(s), d.states()[s].clone()))
        .collect();
    states.push((name(copy), d.states()[target].clone()));
    let mut trans: Vec<(String, String, String)> = d
        .transitions()
        .iter()
        .enumerate()
        .map(|(i, &(s, a, t))| {
            let to = if redirected.contains(&i) { copy } else { t };
            (name(s), d.actions()[a].clone(), name(to))
        })
        .collect();
    for (a, action) in d.actions().iter().enumerate() {
        let t = d.successor(target, a).expect("fixture domains are total");
        trans.push((name(copy), action.clone(), name(t)));
    }
    let mut obs: Vec<(String, Obs)> = (0..n).map(|s| (name(s), d.obs(s))).collect();
    obs.push((name(copy), d.obs(target)));

    let built = Domain::new(
        d.sig().clone(),
        d.actions().to_vec(),
        states,
        &name(d.initial()),
        trans,
        obs,
        d.is_flagged_deterministic(),
    )
    .unwrap();
    prune_unreachable(&built)
}

/// Drops unreachable states (the split may orphan the original copy).
pub fn prune_unreachable(d: &Domain) -> Domain {
    let keep = d.reachable();
    if keep.iter().all(|&k| k) {
        return d.clone();
    }
    let ids: Vec<&String> = d.state_ids().iter().collect();
    Domain::new(
        d.sig().clone(),
        d.actions().to_vec(),
        (0..d.n_states())
            .filter(|&s| keep[s])
            .map(|s| (ids[s].clone(), d.states()[s].clone()))
            .collect(),
        ids[d.initial()],
        d.transitions()
            .iter()
            .filter(|&&(s, _, _)| keep[s])
            .map(|&(s, a, t)| (ids[s].clone(), d.actions()[a].clone(), ids[t].clone()))
            .collect(),
        (0..d.n_states())
            .filter(|&s| keep[s])
            .map(|s| (ids[s].clone(), d.obs(s)))
            .collect(),
        d.is_flagged_deterministic(),
    )
    .unwrap()
}

/// A random epistemic model over `sig` with up to `max_worlds` worlds.
pub fn rand_model(rng: &mut ChaCha8Rng, sig: &Signature, max_worlds: usize) -> EpistemicModel {
    let n = rng.gen_range(1..=max_worlds);
    let full = sig.full_mask();
    let worlds: Vec<(String, Mask)> = (0..n)
        .map(|i| (format!("w{i}"), rng.gen_range(0..=full)))
        .collect();
    let blocks = rng.gen_range(1..=n);
    let mut assignment: Vec<usize> = (0..n).map(|_| rng.gen_range(0..blocks)).collect();
    // Every block index below the chosen count must be inhabited.
    for b in 0..blocks {
        if !assignment.contains(&b) {
            let i = rng.gen_range(0..n);
            assignment[i] = b;
        }
    }
    let partition: Vec<Vec<String>> = (0..blocks)
        .map(|b| {
            (0..n)
                .filter(|&i| assignment[i] == b)
                .map(|i| format!("w{i}"))
                .collect()
        })
        .filter(|cell: &Vec<String>| !cell.is_empty())
        .collect();
    EpistemicModel::new(sig.clone(), worlds, partition).unwrap()
}

/// A random event model over `sig` with up to `max_events` events; the
/// preconditions are shallow static formulas.
pub fn rand_event_model(rng: &mut ChaCha8Rng, sig: &Signature, max_events: usize) -> EventModel {
    let n = rng.gen_range(1..=max_events);
    let events: Vec<Event> = (0..n)
        .map(|i| Event {
            id: format!("e{i}"),
            pre: rand_formula(rng, sig, 2, &[]),
            post: (0..sig.len())
                .map(|_| match rng.gen_range(0..3) {
                    0 => PostOp::True,
                    1 => PostOp::False,
                    _ => PostOp::Keep,
                })
                .collect(),
        })
        .collect();
    let blocks = rng.gen_range(1..=n);
    let mut assignment: Vec<usize> = (0..n).map(|_| rng.gen_range(0..blocks)).collect();
    for b in 0..blocks {
        if !assignment.contains(&b) {
            let i = rng.gen_range(0..n);
            assignment[i] = b;
        }
    }
    let partition: Vec<Vec<String>> = (0..blocks)
        .map(|b| {
            (0..n)
                .filter(|&i| assignment[i] == b)
                .map(|i| format!("e{i}"))
                .collect()
        })
        .filter(|cell: &Vec<String>| !cell.is_empty())
        .collect();
    EventModel::new(sig.clone(), events, partition).unwrap()
}

/// A random formula over `sig` of the given connective depth. Dynamic
/// modalities use the supplied names and appear only when some are given.
pub fn rand_formula(
    rng: &mut ChaCha8Rng,
    sig: &Signature,
    depth: usize,
    event_names: &[String],
) -> Formula {
    if depth == 0 {
        return match rng.gen_range(0..6) {
            0 => Formula::Top,
            1 => Formula::Bot,
            _ => atom(sig.props()[rng.gen_range(0..sig.len())].clone()),
        };
    }
    let sub = |rng: &mut ChaCha8Rng| rand_formula(rng, sig, depth - 1, event_names);
    let choices = if event_names.is_empty() { 7 } else { 8 };
    match rng.gen_range(0..choices) {
        0 => neg(sub(rng)),
        1 => and(sub(rng), sub(rng)),
        2 => or(sub(rng), sub(rng)),
        3 => implies(sub(rng), sub(rng)),
        4 => iff(sub(rng), sub(rng)),
        5 => know(sub(rng)),
        6 => kw(sub(rng)),
        _ => dyn_event(
            event_names[rng.gen_range(0..event_names.len())].clone(),
            sub(rng),
        ),
    }
}

/// Exact equality of two domains whose states each carry a single valuation,
/// up to state renaming: same signature and actions, same initial valuation,
/// same valuation-level transition set and observation map, and the same
/// determinism flag. Unlike shape isomorphism this distinguishes candidates
/// that differ only in an unobserved proposition.
pub fn same_valuation_domain(a: &Domain, b: &Domain) -> bool {
    type Form = (
        usize,
        Mask,
        std::collections::BTreeSet<(Mask, usize, Mask)>,
        std::collections::BTreeMap<Mask, Obs>,
        bool,
    );
    fn form(d: &Domain) -> Form {
        let val = |s: usize| {
            let vs = d.state(s).valuations();
            assert_eq!(vs.len(), 1, "state should carry a single valuation");
            vs[0]
        };
        let mut trans = std::collections::BTreeSet::new();
        for s in 0..d.n_states() {
            for ai in 0..d.actions().len() {
                for t in d.successors(s, ai) {
                    trans.insert((val(s), ai, val(t)));
                }
            }
        }
        let obs = (0..d.n_states()).map(|s| (val(s), d.obs(s))).collect();
        (
            d.n_states(),
            val(d.initial()),
            trans,
            obs,
            d.is_flagged_deterministic(),
        )
    }
    a.sig() == b.sig() && a.actions() == b.actions() && form(a) == form(b)
}
