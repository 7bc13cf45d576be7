//! Event models: epistemic actions with preconditions, postconditions, and
//! indistinguishability between events.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::sig::{Mask, Signature};

/// Effect of an event on one proposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PostOp {
    /// Set the proposition true.
    True,
    /// Set the proposition false.
    False,
    /// Leave the proposition as it was.
    Keep,
}

/// An event: a precondition formula and a postcondition giving an effect for
/// every proposition of the signature (in signature order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub id: String,
    pub pre: Formula,
    pub post: Vec<PostOp>,
}

/// A single-agent event model; indistinguishability between events is an
/// equivalence relation stored as a partition. May be empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventModel {
    sig: Signature,
    events: Vec<Event>,
    comp_of: Vec<usize>,
    n_comps: usize,
}

impl EventModel {
    /// Builds an event model. Every event must appear in exactly one
    /// partition cell, postconditions must cover the whole signature, and
    /// precondition atoms must belong to it.
    pub fn new(sig: Signature, events: Vec<Event>, partition: Vec<Vec<String>>) -> Result<Self> {
        let mut index: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, e) in events.iter().enumerate() {
            if index.insert(e.id.as_str(), i).is_some() {
                return Err(Error::DuplicateEvent(e.id.clone()));
            }
            if e.post.len() != sig.len() {
                return Err(Error::PartialPostcondition(e.id.clone()));
            }
            for p in e.pre.atoms() {
                if sig.index_of(&p).is_none() {
                    return Err(Error::UnknownProposition(p));
                }
            }
        }
        let mut comp_of = vec![usize::MAX; events.len()];
        for (c, cell) in partition.iter().enumerate() {
            for id in cell {
                let i = *index
                    .get(id.as_str())
                    .ok_or_else(|| Error::UnknownEvent(id.clone()))?;
                if comp_of[i] != usize::MAX {
                    return Err(Error::BadPartition(format!(
                        "event `{id}` appears in more than one cell"
                    )));
                }
                comp_of[i] = c;
            }
        }
        if let Some(i) = comp_of.iter().position(|&c| c == usize::MAX) {
            return Err(Error::BadPartition(format!(
                "event `{}` is missing from the partition",
                events[i].id
            )));
        }
        if partition.iter().any(|cell| cell.is_empty()) {
            return Err(Error::BadPartition("empty partition cell".to_string()));
        }
        Ok(EventModel {
            sig,
            events,
            comp_of,
            n_comps: partition.len(),
        })
    }

    /// The empty event model over a signature.
    pub fn empty(sig: Signature) -> Self {
        EventModel {
            sig,
            events: Vec::new(),
            comp_of: Vec::new(),
            n_comps: 0,
        }
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn event_index(&self, id: &str) -> Result<usize> {
        self.events
            .iter()
            .position(|e| e.id == id)
            .ok_or_else(|| Error::UnknownEvent(id.to_string()))
    }

    pub fn component_of(&self, e: usize) -> usize {
        self.comp_of[e]
    }

    pub fn same_component(&self, e: usize, f: usize) -> bool {
        self.comp_of[e] == self.comp_of[f]
    }

    pub fn n_components(&self) -> usize {
        self.n_comps
    }

    /// Event indices grouped by component, in component order.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut cells = vec![Vec::new(); self.n_comps];
        for (e, &c) in self.comp_of.iter().enumerate() {
            cells[c].push(e);
        }
        cells
    }
}

/// Builds a full postcondition from (proposition, effect) pairs; propositions
/// not mentioned keep their value.
pub fn post_from_pairs(sig: &Signature, pairs: &[(String, PostOp)]) -> Result<Vec<PostOp>> {
    let mut post = vec![PostOp::Keep; sig.len()];
    for (name, op) in pairs {
        let i = sig
            .index_of(name)
            .ok_or_else(|| Error::UnknownProposition(name.clone()))?;
        post[i] = *op;
    }
    Ok(post)
}

/// Applies a postcondition to a valuation.
pub fn apply_post(post: &[PostOp], val: Mask) -> Mask {
    let mut out = val;
    for (i, op) in post.iter().enumerate() {
        match op {
            PostOp::True => out |= 1 << i,
            PostOp::False => out &= !(1 << i),
            PostOp::Keep => {}
        }
    }
    out
}
