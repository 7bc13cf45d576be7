//! Learning event models from observed transitions: one event model per
//! action, behaviourally correct with respect to explicit knowledge.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::event::{Event, EventModel, PostOp};
use crate::formula::{and, atom, conj, disj, know, kw, neg, Formula};
use crate::sig::{comp, Obs, Signature};
use crate::trace::ObservedTransition;

/// One learned event model per action.
#[derive(Clone, Debug)]
pub struct ExplicitLearnerOutput {
    pub models: BTreeMap<String, EventModel>,
}

/// The explicit knowledge carried by an observation: the observed literals
/// are known, the unobserved propositions are not even known-whether.
/// Literals appear in signature order.
pub fn phi_obs(o: Obs, sig: &Signature) -> Formula {
    let mut literals = Vec::new();
    let mut unknown = Vec::new();
    for (i, name) in sig.props().iter().enumerate() {
        let bit = 1u32 << i;
        if o.pos() & bit != 0 {
            literals.push(atom(name.clone()));
        } else if o.neg() & bit != 0 {
            literals.push(neg(atom(name.clone())));
        } else {
            unknown.push(neg(kw(atom(name.clone()))));
        }
    }
    let known = know(conj(literals));
    if unknown.is_empty() {
        known
    } else {
        and(known, conj(unknown))
    }
}

/// Learns one event model per action from a set of observed transitions.
///
/// For each action and each observation `o` reached by it, the model gets one
/// component: its precondition is the disjunction of [`phi_obs`] over the
/// observations the action was seen from, and its events enumerate every
/// total postcondition extending `o` — one per assignment to the unobserved
/// propositions, never using keep-effects. Actions with no observed
/// transitions get empty models.
pub fn learn_explicit(
    sig: &Signature,
    actions: &[String],
    sigma: &[ObservedTransition],
) -> Result<ExplicitLearnerOutput> {
    let known: BTreeSet<&str> = actions.iter().map(|a| a.as_str()).collect();
    for t in sigma {
        if !known.contains(t.action.as_str()) {
            return Err(Error::UnknownAction(t.action.clone()));
        }
        for o in [t.from, t.to] {
            if (o.pos() | o.neg()) & !sig.full_mask() != 0 {
                return Err(Error::UnknownProposition(
                    "observed transition uses bits outside the signature".to_string(),
                ));
            }
        }
    }

    let mut groups: BTreeMap<&str, BTreeMap<Obs, BTreeSet<Obs>>> = BTreeMap::new();
    for t in sigma {
        groups
            .entry(t.action.as_str())
            .or_default()
            .entry(t.to)
            .or_default()
            .insert(t.from);
    }

    let mut models = BTreeMap::new();
    for action in actions {
        let mut events = Vec::new();
        let mut partition = Vec::new();
        if let Some(targets) = groups.get(action.as_str()) {
            for (o, sources) in targets {
                let pre = disj(sources.iter().map(|s| phi_obs(*s, sig)));
                let mut cell = Vec::new();
                for target_val in comp(*o, sig) {
                    let id = format!("e{}", events.len());
                    let post = (0..sig.len())
                        .map(|i| {
                            if target_val & (1 << i) != 0 {
                                PostOp::True
                            } else {
                                PostOp::False
                            }
                        })
                        .collect();
                    cell.push(id.clone());
                    events.push(Event {
                        id,
                        pre: pre.clone(),
                        post,
                    });
                }
                partition.push(cell);
            }
        }
        models.insert(action.clone(), EventModel::new(sig.clone(), events, partition)?);
    }
    Ok(ExplicitLearnerOutput { models })
}
