//! Truth in epistemic models and the product update.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::event::{apply_post, EventModel};
use crate::formula::Formula;
use crate::model::{EpistemicModel, World};

/// Resolves the names of dynamic modalities to event models.
pub type EventEnv = BTreeMap<String, EventModel>;

/// Evaluates a formula at the world with the given id.
pub fn eval(m: &EpistemicModel, world: &str, f: &Formula, env: &EventEnv) -> Result<bool> {
    let w = m.world_index(world)?;
    eval_at(m, w, f, env)
}

/// Evaluates a formula at a world given by index.
pub fn eval_at(m: &EpistemicModel, w: usize, f: &Formula, env: &EventEnv) -> Result<bool> {
    match f {
        Formula::Top => Ok(true),
        Formula::Bot => Ok(false),
        Formula::Atom(p) => {
            let i = m
                .sig()
                .index_of(p)
                .ok_or_else(|| Error::UnknownProposition(p.clone()))?;
            Ok(m.val_of(w) & (1 << i) != 0)
        }
        Formula::Neg(g) => Ok(!eval_at(m, w, g, env)?),
        Formula::And(l, r) => {
            let a = eval_at(m, w, l, env)?;
            let b = eval_at(m, w, r, env)?;
            Ok(a && b)
        }
        Formula::Or(l, r) => {
            let a = eval_at(m, w, l, env)?;
            let b = eval_at(m, w, r, env)?;
            Ok(a || b)
        }
        Formula::Implies(l, r) => {
            let a = eval_at(m, w, l, env)?;
            let b = eval_at(m, w, r, env)?;
            Ok(!a || b)
        }
        Formula::Iff(l, r) => {
            let a = eval_at(m, w, l, env)?;
            let b = eval_at(m, w, r, env)?;
            Ok(a == b)
        }
        Formula::Know(g) => {
            for v in 0..m.n_worlds() {
                if m.same_component(w, v) && !eval_at(m, v, g, env)? {
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
                    if eval_at(m, v, g, env)? {
                        any_true = true;
                    } else {
                        any_false = true;
                    }
                }
            }
            Ok(!(any_true && any_false))
        }
        Formula::DynEvent(name, g) => {
            let e = env
                .get(name)
                .ok_or_else(|| Error::UnknownEventModel(name.clone()))?;
            if e.sig() != m.sig() {
                return Err(Error::SignatureMismatch);
            }
            let raw = RawProduct::build(m, e, env)?;
            for (j, event) in e.events().iter().enumerate() {
                if !eval_at(m, w, &event.pre, env)? {
                    continue;
                }
                let idx = raw.index_of(w, j).expect("applicable pair in product");
                if !eval_at(&raw.model, idx, g, env)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::DynAction(a, _) => Err(Error::ActionModalityInStaticEval(a.clone())),
    }
}

/// Whether the formula holds at every world of the model (vacuously true on
/// the empty model).
pub fn eval_global(m: &EpistemicModel, f: &Formula, env: &EventEnv) -> Result<bool> {
    for w in 0..m.n_worlds() {
        if !eval_at(m, w, f, env)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The product update of a model with an event model, in canonical
/// (bisimulation-minimal) form.
pub fn product_update(m: &EpistemicModel, e: &EventModel) -> Result<EpistemicModel> {
    product_update_env(m, e, &EventEnv::new())
}

/// Like [`product_update`] but resolving dynamic modalities inside
/// preconditions through an environment.
pub fn product_update_env(
    m: &EpistemicModel,
    e: &EventModel,
    env: &EventEnv,
) -> Result<EpistemicModel> {
    if e.sig() != m.sig() {
        return Err(Error::SignatureMismatch);
    }
    Ok(RawProduct::build(m, e, env)?.model.canonicalize())
}

/// The uncontracted product: one world per (world, applicable event) pair.
/// Bisimulation contraction preserves modal truth, so evaluating behind a
/// dynamic modality can use either form; this one keeps the pair structure.
pub(crate) struct RawProduct {
    pub model: EpistemicModel,
    pub pairs: Vec<(usize, usize)>,
}

impl RawProduct {
    pub fn build(m: &EpistemicModel, e: &EventModel, env: &EventEnv) -> Result<RawProduct> {
        let mut pre_ok = vec![false; m.n_worlds() * e.events().len().max(1)];
        for w in 0..m.n_worlds() {
            for (j, event) in e.events().iter().enumerate() {
                pre_ok[w * e.events().len() + j] = eval_at(m, w, &event.pre, env)?;
            }
        }
        let mut worlds = Vec::new();
        let mut pairs = Vec::new();
        let mut comp_of = Vec::new();
        let mut comp_index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for w in 0..m.n_worlds() {
            for (j, event) in e.events().iter().enumerate() {
                if !pre_ok[w * e.events().len() + j] {
                    continue;
                }
                let key = (m.component_of(w), e.component_of(j));
                let next = comp_index.len();
                let c = *comp_index.entry(key).or_insert(next);
                comp_of.push(c);
                pairs.push((w, j));
                worlds.push(World {
                    id: format!("w{}", worlds.len()),
                    val: apply_post(&event.post, m.val_of(w)),
                });
            }
        }
        let n_comps = comp_index.len();
        Ok(RawProduct {
            model: EpistemicModel::from_parts(m.sig().clone(), worlds, comp_of, n_comps),
            pairs,
        })
    }

    pub fn index_of(&self, w: usize, j: usize) -> Option<usize> {
        self.pairs.iter().position(|&p| p == (w, j))
    }
}
