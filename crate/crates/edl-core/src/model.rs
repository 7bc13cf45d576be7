//! Epistemic models: worlds with valuations, indistinguishability as a
//! partition, and bisimulation-minimal canonical forms.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::sig::{sort_vals, val_cmp, Mask, Signature};

/// A possible world: an identifier plus a valuation over the signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct World {
    pub id: String,
    pub val: Mask,
}

/// A single-agent epistemic model. Indistinguishability is an equivalence
/// relation, stored as the partition of worlds it induces; the model may be
/// empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpistemicModel {
    sig: Signature,
    worlds: Vec<World>,
    comp_of: Vec<usize>,
    n_comps: usize,
}

impl EpistemicModel {
    /// Builds a model from explicit worlds and a partition given by world
    /// ids. Every world must appear in exactly one cell.
    pub fn new(
        sig: Signature,
        worlds: Vec<(String, Mask)>,
        partition: Vec<Vec<String>>,
    ) -> Result<Self> {
        let mut index: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, (id, val)) in worlds.iter().enumerate() {
            if *val & !sig.full_mask() != 0 {
                return Err(Error::UnknownProposition(format!(
                    "valuation of world `{id}` uses bits outside the signature"
                )));
            }
            if index.insert(id.as_str(), i).is_some() {
                return Err(Error::DuplicateWorld(id.clone()));
            }
        }
        let mut comp_of = vec![usize::MAX; worlds.len()];
        for (c, cell) in partition.iter().enumerate() {
            for id in cell {
                let i = *index
                    .get(id.as_str())
                    .ok_or_else(|| Error::UnknownWorld(id.clone()))?;
                if comp_of[i] != usize::MAX {
                    return Err(Error::BadPartition(format!(
                        "world `{id}` appears in more than one cell"
                    )));
                }
                comp_of[i] = c;
            }
        }
        if let Some(i) = comp_of.iter().position(|&c| c == usize::MAX) {
            return Err(Error::BadPartition(format!(
                "world `{}` is missing from the partition",
                worlds[i].0
            )));
        }
        if partition.iter().any(|cell| cell.is_empty()) {
            return Err(Error::BadPartition("empty partition cell".to_string()));
        }
        let worlds = worlds
            .into_iter()
            .map(|(id, val)| World { id, val })
            .collect();
        Ok(EpistemicModel {
            sig,
            worlds,
            comp_of,
            n_comps: partition.len(),
        })
    }

    pub(crate) fn from_parts(
        sig: Signature,
        worlds: Vec<World>,
        comp_of: Vec<usize>,
        n_comps: usize,
    ) -> Self {
        EpistemicModel {
            sig,
            worlds,
            comp_of,
            n_comps,
        }
    }

    /// Builds a model from bare component contents, generating world ids
    /// `w0, w1, ...` in the given order.
    pub fn from_components(sig: Signature, comps: Vec<Vec<Mask>>) -> Self {
        let mut worlds = Vec::new();
        let mut comp_of = Vec::new();
        for (c, cell) in comps.iter().enumerate() {
            for &val in cell {
                comp_of.push(c);
                worlds.push(World {
                    id: format!("w{}", worlds.len()),
                    val,
                });
            }
        }
        EpistemicModel {
            sig,
            worlds,
            comp_of,
            n_comps: comps.len(),
        }
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn worlds(&self) -> &[World] {
        &self.worlds
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn n_worlds(&self) -> usize {
        self.worlds.len()
    }

    pub fn n_components(&self) -> usize {
        self.n_comps
    }

    /// Index of the world with the given id.
    pub fn world_index(&self, id: &str) -> Result<usize> {
        self.worlds
            .iter()
            .position(|w| w.id == id)
            .ok_or_else(|| Error::UnknownWorld(id.to_string()))
    }

    pub fn val_of(&self, w: usize) -> Mask {
        self.worlds[w].val
    }

    pub fn component_of(&self, w: usize) -> usize {
        self.comp_of[w]
    }

    pub fn same_component(&self, w: usize, v: usize) -> bool {
        self.comp_of[w] == self.comp_of[v]
    }

    /// World indices grouped by component, in component order.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut cells = vec![Vec::new(); self.n_comps];
        for (w, &c) in self.comp_of.iter().enumerate() {
            cells[c].push(w);
        }
        cells
    }

    /// The canonical key: per component the sorted, deduplicated valuations,
    /// components sorted lexicographically and deduplicated. Two models over
    /// the same signature are bisimilar iff their keys are equal.
    pub fn canonical_key(&self) -> Vec<Vec<Mask>> {
        let mut comps: Vec<Vec<Mask>> = self
            .components()
            .into_iter()
            .map(|cell| {
                let mut vals: Vec<Mask> = cell.into_iter().map(|w| self.worlds[w].val).collect();
                sort_vals(&mut vals);
                vals.dedup();
                vals
            })
            .collect();
        comps.sort_by(|a, b| cmp_val_lists(a, b));
        comps.dedup();
        comps
    }

    /// The quotient under bisimulation, in canonical form: one world per
    /// distinct valuation per component, duplicate components merged,
    /// components and valuations canonically ordered, ids regenerated.
    pub fn canonicalize(&self) -> EpistemicModel {
        EpistemicModel::from_components(self.sig.clone(), self.canonical_key())
    }

    /// Whether the two models are bisimilar. Models over different
    /// signatures never are.
    pub fn bisimilar(&self, other: &EpistemicModel) -> bool {
        self.sig == other.sig && self.canonical_key() == other.canonical_key()
    }
}

/// Lexicographic comparison of valuation lists under the valuation order.
pub(crate) fn cmp_val_lists(a: &[Mask], b: &[Mask]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let c = val_cmp(*x, *y);
        if c != std::cmp::Ordering::Equal {
            return c;
        }
    }
    a.len().cmp(&b.len())
}
