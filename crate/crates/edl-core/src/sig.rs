//! Propositional signatures, valuations, and observations.
//!
//! A [`Signature`] is the finite set P of propositional symbols a problem
//! instance ranges over, stored sorted by name. Valuations over P are bit
//! masks ([`Mask`]) relative to the signature's name order: bit i set means
//! the i-th proposition is true, all others false. Observations split into a
//! set of propositions seen true and a set seen false.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A valuation over a [`Signature`], as a bit mask in the signature's
/// proposition order. Supports signatures of up to 32 propositions, far
/// beyond what any of the exponential constructions here can handle anyway.
pub type Mask = u32;

/// A finite propositional signature: sorted, duplicate-free proposition names.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    props: Vec<String>,
}

impl Signature {
    /// Builds a signature from proposition names. Names are sorted; duplicate
    /// or empty names are rejected, as are names that are not identifiers.
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut props: Vec<String> = names.into_iter().map(Into::into).collect();
        props.sort();
        for name in &props {
            if !is_identifier(name) {
                return Err(Error::InvalidProposition(name.clone()));
            }
        }
        if props.windows(2).any(|w| w[0] == w[1]) {
            let dup = props
                .windows(2)
                .find(|w| w[0] == w[1])
                .map(|w| w[0].clone())
                .unwrap_or_default();
            return Err(Error::DuplicateProposition(dup));
        }
        if props.len() > 32 {
            return Err(Error::SignatureTooLarge(props.len()));
        }
        Ok(Signature { props })
    }

    /// Number of propositions.
    pub fn len(&self) -> usize {
        self.props.len()
    }

    /// True when the signature is empty.
    pub fn is_empty(&self) -> bool {
        self.props.is_empty()
    }

    /// The proposition names, sorted.
    pub fn props(&self) -> &[String] {
        &self.props
    }

    /// Index of a proposition name, if present.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.props.binary_search_by(|p| p.as_str().cmp(name)).ok()
    }

    /// Bit for a proposition name.
    pub fn bit(&self, name: &str) -> Result<Mask> {
        self.index_of(name)
            .map(|i| 1 << i)
            .ok_or_else(|| Error::UnknownProposition(name.to_string()))
    }

    /// Mask with every proposition set.
    pub fn full_mask(&self) -> Mask {
        if self.props.is_empty() {
            0
        } else {
            (1u32 << self.props.len()) - 1
        }
    }

    /// All valuations over the signature, in numeric mask order.
    pub fn all_masks(&self) -> impl Iterator<Item = Mask> {
        0..(1u64 << self.props.len()) as Mask
    }

    /// Mask from the set of true proposition names (all others false).
    pub fn mask_of<'a, I>(&self, true_props: I) -> Result<Mask>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut m = 0;
        for name in true_props {
            m |= self.bit(name)?;
        }
        Ok(m)
    }

    /// Names of the propositions set in `m`, in signature order.
    pub fn names_of(&self, m: Mask) -> Vec<String> {
        self.props
            .iter()
            .enumerate()
            .filter(|(i, _)| m & (1 << i) != 0)
            .map(|(_, p)| p.clone())
            .collect()
    }

    /// Renders a valuation as a literal sequence, one literal per proposition
    /// in signature order: `"p ~q r"`.
    pub fn literals(&self, m: Mask) -> String {
        let mut out = String::new();
        for (i, p) in self.props.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            if m & (1 << i) == 0 {
                out.push('~');
            }
            out.push_str(p);
        }
        out
    }

    /// Parses a literal sequence like `"p ~q r"` (whitespace between literals
    /// optional where unambiguous, e.g. `"p~q r"`). Every proposition of the
    /// signature must occur exactly once.
    pub fn parse_literals(&self, text: &str) -> Result<Mask> {
        let mut mask = 0;
        let mut seen: Mask = 0;
        let bytes = text.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let negated = c == '~';
            if negated {
                i += 1;
            }
            let start = i;
            while i < bytes.len() && ((bytes[i] as char).is_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            if start == i {
                return Err(Error::LiteralParse(text.to_string()));
            }
            let name = &text[start..i];
            let idx = self
                .index_of(name)
                .ok_or_else(|| Error::UnknownProposition(name.to_string()))?;
            if seen & (1 << idx) != 0 {
                return Err(Error::LiteralParse(text.to_string()));
            }
            seen |= 1 << idx;
            if !negated {
                mask |= 1 << idx;
            }
        }
        if seen != self.full_mask() {
            return Err(Error::LiteralParse(text.to_string()));
        }
        Ok(mask)
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_') && !matches!(s, "K" | "Kw" | "true" | "false")
}

/// Compares two valuations as sorted lists of true-proposition indices,
/// lexicographically. This is the canonical valuation order used everywhere a
/// deterministic ordering of valuations is needed (worlds in canonical
/// models, states of normalised domains, event postconditions).
pub fn val_cmp(a: Mask, b: Mask) -> Ordering {
    let (mut x, mut y) = (a, b);
    loop {
        match (x == 0, y == 0) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            (false, false) => {
                let i = x.trailing_zeros();
                let j = y.trailing_zeros();
                if i != j {
                    return i.cmp(&j);
                }
                x &= x - 1;
                y &= y - 1;
            }
        }
    }
}

/// Sorts a slice of valuations into canonical order and removes duplicates.
pub fn sort_vals(vals: &mut Vec<Mask>) {
    vals.sort_by(|a, b| val_cmp(*a, *b));
    vals.dedup();
}

/// An observation: propositions seen true and propositions seen false.
/// The two sets are disjoint; propositions in neither set are unobserved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Obs {
    pos: Mask,
    neg: Mask,
}

impl Obs {
    /// Builds an observation, rejecting overlapping positive/negative sets.
    pub fn new(pos: Mask, neg: Mask) -> Result<Self> {
        if pos & neg != 0 {
            return Err(Error::OverlappingObservation);
        }
        Ok(Obs { pos, neg })
    }

    /// The observation that reveals nothing.
    pub fn empty() -> Self {
        Obs { pos: 0, neg: 0 }
    }

    /// Propositions observed true.
    pub fn pos(&self) -> Mask {
        self.pos
    }

    /// Propositions observed false.
    pub fn neg(&self) -> Mask {
        self.neg
    }

    /// True when the observation is noiseless for valuation `v`: everything
    /// observed true is true in `v`, everything observed false is false.
    pub fn noiseless_for(&self, v: Mask) -> bool {
        self.pos & v == self.pos && self.neg & v == 0
    }

    /// True when `v` is observationally compatible with this observation
    /// (same condition as noiselessness, seen from the valuation's side).
    pub fn compatible(&self, v: Mask) -> bool {
        self.noiseless_for(v)
    }

    /// Renders the observation as literals in signature order, e.g. `"~r ~s"`;
    /// the empty observation renders as `"-"`.
    pub fn render(&self, sig: &Signature) -> String {
        let mut out = String::new();
        for (i, p) in sig.props().iter().enumerate() {
            let bit = 1 << i;
            if self.pos & bit != 0 || self.neg & bit != 0 {
                if !out.is_empty() {
                    out.push(' ');
                }
                if self.neg & bit != 0 {
                    out.push('~');
                }
                out.push_str(p);
            }
        }
        if out.is_empty() {
            out.push('-');
        }
        out
    }
}

impl PartialOrd for Obs {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Obs {
    fn cmp(&self, other: &Self) -> Ordering {
        val_cmp(self.pos, other.pos).then_with(|| val_cmp(self.neg, other.neg))
    }
}

// Display for Obs would need the signature for names; `render` is the real
// printer, this one shows raw masks for debugging.
impl fmt::Display for Obs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(+{:b},-{:b})", self.pos, self.neg)
    }
}

/// Enumerates the valuations compatible with `o`: every valuation extending
/// the observation, in canonical order. The count is 2^(|P| - |pos| - |neg|).
pub fn comp(o: Obs, sig: &Signature) -> Vec<Mask> {
    let free = sig.full_mask() & !(o.pos() | o.neg());
    let mut out = Vec::with_capacity(1 << free.count_ones());
    // Enumerate all subsets of the free bits.
    let mut sub: Mask = 0;
    loop {
        out.push(o.pos() | sub);
        if sub == free {
            break;
        }
        sub = (sub.wrapping_sub(free)) & free;
    }
    out.sort_by(|a, b| val_cmp(*a, *b));
    out
}
