//! Learning symbolic models of unknown, partially observable, deterministic
//! domains from interaction traces, built on a single-agent dynamic
//! epistemic logic kernel.
//!
//! The crate has three layers:
//!
//! * a logic kernel — formulas ([`formula`]), epistemic models ([`model`]),
//!   event models ([`event`]), truth and product update ([`semantics`]);
//! * domains — partially observable transition systems ([`domain`]), their
//!   comparisons ([`equiv`]), and synchronous composition ([`compose`]);
//! * learners — from observed transitions to event models ([`explicit`]) and
//!   from observation traces to a behavioural-equivalence domain
//!   ([`implicit`]), plus trace generation ([`trace`]) and epistemic
//!   planning ([`plan`]).
//!
//! With the default `parallel` feature the heavy enumeration steps fan out
//! over a thread pool; disabling it yields a dependency-light sequential
//! build with identical results.

pub mod compose;
pub mod domain;
pub mod equiv;
pub mod error;
pub mod event;
pub mod explicit;
pub mod formula;
pub mod implicit;
pub mod json;
pub mod model;
pub mod plan;
pub mod semantics;
pub mod sig;
pub mod trace;

mod par;

pub use error::{Error, Result};
pub use formula::Formula;
pub use model::EpistemicModel;
pub use event::{Event, EventModel, PostOp};
pub use semantics::{eval, eval_global, product_update, EventEnv};
pub use sig::{Mask, Obs, Signature};
