//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong constructing or combining models, domains,
/// traces, and learner inputs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid proposition name `{0}` (must be an identifier, not a keyword)")]
    InvalidProposition(String),

    #[error("duplicate proposition `{0}` in signature")]
    DuplicateProposition(String),

    #[error("signature has {0} propositions; at most 32 are supported")]
    SignatureTooLarge(usize),

    #[error("unknown proposition `{0}`")]
    UnknownProposition(String),

    #[error("cannot parse literal sequence `{0}` (every proposition must occur exactly once)")]
    LiteralParse(String),

    #[error("observation has overlapping positive and negative parts")]
    OverlappingObservation,

    #[error("syntax error at byte {pos}: {msg}")]
    FormulaParse { pos: usize, msg: String },

    #[error("unknown world `{0}`")]
    UnknownWorld(String),

    #[error("duplicate world id `{0}`")]
    DuplicateWorld(String),

    #[error("partition does not cover world/event `{0}` exactly once")]
    BadPartition(String),

    #[error("unknown event model `{0}` in dynamic modality")]
    UnknownEventModel(String),

    #[error("unknown event `{0}`")]
    UnknownEvent(String),

    #[error("duplicate event id `{0}`")]
    DuplicateEvent(String),

    #[error("postcondition of event `{0}` is not total on the signature")]
    PartialPostcondition(String),

    #[error("action modality `[{0}]` evaluated outside a domain context")]
    ActionModalityInStaticEval(String),

    #[error("event modality `[{0}]` evaluated in a domain-state context")]
    EventModalityInDomainEval(String),

    #[error("signature mismatch between models")]
    SignatureMismatch,

    #[error("unknown action `{0}`")]
    UnknownAction(String),

    #[error("duplicate action `{0}`")]
    DuplicateAction(String),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("duplicate state id `{0}`")]
    DuplicateState(String),

    #[error("domain is invalid: {0}")]
    InvalidDomain(String),

    #[error("operation requires a deterministic domain")]
    NotDeterministic,

    #[error("operation requires domains over the same signature and action set")]
    IncompatibleDomains,

    #[error("domains' states are not all propositional valuations")]
    NonValuationStates,

    #[error("synchronous composition reached a global state whose components observe differently (inputs are not pairwise bisimilar)")]
    ComposeObsMismatch,

    #[error("synchronous composition of an empty family")]
    EmptyComposition,

    #[error("instance exceeds the size guard ({0}); raise the limit explicitly to proceed")]
    GuardExceeded(String),

    #[error("enumeration budget exceeded ({0}); raise the budget explicitly to proceed")]
    BudgetExceeded(String),

    #[error("histories must share one initial valuation")]
    MixedInitialValuations,

    #[error("trace is malformed: {0}")]
    MalformedTrace(String),

    #[error("search horizon must be at least 1")]
    InvalidHorizon,

    #[error("JSON error: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
