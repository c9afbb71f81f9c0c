//! Crate-wide error type.
//!
//! Every fallible operation in this crate returns [`Result`]. Infeasibility
//! of a linear system and a failed verification are *verdicts*, not errors;
//! errors are reserved for malformed inputs and violated preconditions.

use thiserror::Error;

/// Errors produced by state construction, verification, and composition.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A system shape was given no parties.
    #[error("system shape must have at least one party")]
    EmptyShape,

    /// A party was given dimension zero.
    #[error("party {party} has dimension zero; local dimensions must be at least 1")]
    ZeroDimension { party: usize },

    /// The product of local dimensions does not fit in the index width.
    #[error("total dimension overflows the usize index width")]
    IndexOverflow,

    /// A basis index lies outside its party's dimension.
    #[error("index {index} out of range for party {party} of dimension {dim}")]
    IndexOutOfRange {
        party: usize,
        index: usize,
        dim: usize,
    },

    /// An amplitude list keyed the same basis element twice.
    #[error("duplicate amplitude for basis index {0:?}")]
    DuplicateIndex(Vec<usize>),

    /// A multi-index has the wrong number of entries for the shape.
    #[error("index tuple has {got} entries but the shape has {expected} parties")]
    IndexArity { got: usize, expected: usize },

    /// The state vector has no nonzero amplitude.
    #[error("state has no nonzero amplitude")]
    ZeroState,

    /// A state required to be normalized is not.
    #[error("state is not normalized: squared norm {norm_sq} deviates from 1 beyond tolerance")]
    NotNormalized { norm_sq: f64 },

    /// A numeric amplitude disagrees with its exact annotation.
    #[error("numeric value ({re}, {im}) disagrees with its exact annotation at index {index:?}")]
    ExactMismatch {
        index: Vec<usize>,
        re: f64,
        im: f64,
    },

    /// A party subset is empty, out of range, duplicated, or covers all parties.
    #[error("invalid party subset: {0}")]
    InvalidSubset(String),

    /// A tensor/merge pairing references parties incorrectly.
    #[error("invalid pairing: {0}")]
    InvalidPairing(String),

    /// Two shapes that must agree do not, or a shape has the wrong form.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A parameter lies outside the documented domain of an operation.
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    /// The requested object provably does not exist.
    #[error("no such state exists: {0}")]
    NonExistence(String),

    /// A documented precondition on the input state failed.
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    /// A measurement outcome has zero probability.
    #[error("outcome {outcome} on party {party} has zero probability")]
    NullEvent { party: usize, outcome: usize },

    /// The operation is undefined for this input class.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// Parsing of a serialized state, array, or rational failed.
    #[error("parse error: {0}")]
    Parse(String),

    /// An internal consistency check that should be unreachable failed.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
