use thiserror::Error;

/// Errors raised by the probability engine, the region evaluators and the
/// binning simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("probability mass sums to {sum}, outside the renormalization window")]
    NotNormalizable { sum: f64 },

    #[error("negative probability mass {value} at flat index {index}")]
    NegativeMass { index: usize, value: f64 },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable name `{0}` is already in use")]
    NameCollision(String),

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("alphabet too large: {what} has size {size}, limit {limit}")]
    AlphabetTooLarge {
        what: String,
        size: usize,
        limit: usize,
    },

    #[error("channel row {row} is not a probability vector (sum {sum})")]
    NotStochastic { row: usize, sum: f64 },

    #[error("auxiliary pair is not in the admissible set: {0}")]
    NotInPin(String),

    #[error("auxiliary variable violates its Markov condition (residual {residual:e} bits)")]
    NotMarkov { residual: f64 },

    #[error("Markov precondition {chain} failed for index {index}: residual {residual:e} bits")]
    MarkovPreconditionFailed {
        chain: String,
        index: usize,
        residual: f64,
    },

    #[error("independence precondition failed: {0}")]
    IndependenceFailed(String),

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("sequence length {actual} does not match block length {expected}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("index {index} out of range for {what} (size {size})")]
    IndexOutOfRange {
        what: &'static str,
        index: u64,
        size: u64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
