use thiserror::Error;

/// Errors produced by the constructions and estimators in this crate.
///
/// Every variant describes a violated precondition on caller input except
/// [`Error::Overflow`], which flags a tower too large to index exactly.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid size {grid} is too small: {reason}")]
    GridTooSmall { grid: usize, reason: String },

    #[error("lacunarity violated at index {index}: k[{next}]/k[{index}] = {ratio:.6} is not > 3")]
    NotLacunary { index: usize, next: usize, ratio: f64 },

    #[error("requested {requested} coefficients but at most {available} are available")]
    RangeTooLarge { requested: usize, available: usize },

    #[error("tower overflow: {0}")]
    Overflow(String),

    #[error("strictness violated: q[{next}] = {q_next} is not > 2 * q[{index}] = {}", 2 * q)]
    StrictnessViolated { index: usize, next: usize, q: u64, q_next: u64 },

    #[error("unsupported dimension {0} (supported: 1 and 2)")]
    UnsupportedDimension(usize),

    #[error("Morse rotations require {0}")]
    MorsePrecondition(String),

    #[error("rotation value out of range at level {level}, coset {coset}: {value} not in [0, {modulus})")]
    RotationOutOfRange { level: usize, coset: usize, value: u64, modulus: u64 },

    #[error("level {level} is outside the valid range {lo}..={hi}")]
    LevelOutOfRange { level: usize, lo: usize, hi: usize },

    #[error("array length {actual} does not match the expected {expected}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("function is not mean-zero: |mean| = {0:e}")]
    NotMeanZero(f64),

    #[error("replicas < 2 (got {0})")]
    TooFewReplicas(usize),

    #[error("no eligible lags: {0}")]
    NoEligibleLags(String),

    #[error("range empty: {0}")]
    RangeEmpty(String),

    #[error("all dyadic blocks are zero")]
    AllBlocksZero,

    #[error("mismatched inputs: {0}")]
    Mismatch(String),

    #[error("empty input: {0}")]
    Empty(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
