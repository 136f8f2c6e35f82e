use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("word lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("operation needs a non-empty word")]
    EmptyWord,

    #[error("word length {len} exceeds the supported maximum {max}")]
    WordTooLong { len: usize, max: usize },

    #[error("alpha must lie in (0, 1/2), got {0}")]
    AlphaOutOfRange(String),

    #[error("cannot parse `{input}` as {what}")]
    Parse { what: &'static str, input: String },

    #[error("{0}")]
    OutOfDomain(String),

    #[error("subtraction below the first word of the cycle")]
    PredUnderflow,

    #[error("addition past the last word of the cycle")]
    SuccOverflow,

    #[error("k = {k} exceeds the cap {cap} for this operation")]
    KTooLarge { k: u32, cap: u32 },

    #[error("gap sequence index must be >= 1")]
    GapIndexZero,

    #[error("requested tolerance {tol} is unreachable; best certified radius is {best_radius} at k = {k_used}")]
    TolUnreachable {
        tol: f64,
        best_radius: f64,
        k_used: u32,
    },

    #[error("denominator is zero: {0}")]
    ZeroDenominator(String),

    #[error("point cannot be classified symbolically: {0}")]
    Unclassifiable(String),

    #[error("boundary-word conditions violated: {0}")]
    BoundaryCondition(String),

    #[error("no sign change bracket found over the scanned grid")]
    NoBracket { scanned: Vec<(f64, f64)> },

    #[error("branch search exceeded cap {cap}; point too close to 1")]
    BranchCapExceeded { cap: u32 },

    #[error("matrix has wrong horizon for this check: expected ell = {expected}")]
    WrongEll { expected: String },
}

pub type Result<T> = std::result::Result<T, Error>;
