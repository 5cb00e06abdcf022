use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid time series: {0}")]
    InvalidSeries(String),

    #[error("invalid warping path: {0}")]
    InvalidPath(String),

    #[error("lattice mismatch: path is on a {found:?} lattice, expected {expected:?}")]
    LatticeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("enumeration budget exceeded: {count} paths on the {m}x{n} lattice (budget {budget})")]
    BudgetExceeded {
        m: usize,
        n: usize,
        count: String,
        budget: u64,
    },

    #[error("exact mode requires integer-valued inputs")]
    NotIntegerValued,

    #[error("exact mode: accumulated costs may exceed 2^53 and cannot be represented exactly")]
    ExactOverflow,

    #[error("empty sample")]
    EmptySample,

    #[error("empty codebook")]
    EmptyCodebook,

    #[error("codebook has no prototype with {0} label")]
    MissingPrototypeClass(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
