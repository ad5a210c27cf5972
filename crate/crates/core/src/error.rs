use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("state vector is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("state vector has zero norm")]
    ZeroVector,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("frame must contain at least one state")]
    EmptyFrame,

    #[error("operation requires a qubit frame, got dimension {0}")]
    NotQubit(usize),

    #[error("simplex dimension must be at least 2, got {0}")]
    SimplexDimension(usize),

    #[error("frame potential exponent must be at least 1")]
    InvalidExponent,

    #[error("frame operator is not proportional to the identity (residual {residual:.3e})")]
    NotTight { residual: f64 },

    #[error("POVM element {index} is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { index: usize, min_eigenvalue: f64 },

    #[error("POVM elements do not sum to the identity (residual {residual:.3e})")]
    NotComplete { residual: f64 },

    #[error("invalid probability weights: {0}")]
    InvalidWeights(String),

    #[error("alphabet sizes {actual:?} do not match protocol {protocol} (expected {expected:?})")]
    AlphabetMismatch {
        protocol: String,
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("unknown protocol `{0}`")]
    UnknownProtocol(String),

    #[error("unknown attack `{0}`")]
    UnknownAttack(String),

    #[error("interception fraction must lie in [0, 1], got {0}")]
    InvalidFraction(f64),

    #[error("cloning attack requires a cloner unitary")]
    MissingCloner,

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("invalid anneal configuration: {0}")]
    InvalidAnnealConfig(String),

    #[error("invalid q grid: {0}")]
    InvalidGrid(String),

    #[error("key-rate bound is not positive at q = 0 (value {0})")]
    BoundNotPositive(f64),

    #[error("no zero crossing: bound stays positive on [0, 1]")]
    NoZeroCrossing,

    #[error("error rate is not strictly increasing along the curve")]
    NonMonotoneCurve,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}
