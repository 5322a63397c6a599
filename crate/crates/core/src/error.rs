use thiserror::Error;

/// Why a seed cannot be read as rank-two vector data.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Rank2Failure {
    #[error("rank of the skew form is {0}, not 2")]
    RankNotTwo(usize),
    #[error("induced form on N/K has determinant {0}, so it is non-unimodular")]
    NonUnimodular(String),
    #[error("image of e_{0} in N/K is not primitive")]
    NonPrimitiveImage(usize),
    #[error("d_{0} is not 1")]
    NonUnitSymmetrizer(usize),
    #[error("seed has frozen variables")]
    FrozenVariables,
    #[error("vectors do not generate the rank-two lattice")]
    NotGenerating,
    #[error("vector w_{0} is zero or not primitive")]
    NonPrimitiveVector(usize),
    #[error("w and nu have different lengths")]
    LengthMismatch,
    #[error("nu_{0} must be positive")]
    NonPositiveWeight(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("the zero vector has no divisibility index")]
    ZeroVector,
    #[error("invalid fixed data: {0}")]
    InvalidFixedData(String),
    #[error("invalid seed: {0}")]
    InvalidSeed(String),
    #[error("index {0} is out of range")]
    IndexOutOfRange(usize),
    #[error("index {0} is frozen and cannot be mutated")]
    FrozenIndex(usize),
    #[error("matrix is not skew-symmetrizable with the given d")]
    NotSymmetrizable,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("assumption violated: {0}")]
    Assumption(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("rank-two realization failed: {0}")]
    Rank2(#[from] Rank2Failure),
    #[error("Laurent violation along path {path:?}: {expression}")]
    LaurentViolation { path: Vec<usize>, expression: String },
    #[error("negative power {0} of a binomial")]
    NegativePower(i64),
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("malformed fan: {0}")]
    MalformedFan(String),
    #[error("vector is not in K: {0}")]
    NotInKernel(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant broken: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
