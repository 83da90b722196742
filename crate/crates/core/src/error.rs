use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("Gram matrix is not symmetric positive definite")]
    GramNotPositiveDefinite,
    #[error("algebra is not nilpotent")]
    NotNilpotent,
    #[error("algebra is not solvable")]
    NotSolvable,
    #[error("algebra is not unimodular")]
    NotUnimodular,
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("split is not g-orthogonal")]
    SplitNotOrthogonal,
    #[error("invalid split: {0}")]
    SplitInvalid(String),
    #[error("m must be nonzero")]
    ZeroM,
    #[error("bad partition: {0}")]
    BadPartition(String),
    #[error("ad_a is not normal for some a in the complement of the nilradical")]
    AdANotNormal,
    #[error("basis is not a Heisenberg basis: {0}")]
    BasisNotHeisenberg(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("actions of the abelian factor do not commute")]
    ActionsDoNotCommute,
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("validation error: {0}")]
    Validation(String),
}
