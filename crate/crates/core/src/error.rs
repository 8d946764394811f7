use thiserror::Error;

/// Errors raised by polynomial construction, the operators, and the verifiers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("ambient degree n is not set")]
    MissingAmbientDegree,
    #[error("effective degree {degree} exceeds ambient degree {ambient}")]
    DegreeExceedsAmbient { degree: usize, ambient: usize },
    #[error("leading coefficient must be nonzero")]
    ZeroLeadingCoefficient,
    #[error("degree {degree} exceeds n = {n}")]
    DegreeExceedsN { degree: usize, n: usize },
    #[error("polynomial has degree {found}, expected exactly {expected}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("sigma {found} does not equal n/2 = {expected}")]
    SigmaMismatch { expected: f64, found: String },
    #[error("constant polynomial has no roots")]
    DegreeZero,
    #[error("non-finite coefficient at index {0}")]
    NonFiniteCoefficient(usize),
    #[error("{count} root(s) failed residual certification")]
    Unconverged { count: usize },
    #[error("root finding failed: {0}")]
    RootFindingFailed(String),
    #[error("point set is empty")]
    EmptyPointSet,
    #[error("polynomial is not self-inversive")]
    NotSelfInversive,
    #[error("degenerate instance: {0}")]
    DegenerateInstance(String),
    #[error("invalid operator spec: {0}")]
    InvalidSpec(String),
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, PolyError>;
