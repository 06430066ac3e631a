use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("unsupported field order {0}")]
    BadFieldOrder(u64),
    #[error("level mismatch: {0}")]
    LevelMismatch(String),
    #[error("bound exceeded: requested {requested}, limit {limit}")]
    BoundExceeded { requested: u64, limit: u64 },
    #[error("the zero element has no divisor")]
    ZeroElement,
    #[error("curve mismatch: {0}")]
    CurveMismatch(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("singular map: g1 g2^s - g1^s g2 = 0")]
    SingularMap,
    #[error("invariant is not a unit")]
    NonRegular,
    #[error("invariant is not in the domain of the divisor")]
    NotInDomain,
    #[error("epsilon must be nonzero with trace zero")]
    BadEpsilon,
    #[error("Petersson norm vanishes")]
    ZeroNorm,
    #[error("no nonzero element of the Eisenstein ideal in the given span")]
    EmptySpan,
    #[error("computation failed: {0}")]
    ComputationFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
