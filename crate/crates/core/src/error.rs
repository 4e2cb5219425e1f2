use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{what}: {size} exceeds the configured ceiling {ceiling}")]
    CeilingExceeded {
        what: &'static str,
        size: u128,
        ceiling: u128,
    },

    #[error("degree {degree} exceeds the supported maximum {max}")]
    DegreeTooLarge { degree: usize, max: usize },

    #[error("permutations of different degrees cannot be combined")]
    MixedDegrees,

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("invalid move: {0}")]
    InvalidMove(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("infeasible signature: {0}")]
    InfeasibleSignature(String),

    #[error("out of scope: {0}")]
    OutOfScope(String),

    #[error("singular prime {p} for {r} branch points; only the orbit oracle applies")]
    SingularPrime { p: u64, r: usize },

    #[error("pipeline inconsistency: {0}")]
    PipelineInconsistency(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn ceiling(what: &'static str, size: u128, ceiling: u128) -> Self {
        Error::CeilingExceeded { what, size, ceiling }
    }
}
