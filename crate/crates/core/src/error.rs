use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("enumeration cap exceeded: n = {n} > {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no exact representation: {0}")]
    NotExact(String),

    #[error("division by zero in {0}")]
    DivisionByZero(String),

    #[error("degenerate thinning at level {0}: q0(n':0) = 1")]
    DegenerateThinning(usize),

    #[error("level {n} exceeds available level {max}")]
    LevelOutOfRange { n: usize, max: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("stick-breaking exceeded {0} breaks")]
    BreakCap(usize),

    #[error("infinite moment: {0}")]
    InfiniteMoment(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("not a probability vector: {0}")]
    NotProbability(String),

    #[error("rows are not sampling consistent at level {0}")]
    Inconsistent(usize),

    #[error("missing moment p({0})")]
    MissingMoment(usize),

    #[error("undefined: {0}")]
    Undefined(String),
}

pub type Result<T> = std::result::Result<T, Error>;
