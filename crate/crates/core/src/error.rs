use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("tensor of order {order} over dimension {dim} exceeds the entry cap {cap}")]
    TensorTooLarge { order: usize, dim: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimMismatch { expected: usize, actual: usize },

    #[error("order-0 tensor cannot be flattened")]
    FlattenScalar,

    #[error("factorial of {0} exceeds the supported range")]
    FactorialRange(usize),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("empty index set")]
    EmptySet,

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("filter exhausted after {removals} removals with orders {violating:?} still over threshold")]
    Exhausted { removals: usize, violating: Vec<usize> },

    #[error("cover of {size} points exceeds the cap {cap}")]
    CoverTooLarge { size: usize, cap: usize },

    #[error("infeasible budget {budget} for {n} weights")]
    InfeasibleBudget { budget: f64, n: usize },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("io: {0}")]
    Io(String),

    #[error("format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
