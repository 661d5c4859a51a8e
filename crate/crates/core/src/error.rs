use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid process: {0}")]
    InvalidProcess(String),

    #[error("state space too large: {states} states exceeds budget of {budget}; use the Monte Carlo path instead")]
    StateSpaceTooLarge { states: u128, budget: usize },

    #[error("mixing time infinite: generator is reducible")]
    Reducible,

    #[error("spectral gap undefined in this artifact: generator is not reversible")]
    NotReversible,

    #[error("decomposition valid for uniform laws only")]
    NonUniformLaw,

    #[error("property specific to graphs: {0}")]
    NotAGraph(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("window [{start}, {end}] outside horizon {horizon}")]
    WindowOutsideHorizon { start: f64, end: f64, horizon: f64 },

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("serialization: {0}")]
    Serde(String),

    #[error("internal: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
