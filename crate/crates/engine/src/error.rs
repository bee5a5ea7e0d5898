use thiserror::Error;

/// Errors surfaced by the simulation and estimator layers.
#[derive(Debug, Error)]
pub enum EngineError {
    /// The correlation matrix built from the three pairwise correlations has a
    /// non-positive pivot, i.e. the correlations are mutually inconsistent.
    #[error("correlation matrix is not positive-definite (pivot {pivot:.6e} at row {row})")]
    NonPositiveDefinite { row: usize, pivot: f64 },

    /// Conditional year-one volatility is zero, so the CLRM weight is undefined.
    #[error("conditional volatility over year one is zero; CLRM weight undefined")]
    DegenerateVolatility,

    /// The pathwise estimator requires a payoff that is continuous in the spot.
    #[error("pathwise estimator is not applicable to a {0} payoff")]
    UnsupportedPayoff(&'static str),

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("mortality table: {0}")]
    MortalityTable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, EngineError>;
