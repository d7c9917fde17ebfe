use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("marginal CDF is not strictly increasing at edge {index} (F={left} -> {right})")]
    NonMonotoneCdf { index: usize, left: f64, right: f64 },

    #[error("band width parameter must lie in [0, 1); got {0}")]
    DegenerateBand(f64),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("absolute continuity violated: cell {0} carries mass where the base measure has none")]
    AbsoluteContinuity(usize),

    #[error("density is not a product of its marginals (residual {0:.3e})")]
    NotProduct(f64),

    #[error("enumeration too large: {0}")]
    EnumerationTooLarge(String),

    #[error("empty conditioning event: {0}")]
    EmptyConditioningEvent(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("equilibrium unavailable: {0}")]
    EquilibriumUnavailable(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
