use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter is outside its mathematical domain.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// The requested formula does not cover this parameter regime.
    #[error("uncovered regime: {0}")]
    UncoveredRegime(String),

    /// An adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature failure: achieved {achieved:e}, requested {requested:e}")]
    QuadratureFailure { achieved: f64, requested: f64 },

    /// An iteration (bisection bracket, Newton polish, phase unwrap, ODE step
    /// control) failed to converge.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// Cholesky factorization failed even after diagonal jitter escalation.
    #[error("factorization failure: {0}")]
    Factorization(String),

    /// A quantity left the range in which double precision results are
    /// meaningful.
    #[error("overflow guard: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
