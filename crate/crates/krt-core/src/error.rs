use thiserror::Error;

/// Errors produced by the solver pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Two quantities that must have matching dimensions do not.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// An argument violates a precondition.
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),

    /// An iterative method failed to reach its tolerance.
    #[error("no convergence after {iterations} iterations (best estimate {best:e})")]
    Convergence { iterations: usize, best: f64 },

    /// The Krylov subspace became invariant before the requested dimension.
    #[error("Arnoldi breakdown at step {step} before the requested subspace dimension")]
    Breakdown { step: usize },

    /// The discrepancy equation has no positive root for the given bounds.
    #[error("discrepancy equation infeasible: bound {rhs:e} is not below the projected data norm {limit:e}")]
    Infeasible { rhs: f64, limit: f64 },

    /// The problem degenerated to a case the method cannot handle.
    #[error("degenerate problem: {0}")]
    Degenerate(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
