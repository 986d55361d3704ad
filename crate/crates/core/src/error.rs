use thiserror::Error;

/// Errors raised by the numerical kernel and the experiments built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("eigensolver did not converge for a {0}x{0} matrix")]
    ConvergenceFailure(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("inverse temperature must be positive and finite (got {0})")]
    NonpositiveBeta(f64),

    #[error("invalid density operator: {0}")]
    InvalidState(String),

    #[error("support violation: reference state has a null eigenspace carrying weight {0:e}")]
    SupportViolation(f64),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("need at least 3 subsystems, got {0}")]
    TooFewFactors(usize),

    #[error("matrix is not unitary (max deviation of U^dag U from I is {0:e})")]
    NotUnitary(f64),

    #[error("joint states {u:?} and {v:?} are not degenerate (energy gap {gap:e})")]
    NotDegenerate {
        u: (usize, usize),
        v: (usize, usize),
        gap: f64,
    },

    #[error("rotation planes overlap on joint index {0}")]
    OverlappingPlanes(usize),

    #[error("cycle did not converge after {cycles} cycles (residual {residual:e})")]
    NoConvergence { cycles: usize, residual: f64 },

    #[error("stroke list does not form a cycle: {0}")]
    BadCycle(String),
}

pub type Result<T> = std::result::Result<T, Error>;
