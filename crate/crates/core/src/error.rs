use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A precondition on an input value was violated.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Numerical range exceeded (overflow in the matrix exponential).
    #[error("range error: {0}")]
    Range(String),

    /// Evolution produced a vanishing state; U is invertible so this signals a bug.
    #[error("degenerate evolution: state norm {0:e} below threshold")]
    DegenerateEvolution(f64),

    /// The regime has no oscillation period.
    #[error("not periodic: {0}")]
    NotPeriodic(String),

    #[error("no optical decomposition found (best residual {best_residual:.3e})")]
    NoDecomposition {
        best_residual: f64,
        best_angles: Vec<f64>,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}
