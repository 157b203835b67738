use std::path::PathBuf;

/// Errors produced anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric positive definite (pivot {pivot} = {value:e})")]
    NotSpd { pivot: usize, value: f64 },

    #[error("linear solver failed: relative residual {residual:e}")]
    SolverFailure { residual: f64 },

    #[error("nonlinear solver failed at time step {step}: residual {residual:e} after {iterations} iterations")]
    NonlinearSolverFailure {
        step: usize,
        residual: f64,
        iterations: usize,
    },

    #[error("degenerate step at iteration {k}: (S, S) = 0")]
    DegenerateStep { k: usize },

    #[error("nonpositive curvature at iteration {k}: (S, Y) = {curvature:e}")]
    Nonconvexity { k: usize, curvature: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}
