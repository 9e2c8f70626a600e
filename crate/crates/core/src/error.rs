use thiserror::Error;

/// Errors raised by the geometric oracles, learners and instance loaders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible body: {0}")]
    Infeasible(String),

    #[error("{what} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("protocol violation: {0}")]
    Protocol(&'static str),

    #[error("point is not on the lattice: {0}")]
    OffLattice(String),

    #[error("lifted point violates the staircase property in block {block}")]
    Staircase { block: usize },

    #[error("unsupported body for exact lifted optimization: {0} (use a hypercube or uniform-cost budget body)")]
    UnsupportedLiftedBody(String),

    #[error("caratheodory rounding reached gap {achieved:.4e} > {target:.4e} after {steps} steps")]
    CaratheodoryGap {
        achieved: f64,
        target: f64,
        steps: usize,
    },

    #[error("internal invariant failed: {0}")]
    Internal(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
