use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Every likelihood weight was zero: the observation is incompatible with all prior samples.
    #[error("degenerate weights: likelihood is zero for every prior sample")]
    DegenerateWeights,

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("iteration did not converge after {iterations} iterations (last iterate {last:?})")]
    NotConverged { iterations: usize, last: Vec<f64> },

    #[error("training diverged at epoch {epoch}: loss {loss} exceeds 10x initial loss {initial}")]
    Diverged {
        epoch: usize,
        loss: f64,
        initial: f64,
    },

    #[error("optimizer failed on all {restarts} restarts: {reason}")]
    OptimizerFailed { restarts: usize, reason: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn check_len(context: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            actual,
        });
    }
    Ok(())
}
