use std::path::PathBuf;

/// Unified error type for the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not strongly convex: mu = {mu} (every component must be strongly convex)")]
    NotStronglyConvex { mu: f64 },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("iterate diverged at step {step}")]
    Divergence { step: u64 },

    #[error("reference solve did not converge within {iters} iterations (last gradient norm {grad_norm:.3e})")]
    NoConvergence { grad_norm: f64, iters: u64 },

    #[error("every stepsize in the grid diverged")]
    AllDivergent,

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
