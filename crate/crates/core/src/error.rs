use std::path::PathBuf;

use thiserror::Error;

use crate::inversion::ReconstructionTrace;
use crate::pde::LinearSolveReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {left} vs {right} nodes per side")]
    GridMismatch { left: usize, right: usize },

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("assembly failed: {0}")]
    Assembly(String),

    #[error("linear solve failed: {message} (relative residual {:.3e}, {} iterations)", report.relative_residual, report.iterations)]
    LinearSolve {
        message: String,
        report: LinearSolveReport,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite discrepancy at iteration {iteration}")]
    NonFinite {
        iteration: usize,
        trace: Box<ReconstructionTrace>,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True when the failure is numerical rather than a usage mistake.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Assembly(_) | Error::LinearSolve { .. } | Error::NonFinite { .. }
        )
    }
}
