use std::path::PathBuf;

use nibblepack_core::analysis::AnalysisError;
use nibblepack_core::graph::GraphError;
use nibblepack_core::nibble::NibbleError;
use nibblepack_core::pointproc::PointProcError;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const CONFIG: u8 = 1;
    pub const INFEASIBLE: u8 = 2;
    pub const RETRIES: u8 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed {what} in {}: {message}", path.display())]
    Format {
        what: &'static str,
        path: PathBuf,
        message: String,
    },
    #[error("output verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Nibble(#[from] NibbleError),
    #[error(transparent)]
    PointProc(#[from] PointProcError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 for configuration, input and other errors, 2 when the requested
    /// parameters cannot work (infeasible paper schedule or a violated
    /// hypothesis), 3 when a retry budget ran out.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Nibble(NibbleError::ScheduleInfeasible { .. } | NibbleError::PreconditionViolated(_))
            | CliError::Analysis(AnalysisError::PreconditionViolated(_)) => exit::INFEASIBLE,
            CliError::Nibble(NibbleError::RetriesExhausted { .. })
            | CliError::Graph(GraphError::RetriesExhausted { .. })
            | CliError::PointProc(PointProcError::Graph(GraphError::RetriesExhausted { .. }))
            | CliError::Analysis(AnalysisError::RetriesExhausted { .. }) => exit::RETRIES,
            _ => exit::CONFIG,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
