use std::path::PathBuf;

use thiserror::Error;

/// Failures of a `probe` invocation, each tied to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(qprobe::Error),

    #[error("acceptance check failed: {0}")]
    Acceptance(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Acceptance(_) => 4,
            CliError::Io { .. } => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<qprobe::Error> for CliError {
    fn from(e: qprobe::Error) -> Self {
        use qprobe::Error as E;
        match e {
            E::InvalidParameter { .. }
            | E::MissingParameter(_)
            | E::Diluteness { .. }
            | E::ProbeDecoupled
            | E::DimensionExceeded { .. } => CliError::Config(e.to_string()),
            E::Domain(_)
            | E::QuadratureLimit { .. }
            | E::PlateauNotReached { .. }
            | E::StepUnderflow(_)
            | E::NotConverged { .. } => CliError::Numerical(e),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
