use std::path::PathBuf;

use callroute_core::{SimError, TopologyError};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        CliError::Parse { line, message: message.into() }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
