use std::path::PathBuf;

use geomed::GeomedError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}:{line}: {msg}", path.display())]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("{}: {msg}", path.display())]
    Input { path: PathBuf, msg: String },
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("solver failed: {0}")]
    Solver(#[from] GeomedError),
    #[error("self-test failed: {0}")]
    SelfTest(String),
}

impl CliError {
    /// 2 for anything wrong with the request or its files, 3 when a solver
    /// (or a self-test) fails on valid input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Input { .. } | CliError::Io { .. } | CliError::Argument(_) => 2,
            CliError::Solver(_) | CliError::SelfTest(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
