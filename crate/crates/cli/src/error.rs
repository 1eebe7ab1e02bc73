use std::path::{Path, PathBuf};

use thiserror::Error;

/// Errors that stop a run before any task executes. All map to exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("symbol `{name}`: {source}")]
    Symbol {
        name: String,
        #[source]
        source: hardylab::Error,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn symbol(name: &str, source: hardylab::Error) -> Self {
        CliError::Symbol { name: name.into(), source }
    }

    pub const EXIT_CODE: u8 = 2;
}
