use std::io;
use std::path::PathBuf;

use sigmadb::lang::SyntaxError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    /// A statement of a script failed. `index` counts statements from 1.
    #[error("statement {index} (line {line}): {source}")]
    Statement {
        index: usize,
        line: usize,
        #[source]
        source: sigmadb::Error,
    },
    #[error("cannot listen on {addr}: {source}")]
    Bind {
        addr: std::net::SocketAddr,
        #[source]
        source: io::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl ServiceError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        ServiceError::Io {
            path: path.into(),
            source,
        }
    }
}
