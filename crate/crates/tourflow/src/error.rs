use thiserror::Error;

/// Errors shared by all analysis modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not found: {0}")]
    NotFound(String),

    /// Input data violated the schema; names the file and 1-based row.
    #[error("{path}:{row}: {msg}")]
    Parse {
        path: String,
        row: u64,
        msg: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Degree-preserving rewiring ran out of its attempt budget.
    #[error("rewiring did not reach the swap target within {attempts} attempts (seed {seed})")]
    RewireBudget { attempts: u64, seed: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn parse(path: impl Into<String>, row: u64, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            row,
            msg: msg.into(),
        }
    }
}
