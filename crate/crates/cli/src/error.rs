//! Command errors and their exit codes: 1 for user errors, 2 for
//! environment or I/O failures.

use livebib::corpus::{CorpusError, EvalError};
use livebib::curation::CurationError;
use livebib::library::LibraryError;
use livebib::query::ParseError;
use livebib::remote::RemoteError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    User(String),
    #[error("{0}")]
    Env(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::User(_) => 1,
            CliError::Env(_) => 2,
        }
    }

    pub fn user(msg: impl Into<String>) -> Self {
        CliError::User(msg.into())
    }

    pub fn env(msg: impl Into<String>) -> Self {
        CliError::Env(msg.into())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Env(e.to_string())
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::User(format!("query: {e}"))
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::User(e.to_string())
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::Io(_) => CliError::Env(e.to_string()),
            other => CliError::User(format!("corpus: {other}")),
        }
    }
}

impl From<LibraryError> for CliError {
    fn from(e: LibraryError) -> Self {
        match e {
            LibraryError::Io(_) | LibraryError::CorruptSnapshot(_) => {
                CliError::Env(format!("catalog: {e}"))
            }
            other => CliError::User(other.to_string()),
        }
    }
}

impl From<CurationError> for CliError {
    fn from(e: CurationError) -> Self {
        match e {
            CurationError::Io(_) | CurationError::CorruptLog { .. } => CliError::Env(e.to_string()),
            CurationError::Library(inner) => inner.into(),
            other => CliError::User(other.to_string()),
        }
    }
}

impl From<RemoteError> for CliError {
    fn from(e: RemoteError) -> Self {
        match e {
            RemoteError::InvalidConfig(_) | RemoteError::UnknownRemoteLibrary(_) => {
                CliError::User(e.to_string())
            }
            other => CliError::Env(other.to_string()),
        }
    }
}
