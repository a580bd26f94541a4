use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    /// Malformed input file or value. `line` is 1-based when known.
    #[error("{}", format_location(.context, *.line, .message))]
    Format {
        context: String,
        line: Option<usize>,
        message: String,
    },

    /// A value or argument violates a type invariant.
    #[error("{0}")]
    Invalid(String),
}

fn format_location(context: &str, line: Option<usize>, message: &str) -> String {
    match (context.is_empty(), line) {
        (true, None) => message.to_string(),
        (true, Some(l)) => format!("{message} at line {l}"),
        (false, None) => format!("{context}: {message}"),
        (false, Some(l)) => format!("{context}: {message} at line {l}"),
    }
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(context: impl Into<String>, line: Option<usize>, message: impl Into<String>) -> Self {
        Error::Format {
            context: context.into(),
            line,
            message: message.into(),
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }

    /// True for failures of the underlying filesystem rather than of the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
