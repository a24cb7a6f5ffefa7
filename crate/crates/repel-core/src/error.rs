//! Error type shared across the crate.

use std::fmt;
use std::io;
use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug)]
pub enum Error {
    /// Underlying I/O failure, with the path that was being touched.
    Io { path: PathBuf, source: io::Error },
    /// A corpus or seed file line that cannot be parsed. `detail` names the
    /// offending field.
    MalformedLine {
        path: PathBuf,
        line: usize,
        detail: String,
    },
    /// Invalid configuration value.
    Config(String),
    /// A precondition of an operation does not hold (e.g. empty inputs).
    Invalid(String),
    /// A pipeline stage failed; wraps the stage name for diagnostics.
    Stage { stage: &'static str, source: Box<Error> },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn malformed(path: impl Into<PathBuf>, line: usize, detail: impl Into<String>) -> Self {
        Error::MalformedLine { path: path.into(), line, detail: detail.into() }
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage { stage, source: Box::new(self) }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Io { path, source } => write!(f, "{}: {}", path.display(), source),
            Error::MalformedLine { path, line, detail } => {
                write!(f, "{}:{}: {}", path.display(), line, detail)
            }
            Error::Config(msg) => write!(f, "invalid configuration: {}", msg),
            Error::Invalid(msg) => write!(f, "{}", msg),
            Error::Stage { stage, source } => write!(f, "stage `{}` failed: {}", stage, source),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            Error::Stage { source, .. } => Some(source),
            _ => None,
        }
    }
}
