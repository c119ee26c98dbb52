use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed line in one of the text formats.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: duplicate id `{id}`")]
    Duplicate { line: usize, id: String },

    /// Record parsed but breaks a record-level invariant.
    #[error("line {line}: {message}")]
    Validation { line: usize, message: String },

    #[error("{} scored id(s) have no metadata: {}", .ids.len(), preview(.ids))]
    MissingMetadata { ids: Vec<String> },

    #[error("{} key(s) do not match across inputs: {}", .keys.len(), preview(.keys))]
    KeyMismatch { keys: Vec<String> },

    #[error("empty class: {0}")]
    EmptyClass(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported audio: {0}")]
    UnsupportedAudio(String),

    #[error("truncated audio: header declares {declared} frames, file holds {found}")]
    TruncatedAudio { declared: u32, found: u32 },

    #[error("malformed audio: {0}")]
    Audio(String),

    #[error("{kind} cannot be written as {format}")]
    UnsupportedFormat { kind: &'static str, format: &'static str },

    #[error("solver did not converge after {iterations} iterations (gradient norm {grad_norm:.3e})")]
    NonConvergence { iterations: usize, grad_norm: f64 },

    #[error("no concurrent tandem operating point on the threshold grid")]
    NoConcurrentPoint,

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }

    pub(crate) fn validation(line: usize, message: impl Into<String>) -> Self {
        Error::Validation { line, message: message.into() }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into())
    }

    /// Line number for errors raised while reading a text format.
    pub fn line(&self) -> Option<usize> {
        match self {
            Error::Parse { line, .. } | Error::Duplicate { line, .. } | Error::Validation { line, .. } => Some(*line),
            _ => None,
        }
    }
}

fn preview(ids: &[String]) -> String {
    let mut out = ids.iter().take(10).cloned().collect::<Vec<_>>().join(", ");
    if ids.len() > 10 {
        out.push_str(", ...");
    }
    out
}
