use thiserror::Error;

/// Errors surfaced by the library. Failures that are data (a lamination
/// violating sibling invariance, an unresolved classification) are reported
/// through return values, not through this type.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("chords cross: {0} and {1}")]
    CrossingLeaves(String, String),
    #[error("classes overlap at angle {0}")]
    OverlappingClasses(String),
    #[error("longest edges tie: {0} and {1}")]
    MajorTie(String, String),
    #[error("major arc {0} is shorter than 1/3")]
    MajorTooShort(String),
    #[error("pole: |1 - conj(a) z| = {0:e}")]
    Pole(f64),
    #[error("rational input {0}")]
    RationalInput(String),
    #[error("unresolved: {0}")]
    Unresolved(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn io(path: &std::path::Path, err: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.display().to_string(),
            msg: err.to_string(),
        }
    }

    /// Process exit code for the CLI: 1 for bad input, 2 for inconclusive runs.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Unresolved(_) => 2,
            _ => 1,
        }
    }
}
