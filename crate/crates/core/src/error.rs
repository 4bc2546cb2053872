use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("empty stream")]
    EmptyStream,

    #[error("empty sequence")]
    EmptySequence,

    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("records are not sorted by timestamp")]
    Unsorted,

    #[error("invalid {what}: {message}")]
    Invalid { what: &'static str, message: String },

    #[error("dataset contains no {missing}-labeled records")]
    SingleClass { missing: &'static str },

    #[error("pattern set for '{characteristic}' has no {class} patterns")]
    MissingPatternClass {
        characteristic: String,
        class: &'static str,
    },

    #[error("characteristic mismatch: expected '{expected}', got '{got}'")]
    CharacteristicMismatch { expected: String, got: String },

    #[error("pattern '{id}' conflicts: identical sequence with opposite label already present")]
    PatternConflict { id: String },

    #[error("pattern id '{id}' already present with a different sequence")]
    PatternIdConflict { id: String },

    #[error("need at least {needed} records, got {got}")]
    TooFewRecords { needed: usize, got: usize },

    #[error("matrix is not symmetric (|m[{i}][{j}] - m[{j}][{i}]| = {delta})")]
    Asymmetric { i: usize, j: usize, delta: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("component count {p} out of range 1..={n}")]
    ComponentRange { p: usize, n: usize },

    #[error("system is not trained")]
    NotTrained,

    #[error("incompatible model format: {found}")]
    ModelVersion { found: String },

    #[error("unknown report ids: {}", .0.join(", "))]
    UnknownReports(Vec<String>),

    #[error("fragment size {got} below minimum {min}")]
    FragmentSize { min: usize, got: usize },

    #[error("missing fragment indices: {}", .0.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", "))]
    MissingFragments(Vec<u32>),

    #[error("fragment {index} failed integrity check: {what}")]
    FragmentIntegrity { index: u32, what: &'static str },

    #[error("conflicting duplicate for fragment {index}")]
    ConflictingFragment { index: u32 },

    #[error("update rejected: bad auth token from '{instance}'")]
    AuthRejected { instance: String },

    #[error("unknown instance '{id}'")]
    UnknownInstance { id: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(what: &'static str, message: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            message: message.into(),
        }
    }

    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    /// Attach a line number to a parse error produced on a bare line.
    pub(crate) fn at_line(self, line: usize) -> Self {
        match self {
            Error::Parse {
                column, message, ..
            } => Error::Parse {
                line,
                column,
                message,
            },
            other => other,
        }
    }
}
