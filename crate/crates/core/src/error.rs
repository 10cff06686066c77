use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed incidence-matrix text or matrix input.
    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    /// A database record failed to parse.
    #[error("record {record} ({label}): {source}")]
    Record {
        record: usize,
        label: String,
        #[source]
        source: Box<Error>,
    },

    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    /// The branch-and-bound search visited more partial subsets than allowed.
    #[error("work budget of {budget} partial subsets exceeded")]
    BudgetExceeded { budget: u64 },

    /// Brute-force enumeration would exceed its subset cap.
    #[error("enumeration of {subsets} subsets exceeds cap {cap}")]
    EnumerationCap { subsets: String, cap: u64 },

    #[error("structure is not a regular FR code: {0}")]
    NotRegular(#[from] crate::incidence::NotRegular),

    #[error("failing node {node} would leave packet {packet} with no live replica")]
    ToleranceExceeded { node: usize, packet: usize },

    #[error("packet {packet} has no live replica; node {node} cannot be repaired")]
    Unrecoverable { node: usize, packet: usize },

    #[error("node {0} is not in the expected state: {1}")]
    NodeState(usize, &'static str),

    /// Contradicts the MDS invariant; should never happen for a valid generator.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn format(line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            line,
            message: message.into(),
        }
    }
}
