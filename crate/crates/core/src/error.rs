use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid term {0:?}: empty after trimming")]
    InvalidTerm(String),

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: malformed header, expected \"<count> <dimension>\" ({reason})")]
    MalformedHeader {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{path}:{line}: expected {expected} components, found {found}")]
    DimensionMismatch {
        path: PathBuf,
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("{path}:{line}: malformed row ({reason})")]
    MalformedRow {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("invalid fixture parameters: {0}")]
    InvalidFixture(String),

    #[error("unknown model id {0:?}")]
    UnknownModel(String),

    #[error("duplicate model id {0:?}")]
    DuplicateModel(String),

    #[error("an ensemble needs at least one model")]
    EmptyEnsemble,

    #[error("invalid session parameters: {0}")]
    InvalidParams(String),

    #[error("term {0:?} is accepted; remove it from the accepted terms before rejecting it")]
    AcceptedConflict(String),

    #[error("term {0:?} is not accepted")]
    NotAccepted(String),

    #[error("unsupported snapshot format_version {0}")]
    UnsupportedVersion(u64),

    #[error("malformed snapshot: {0}")]
    MalformedSnapshot(String),
}
