use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::corpus::SentimentLabel;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad classes of failure, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// A file could not be opened or written.
    Io,
    /// Input data violates a precondition.
    Data,
    /// A numerical routine hit a degenerate case.
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: zero parseable records")]
    NoRecords { path: PathBuf },
    #[error("duplicate post id {0:?}")]
    DuplicateId(String),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("no {0} posts present")]
    MissingClass(SentimentLabel),
    #[error("post {0:?} has no label")]
    Unlabeled(String),
    #[error("test fraction {0} outside (0, 1)")]
    InvalidFraction(f64),
    #[error("need at least {needed} items, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("all documents are empty")]
    EmptyDocuments,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("training data contains a single class")]
    SingleClass,
    #[error("count vectors must be nonnegative")]
    NegativeCount,
    #[error("requested size {size} exceeds {available} available posts")]
    SizeTooLarge { size: usize, available: usize },
    #[error("vectorizer mismatch: model expects {expected}, got {found}")]
    VectorizerMismatch { expected: String, found: String },
    #[error("unsupported format version {0}")]
    FormatVersion(u32),
    #[error("sample is empty")]
    EmptySample,
    #[error("contingency table has an all-zero row or column")]
    ZeroMarginal,
    #[error("degenerate dimensions: {0}")]
    DegenerateDimensions(String),
    #[error("series has zero variance")]
    DegenerateVariance,
    #[error("distribution is empty")]
    EmptyDistribution,
    #[error("no timestamped posts")]
    NoTimestamps,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. } => ErrorKind::Io,
            Error::SingleClass
            | Error::ZeroMarginal
            | Error::DegenerateDimensions(_)
            | Error::DegenerateVariance => ErrorKind::Numeric,
            _ => ErrorKind::Data,
        }
    }
}
