use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("NaN key at index {index}")]
    NanKey { index: usize },

    /// The sample has no usable key spread; callers fall back to the
    /// decision tree model.
    #[error("degenerate sample: keys have no spread")]
    DegenerateSample,

    #[error("sample of {got} keys is too small, need at least {needed}")]
    SampleTooSmall { needed: usize, got: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("need {needed} splitter candidates, got {got}")]
    InsufficientCandidates { needed: usize, got: usize },

    #[error("bucket sizes do not match: {0}")]
    SizeMismatch(String),

    #[error("unknown dataset `{0}`")]
    UnknownDataset(String),

    #[error("invalid dataset parameters: {0}")]
    InvalidDataset(String),

    #[error("malformed key file {path}: {reason} at byte offset {offset}")]
    Format {
        path: PathBuf,
        offset: u64,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
