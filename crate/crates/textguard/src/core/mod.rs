//! Canonical data model, dataset and record I/O, shared tokenization, and
//! seeded randomness.

mod dataset_io;
mod records;
mod rng;
mod tokenize;
mod types;

pub use dataset_io::{load_dataset, DatasetFormat};
pub use records::{
    read_records, recompute_metrics, write_records, ExperimentRecord, MetricsSummary,
    RECORD_VERSION,
};
pub use rng::RngStream;
pub use tokenize::{detokenize, tokenize, word_positions};
pub use types::{Dataset, ScoreVector, Split, TextExample};

use thiserror::Error;

/// Errors shared across the toolkit.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("unknown label {label:?} at line {line} (declared label set: {label_set:?})")]
    UnknownLabel {
        line: usize,
        label: String,
        label_set: Vec<String>,
    },
    #[error("duplicate example id {0:?}")]
    DuplicateId(String),
    #[error("record version mismatch: file has {found}, expected {expected}")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("record file has no version header")]
    MissingHeader,
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
    #[error("empty text is not a valid example")]
    EmptyText,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
