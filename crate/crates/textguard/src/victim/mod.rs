//! The victim text classifier: training, prediction, and the black-box
//! query endpoint attacks interact with.

mod augment;
mod encoder;
mod endpoint;
mod linear;
mod model;

pub use augment::augment_with_transform;
pub use encoder::{CorpusStats, EncoderSpec, HashedNgramEncoder, TextEncoder};
pub use endpoint::{ClassifierEndpoint, OutputMode, Prediction, TextClassifierEndpoint};
pub use linear::{softmax, LinearSoftmax, SgdConfig, TrainReport};
pub use model::{train_classifier, ClassifierModel, TrainConfig};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum VictimError {
    #[error("cannot train on an empty dataset")]
    EmptyDataset,
    #[error("training requires at least 2 labels, found {0}")]
    SingleLabel(usize),
    #[error("cannot classify empty text")]
    EmptyText,
    #[error("unknown encoder id {0:?}")]
    UnknownEncoder(String),
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, VictimError>;
