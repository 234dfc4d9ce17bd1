//! Perceptual-difference metrics and the threshold machinery evaluated per
//! adversarial candidate.

mod hooks;
mod metrics;
mod semantic;
mod set;

pub use hooks::{
    grammar_error_increase, GrammarChecker, LexiconGrammarChecker, NgramPerplexity,
    PerplexityScorer,
};
pub use metrics::{cosine_similarity, jaccard, levenshtein, perturbation_rate};
pub use semantic::{HashedWordVecEncoder, PolarityAwareEncoder, PolarityLexicon, SemanticEncoder};
pub use set::{
    AnomalyScorer, ConstraintReport, ConstraintSet, MetricEntry, MetricKind, MetricStatus,
    DEFAULT_MAX_DEGREE_OF_ANOMALY, DEFAULT_MAX_GRAMMAR_INCREASE, DEFAULT_MAX_LEVENSHTEIN,
    DEFAULT_MAX_PERTURBATION_RATE, DEFAULT_MIN_SEMANTIC_SIMILARITY,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConstraintError {
    #[error("cosine similarity of a zero vector is undefined")]
    ZeroVector,
    #[error("vector dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("jaccard of two empty token sets is undefined")]
    BothEmpty,
    #[error("perturbation rate requires equal word counts, got {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("cannot score empty text")]
    EmptyText,
    #[error("anomaly constraint enabled without a detector")]
    MissingDetector,
}

pub type Result<T> = std::result::Result<T, ConstraintError>;
