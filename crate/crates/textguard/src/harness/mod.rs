//! Experiment orchestration: configuration, the synthetic desk corpus,
//! lazily cached pipeline stages, analyses, and report emission.

mod analysis;
mod config;
mod pipeline;
mod report;
pub mod synth;

pub use analysis::{
    centroid_separation, degree_histogram, learning_curve, projection_scatter, AnalysisError,
    ScatterPoint,
};
pub use config::{
    AdaptiveConfig, AttackConfig, CorpusConfig, DefenseConfig, DetectorTrainConfig,
    ExperimentConfig, PoolConfig, VictimConfig,
};
pub use pipeline::{write_run, AdvPair, AdvPool, Pipeline, CACHE_ENV};
pub use report::{ReportBundle, Table};
pub use synth::{sentiment_corpus, DeskCorpus};
