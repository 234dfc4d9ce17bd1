//! Black-box textual adversarial attacks, anomaly detection, and randomized
//! defenses for text classifiers.
//!
//! The toolkit covers the full attack/defense loop:
//!
//! - **Attacks**: greedy black-box attacks at character, word (synonym or
//!   fill-in suggestion), and sentence (paraphrase) granularity, driven only
//!   by victim queries.
//! - **Constraints**: perceptual-difference metrics (semantic similarity,
//!   perturbation rate, Levenshtein distance, grammar/fluency hooks) with
//!   per-family thresholds, plus an anomaly-score constraint.
//! - **Detector**: a binary anomaly classifier over sentence representations
//!   whose class-1 probability is the *degree of anomaly*, used both as a
//!   detection gate and as an attack constraint.
//! - **Transforms**: four seeded randomization processes (synonym
//!   substitution, adverb insertion, fill-in suggestion, back translation)
//!   preceded by spelling restoration.
//! - **Defense**: a detector-gated randomizing endpoint that drops in for the
//!   plain classifier endpoint, evaluated after and during attack, plus an
//!   expectation-over-transformation adaptive attack wrapper.
//! - **Harness**: seeded, config-addressed experiment orchestration with
//!   machine-readable reports.
//!
//! Everything is deterministic under a single root seed: randomness flows
//! through [`core::RngStream`] paths so reruns reproduce record files byte
//! for byte.

pub mod attacks;
pub mod constraints;
pub mod core;
pub mod defense;
pub mod detector;
pub mod harness;
pub mod transforms;
pub mod victim;
