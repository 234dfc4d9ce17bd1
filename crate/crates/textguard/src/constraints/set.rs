//! Threshold bundles and the per-candidate check.
//!
//! Each attack family enables a different metric profile: character attacks
//! bound edit distance, word attacks bound semantic similarity, perturbation
//! rate and grammar, sentence attacks bound semantic similarity only. The
//! anomaly constraint can be layered onto any profile.

use super::{
    cosine_similarity, grammar_error_increase, levenshtein, perturbation_rate, ConstraintError,
    GrammarChecker, Result, SemanticEncoder,
};
use crate::core::TextExample;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Anything that can score how anomalous a text looks, in [0, 1].
/// Implemented by the trained anomaly detector and by scripted stand-ins in
/// tests.
pub trait AnomalyScorer: Send + Sync {
    fn degree(&self, premise: Option<&str>, text: &str) -> f64;
}

/// Default thresholds for the classic constraints.
pub const DEFAULT_MIN_SEMANTIC_SIMILARITY: f64 = 0.40;
pub const DEFAULT_MAX_PERTURBATION_RATE: f64 = 0.20;
pub const DEFAULT_MAX_GRAMMAR_INCREASE: i64 = 0;
pub const DEFAULT_MAX_LEVENSHTEIN: usize = 30;
/// Degree-of-anomaly ceiling when the anomaly constraint is enabled.
pub const DEFAULT_MAX_DEGREE_OF_ANOMALY: f64 = 0.5;

/// The enabled metrics, their thresholds, and the hooks that measure them.
#[derive(Clone)]
pub struct ConstraintSet {
    pub min_semantic_similarity: Option<f64>,
    pub max_perturbation_rate: Option<f64>,
    pub max_grammar_error_increase: Option<i64>,
    pub max_levenshtein: Option<usize>,
    pub max_degree_of_anomaly: Option<f64>,
    semantic_encoder: Option<Arc<dyn SemanticEncoder>>,
    grammar_checker: Option<Arc<dyn GrammarChecker>>,
    detector: Option<Arc<dyn AnomalyScorer>>,
}

impl fmt::Debug for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConstraintSet")
            .field("min_semantic_similarity", &self.min_semantic_similarity)
            .field("max_perturbation_rate", &self.max_perturbation_rate)
            .field("max_grammar_error_increase", &self.max_grammar_error_increase)
            .field("max_levenshtein", &self.max_levenshtein)
            .field("max_degree_of_anomaly", &self.max_degree_of_anomaly)
            .field("has_semantic_encoder", &self.semantic_encoder.is_some())
            .field("has_grammar_checker", &self.grammar_checker.is_some())
            .field("has_detector", &self.detector.is_some())
            .finish()
    }
}

impl ConstraintSet {
    /// No constraints enabled.
    pub fn unconstrained() -> Self {
        Self {
            min_semantic_similarity: None,
            max_perturbation_rate: None,
            max_grammar_error_increase: None,
            max_levenshtein: None,
            max_degree_of_anomaly: None,
            semantic_encoder: None,
            grammar_checker: None,
            detector: None,
        }
    }

    /// Character-attack profile: edit-distance budget only.
    pub fn char_profile() -> Self {
        Self {
            max_levenshtein: Some(DEFAULT_MAX_LEVENSHTEIN),
            ..Self::unconstrained()
        }
    }

    /// Word-attack profile: semantic similarity, perturbation rate, grammar.
    pub fn word_profile(encoder: Arc<dyn SemanticEncoder>) -> Self {
        Self {
            min_semantic_similarity: Some(DEFAULT_MIN_SEMANTIC_SIMILARITY),
            max_perturbation_rate: Some(DEFAULT_MAX_PERTURBATION_RATE),
            max_grammar_error_increase: Some(DEFAULT_MAX_GRAMMAR_INCREASE),
            semantic_encoder: Some(encoder),
            ..Self::unconstrained()
        }
    }

    /// Sentence-attack profile: semantic similarity floor only.
    pub fn sentence_profile(encoder: Arc<dyn SemanticEncoder>) -> Self {
        Self {
            min_semantic_similarity: Some(DEFAULT_MIN_SEMANTIC_SIMILARITY),
            semantic_encoder: Some(encoder),
            ..Self::unconstrained()
        }
    }

    /// Attach a grammar checker so the grammar constraint is measured
    /// instead of skipped.
    pub fn with_grammar_checker(mut self, checker: Arc<dyn GrammarChecker>) -> Self {
        self.grammar_checker = Some(checker);
        self
    }

    /// Layer the anomaly constraint on top of this profile.
    pub fn with_anomaly_constraint(mut self, detector: Arc<dyn AnomalyScorer>, max_degree: f64) -> Self {
        self.detector = Some(detector);
        self.max_degree_of_anomaly = Some(max_degree);
        self
    }

    pub fn semantic_encoder(&self) -> Option<&Arc<dyn SemanticEncoder>> {
        self.semantic_encoder.as_ref()
    }

    pub fn anomaly_scorer(&self) -> Option<&Arc<dyn AnomalyScorer>> {
        self.detector.as_ref()
    }

    pub fn anomaly_enabled(&self) -> bool {
        self.max_degree_of_anomaly.is_some() && self.detector.is_some()
    }

    /// Check structural invariants: finite thresholds, anomaly constraint
    /// only with a detector.
    pub fn validate(&self) -> Result<()> {
        if self.max_degree_of_anomaly.is_some() && self.detector.is_none() {
            return Err(ConstraintError::MissingDetector);
        }
        for t in [
            self.min_semantic_similarity,
            self.max_perturbation_rate,
            self.max_degree_of_anomaly,
        ]
        .into_iter()
        .flatten()
        {
            if !t.is_finite() {
                return Err(ConstraintError::EmptyText);
            }
        }
        Ok(())
    }

    /// Evaluate every enabled metric on `(original, candidate)` and fold the
    /// verdicts. Hook absence yields a skipped entry, not a failure.
    pub fn check(&self, original: &TextExample, candidate: &str) -> ConstraintReport {
        self.check_inner(original, candidate, true)
    }

    /// Like [`check`](Self::check) but without the anomaly metric. Attack
    /// loops filter intermediate candidates with this; the anomaly
    /// constraint binds the final adversarial text only (strict mode aside).
    pub fn check_classic(&self, original: &TextExample, candidate: &str) -> ConstraintReport {
        self.check_inner(original, candidate, false)
    }

    fn check_inner(
        &self,
        original: &TextExample,
        candidate: &str,
        include_anomaly: bool,
    ) -> ConstraintReport {
        let mut entries = Vec::new();

        if let Some(min_sim) = self.min_semantic_similarity {
            let entry = match &self.semantic_encoder {
                Some(encoder) => {
                    let a = encoder.embed(&original.text);
                    let b = encoder.embed(candidate);
                    match cosine_similarity(&a, &b) {
                        Ok(sim) => MetricEntry::measured(
                            MetricKind::SemanticSimilarity,
                            sim,
                            min_sim,
                            sim > min_sim,
                        ),
                        Err(_) => MetricEntry::skipped(MetricKind::SemanticSimilarity, min_sim),
                    }
                }
                None => MetricEntry::skipped(MetricKind::SemanticSimilarity, min_sim),
            };
            entries.push(entry);
        }

        if let Some(max_rate) = self.max_perturbation_rate {
            let entry = match perturbation_rate(&original.text, candidate) {
                Ok(rate) => MetricEntry::measured(
                    MetricKind::PerturbationRate,
                    rate,
                    max_rate,
                    rate < max_rate,
                ),
                // a length change is a real violation of the substitution
                // contract, not a hook failure
                Err(_) => MetricEntry::failed_unmeasured(MetricKind::PerturbationRate, max_rate),
            };
            entries.push(entry);
        }

        if let Some(max_increase) = self.max_grammar_error_increase {
            let entry = match &self.grammar_checker {
                Some(checker) => {
                    let inc = grammar_error_increase(checker.as_ref(), &original.text, candidate);
                    MetricEntry::measured(
                        MetricKind::GrammarErrorIncrease,
                        inc as f64,
                        max_increase as f64,
                        inc <= max_increase,
                    )
                }
                None => MetricEntry::skipped(MetricKind::GrammarErrorIncrease, max_increase as f64),
            };
            entries.push(entry);
        }

        if let Some(max_lev) = self.max_levenshtein {
            let d = levenshtein(&original.text, candidate);
            entries.push(MetricEntry::measured(
                MetricKind::Levenshtein,
                d as f64,
                max_lev as f64,
                d <= max_lev,
            ));
        }

        if include_anomaly {
            if let Some(max_degree) = self.max_degree_of_anomaly {
                let entry = match &self.detector {
                    Some(detector) => {
                        let degree = detector.degree(original.premise.as_deref(), candidate);
                        MetricEntry::measured(
                            MetricKind::DegreeOfAnomaly,
                            degree,
                            max_degree,
                            degree < max_degree,
                        )
                    }
                    None => MetricEntry::skipped(MetricKind::DegreeOfAnomaly, max_degree),
                };
                entries.push(entry);
            }
        }

        let pass = entries
            .iter()
            .all(|e| e.status != MetricStatus::Failed);
        ConstraintReport { entries, pass }
    }
}

/// Which metric an entry reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    SemanticSimilarity,
    PerturbationRate,
    GrammarErrorIncrease,
    Levenshtein,
    DegreeOfAnomaly,
}

/// Verdict for one metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricStatus {
    Passed,
    Failed,
    /// Hook unavailable; the metric did not participate in the verdict.
    Skipped,
}

/// One measured (or skipped) metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricEntry {
    pub metric: MetricKind,
    pub value: Option<f64>,
    pub threshold: f64,
    pub status: MetricStatus,
}

impl MetricEntry {
    fn measured(metric: MetricKind, value: f64, threshold: f64, passed: bool) -> Self {
        Self {
            metric,
            value: Some(value),
            threshold,
            status: if passed {
                MetricStatus::Passed
            } else {
                MetricStatus::Failed
            },
        }
    }

    fn skipped(metric: MetricKind, threshold: f64) -> Self {
        Self {
            metric,
            value: None,
            threshold,
            status: MetricStatus::Skipped,
        }
    }

    fn failed_unmeasured(metric: MetricKind, threshold: f64) -> Self {
        Self {
            metric,
            value: None,
            threshold,
            status: MetricStatus::Failed,
        }
    }
}

/// All enabled metrics with their verdicts; `pass` is their conjunction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub entries: Vec<MetricEntry>,
    pub pass: bool,
}

impl ConstraintReport {
    pub fn entry(&self, metric: MetricKind) -> Option<&MetricEntry> {
        self.entries.iter().find(|e| e.metric == metric)
    }
}
