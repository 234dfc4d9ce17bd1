//! Expectation-over-transformation feedback wrapper: the adaptive attack's
//! view of a randomized defense. Each logical query fans out into `k`
//! endpoint queries whose score vectors are averaged, so the attacker
//! optimizes the expected score instead of one noisy draw.

use crate::core::ScoreVector;
use crate::transforms::TransformDistribution;
use crate::victim::{OutputMode, Prediction, TextClassifierEndpoint};
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// Adaptive-attack parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdaptiveWrapConfig {
    /// Randomized copies averaged per candidate.
    pub k: usize,
}

impl Default for AdaptiveWrapConfig {
    fn default() -> Self {
        Self { k: 5 }
    }
}

/// Endpoint adapter implementing the k-sample average. When the inner
/// endpoint randomizes internally (a fresh-draw defended endpoint), sending
/// the same text `k` times yields `k` independently randomized copies; an
/// attacker-side distribution can be supplied instead for endpoints that do
/// not randomize.
pub struct EotEndpoint {
    inner: Arc<dyn TextClassifierEndpoint>,
    k: usize,
    attacker_transform: Option<TransformDistribution>,
    draw_counter: AtomicU64,
}

impl EotEndpoint {
    pub fn new(inner: Arc<dyn TextClassifierEndpoint>, config: AdaptiveWrapConfig) -> Self {
        assert!(config.k >= 1, "k must be at least 1");
        Self {
            inner,
            k: config.k,
            attacker_transform: None,
            draw_counter: AtomicU64::new(0),
        }
    }

    /// Transform candidates attacker-side before querying; for inner
    /// endpoints that do not randomize on their own.
    pub fn with_attacker_transform(mut self, distribution: TransformDistribution) -> Self {
        self.attacker_transform = Some(distribution);
        self
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

impl TextClassifierEndpoint for EotEndpoint {
    fn label_set(&self) -> &[String] {
        self.inner.label_set()
    }

    fn query(&self, premise: Option<&str>, text: &str) -> Prediction {
        let n_labels = self.inner.label_set().len();
        let mut sum = vec![0.0; n_labels];
        for _ in 0..self.k {
            let copy = match &self.attacker_transform {
                Some(dist) => {
                    let draw = self.draw_counter.fetch_add(1, Ordering::SeqCst);
                    dist.apply_draw(text, draw).unwrap_or_else(|_| text.to_string())
                }
                None => text.to_string(),
            };
            let pred = self.inner.query(premise, &copy);
            for (s, p) in sum.iter_mut().zip(pred.scores.probs()) {
                *s += p;
            }
        }
        let mean: Vec<f64> = sum.into_iter().map(|s| s / self.k as f64).collect();
        let scores = ScoreVector::new(mean).expect("mean of distributions is a distribution");
        let label = self.inner.label_set()[scores.argmax()].clone();
        Prediction { scores, label }
    }

    fn query_count(&self) -> u64 {
        self.inner.query_count()
    }

    fn output_mode(&self) -> OutputMode {
        self.inner.output_mode()
    }

    fn query_cost(&self) -> u64 {
        self.k as u64 * self.inner.query_cost()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::testing::{KeywordVictim, SequenceEndpoint};

    #[test]
    fn feedback_is_the_exact_mean_of_component_scores() {
        let scripted = Arc::new(SequenceEndpoint::new(vec![0.2, 0.4, 0.6, 0.8, 1.0]));
        let eot = EotEndpoint::new(scripted.clone(), AdaptiveWrapConfig { k: 5 });
        let pred = eot.query(None, "anything");
        let expected = (0.2 + 0.4 + 0.6 + 0.8 + 1.0) / 5.0;
        assert_eq!(pred.scores.prob(0), expected);
        assert!((pred.scores.prob(0) - 0.6).abs() < 1e-12);
        assert_eq!(scripted.query_count(), 5);
        assert_eq!(eot.query_cost(), 5);
    }

    #[test]
    fn k_one_without_transform_is_passthrough() {
        let inner = Arc::new(KeywordVictim::new(["good"]));
        let eot = EotEndpoint::new(inner.clone(), AdaptiveWrapConfig { k: 1 });
        let direct = inner.query(None, "a good day");
        let wrapped = eot.query(None, "a good day");
        assert_eq!(direct.scores, wrapped.scores);
        assert_eq!(direct.label, wrapped.label);
        assert_eq!(eot.query_cost(), 1);
    }

    #[test]
    fn default_k_is_five() {
        assert_eq!(AdaptiveWrapConfig::default().k, 5);
    }
}
