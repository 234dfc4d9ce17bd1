//! Scripted endpoints for oracle tests: victims whose behavior is known in
//! closed form, so attack soundness can be checked analytically.

use crate::core::{tokenize, ScoreVector};
use crate::victim::{OutputMode, Prediction, TextClassifierEndpoint};
use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

/// Binary victim driven entirely by trigger-token presence: the positive
/// score grows with the number of trigger tokens in the text and collapses
/// to 0.2 when none remain. Label set is `["pos", "neg"]`.
pub struct KeywordVictim {
    triggers: BTreeSet<String>,
    labels: Vec<String>,
    queries: AtomicU64,
}

impl KeywordVictim {
    pub fn new<I: IntoIterator<Item = &'static str>>(triggers: I) -> Self {
        Self {
            triggers: triggers.into_iter().map(|s| s.to_lowercase()).collect(),
            labels: vec!["pos".into(), "neg".into()],
            queries: AtomicU64::new(0),
        }
    }

    /// Closed-form positive probability for a text.
    pub fn pos_prob(&self, text: &str) -> f64 {
        let hits = tokenize(text)
            .iter()
            .filter(|t| self.triggers.contains(&t.to_lowercase()))
            .count();
        if hits == 0 {
            0.2
        } else {
            (0.6 + 0.1 * hits as f64).min(0.95)
        }
    }
}

impl TextClassifierEndpoint for KeywordVictim {
    fn label_set(&self) -> &[String] {
        &self.labels
    }

    fn query(&self, _premise: Option<&str>, text: &str) -> Prediction {
        self.queries.fetch_add(1, Ordering::SeqCst);
        let p = self.pos_prob(text);
        let scores = ScoreVector::new(vec![p, 1.0 - p]).expect("valid distribution");
        let label = self.labels[scores.argmax()].clone();
        Prediction { scores, label }
    }

    fn query_count(&self) -> u64 {
        self.queries.load(Ordering::SeqCst)
    }

    fn output_mode(&self) -> OutputMode {
        OutputMode::Score
    }
}

/// Victim that returns the same score vector for every input; no attack can
/// move it.
pub struct ConstantVictim {
    labels: Vec<String>,
    scores: Vec<f64>,
    queries: AtomicU64,
}

impl ConstantVictim {
    pub fn new(scores: Vec<f64>) -> Self {
        Self {
            labels: vec!["pos".into(), "neg".into()],
            scores,
            queries: AtomicU64::new(0),
        }
    }
}

impl TextClassifierEndpoint for ConstantVictim {
    fn label_set(&self) -> &[String] {
        &self.labels
    }

    fn query(&self, _premise: Option<&str>, _text: &str) -> Prediction {
        self.queries.fetch_add(1, Ordering::SeqCst);
        let scores = ScoreVector::new(self.scores.clone()).expect("valid distribution");
        let label = self.labels[scores.argmax()].clone();
        Prediction { scores, label }
    }

    fn query_count(&self) -> u64 {
        self.queries.load(Ordering::SeqCst)
    }

    fn output_mode(&self) -> OutputMode {
        OutputMode::Score
    }
}

/// Endpoint that replays a scripted sequence of positive-class
/// probabilities, cycling when exhausted.
pub struct SequenceEndpoint {
    labels: Vec<String>,
    sequence: Vec<f64>,
    cursor: Mutex<usize>,
    queries: AtomicU64,
}

impl SequenceEndpoint {
    pub fn new(sequence: Vec<f64>) -> Self {
        Self {
            labels: vec!["pos".into(), "neg".into()],
            sequence,
            cursor: Mutex::new(0),
            queries: AtomicU64::new(0),
        }
    }
}

impl TextClassifierEndpoint for SequenceEndpoint {
    fn label_set(&self) -> &[String] {
        &self.labels
    }

    fn query(&self, _premise: Option<&str>, _text: &str) -> Prediction {
        self.queries.fetch_add(1, Ordering::SeqCst);
        let mut cursor = self.cursor.lock().unwrap();
        let p = self.sequence[*cursor % self.sequence.len()];
        *cursor += 1;
        let scores = ScoreVector::new(vec![p, 1.0 - p]).expect("valid distribution");
        let label = self.labels[scores.argmax()].clone();
        Prediction { scores, label }
    }

    fn query_count(&self) -> u64 {
        self.queries.load(Ordering::SeqCst)
    }

    fn output_mode(&self) -> OutputMode {
        OutputMode::Score
    }
}
