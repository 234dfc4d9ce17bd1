//! The black-box query surface. Attacks see only this trait: a score (or
//! label) per query plus the endpoint's own query counter.

use super::model::ClassifierModel;
use crate::core::ScoreVector;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// What the endpoint exposes per query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputMode {
    Score,
    Label,
}

/// One query result: always carries the scores; `label` is the argmax in
/// label-set order.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub scores: ScoreVector,
    pub label: String,
}

/// Black-box classifier contract. Every `query` call increments the counter
/// by exactly one, whatever the caller does with the result.
pub trait TextClassifierEndpoint: Send + Sync {
    fn label_set(&self) -> &[String];
    fn query(&self, premise: Option<&str>, text: &str) -> Prediction;
    fn query_count(&self) -> u64;
    fn output_mode(&self) -> OutputMode;

    /// Victim queries consumed by one `query` call. Plain endpoints cost 1;
    /// averaging wrappers cost their fan-out.
    fn query_cost(&self) -> u64 {
        1
    }

    /// Label-mode view of a query; identical to `query(..).label`.
    fn query_label(&self, premise: Option<&str>, text: &str) -> String {
        self.query(premise, text).label
    }
}

/// Endpoint over a trained model with a linearizable query counter.
pub struct ClassifierEndpoint {
    model: Arc<ClassifierModel>,
    mode: OutputMode,
    queries: AtomicU64,
}

impl ClassifierEndpoint {
    pub fn new(model: Arc<ClassifierModel>, mode: OutputMode) -> Self {
        Self {
            model,
            mode,
            queries: AtomicU64::new(0),
        }
    }

    pub fn model(&self) -> &Arc<ClassifierModel> {
        &self.model
    }

    pub fn reset_queries(&self) {
        self.queries.store(0, Ordering::SeqCst);
    }
}

impl TextClassifierEndpoint for ClassifierEndpoint {
    fn label_set(&self) -> &[String] {
        &self.model.label_set
    }

    fn query(&self, premise: Option<&str>, text: &str) -> Prediction {
        self.queries.fetch_add(1, Ordering::SeqCst);
        let scores = self
            .model
            .predict(premise, text)
            .expect("non-empty text required by attack loop");
        let label = self.model.label_set[scores.argmax()].clone();
        Prediction { scores, label }
    }

    fn query_count(&self) -> u64 {
        self.queries.load(Ordering::SeqCst)
    }

    fn output_mode(&self) -> OutputMode {
        self.mode
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{Dataset, Split, TextExample};
    use crate::victim::{train_classifier, TrainConfig};

    fn endpoint() -> ClassifierEndpoint {
        let examples = vec![
            TextExample::new("1", "good film", "pos"),
            TextExample::new("2", "great film", "pos"),
            TextExample::new("3", "bad film", "neg"),
            TextExample::new("4", "poor film", "neg"),
        ];
        let ds = Dataset::new("t", Split::Train, vec!["pos".into(), "neg".into()], examples)
            .unwrap();
        let model = train_classifier(&ds, &TrainConfig::default()).unwrap();
        ClassifierEndpoint::new(Arc::new(model), OutputMode::Score)
    }

    #[test]
    fn repeated_queries_are_identical_and_counted() {
        let ep = endpoint();
        let a = ep.query(None, "good film");
        let b = ep.query(None, "good film");
        assert_eq!(a, b);
        assert_eq!(ep.query_count(), 2);
    }

    #[test]
    fn label_mode_is_argmax_of_scores() {
        let ep = endpoint();
        for text in ["good film", "bad film", "strange film"] {
            let pred = ep.query(None, text);
            let argmax = pred.scores.argmax();
            assert_eq!(pred.label, ep.label_set()[argmax]);
            assert_eq!(ep.query_label(None, text), pred.label);
        }
    }
}
