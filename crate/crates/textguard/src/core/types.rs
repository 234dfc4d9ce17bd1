//! Domain value types: examples, datasets, score vectors.

use super::{CoreError, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Train/test split tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Test,
}

/// One labeled input. `text` is the attackable field; `premise`, when
/// present (inference pairs), is immutable context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextExample {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub premise: Option<String>,
    pub text: String,
    pub gold_label: String,
}

impl TextExample {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            premise: None,
            text: text.into(),
            gold_label: label.into(),
        }
    }

    pub fn with_premise(mut self, premise: impl Into<String>) -> Self {
        self.premise = Some(premise.into());
        self
    }
}

/// A named split of labeled examples with an ordered label set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub split: Split,
    pub label_set: Vec<String>,
    pub examples: Vec<TextExample>,
}

impl Dataset {
    /// Build a dataset, enforcing the invariants: unique ids, non-empty
    /// texts, every label in the label set.
    pub fn new(
        name: impl Into<String>,
        split: Split,
        label_set: Vec<String>,
        examples: Vec<TextExample>,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for ex in &examples {
            if !seen.insert(ex.id.clone()) {
                return Err(CoreError::DuplicateId(ex.id.clone()));
            }
            if ex.text.trim().is_empty() {
                return Err(CoreError::EmptyText);
            }
            if !label_set.contains(&ex.gold_label) {
                return Err(CoreError::Invalid(format!(
                    "label {:?} of example {:?} not in label set {:?}",
                    ex.gold_label, ex.id, label_set
                )));
            }
        }
        Ok(Self {
            name: name.into(),
            split,
            label_set,
            examples,
        })
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.label_set.iter().position(|l| l == label)
    }

    /// A copy containing only the first `n` examples.
    pub fn take(&self, n: usize) -> Dataset {
        Dataset {
            name: self.name.clone(),
            split: self.split,
            label_set: self.label_set.clone(),
            examples: self.examples.iter().take(n).cloned().collect(),
        }
    }
}

/// Per-label probabilities in label-set order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreVector(Vec<f64>);

impl ScoreVector {
    const SUM_TOLERANCE: f64 = 1e-6;

    /// Wrap raw probabilities, checking they form a distribution.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(CoreError::Invalid("empty score vector".into()));
        }
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(CoreError::Invalid(format!(
                "score out of [0,1]: {probs:?}"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(CoreError::Invalid(format!(
                "scores sum to {sum}, expected 1"
            )));
        }
        Ok(Self(probs))
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of the highest-scoring label; earlier index wins ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, p) in self.0.iter().enumerate().skip(1) {
            if *p > self.0[best] {
                best = i;
            }
        }
        best
    }

    /// Probability of the label at `index`.
    pub fn prob(&self, index: usize) -> f64 {
        self.0[index]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_rejects_duplicate_ids() {
        let exs = vec![
            TextExample::new("a", "good film", "pos"),
            TextExample::new("a", "bad film", "neg"),
        ];
        let err = Dataset::new("d", Split::Train, vec!["pos".into(), "neg".into()], exs);
        assert!(matches!(err, Err(CoreError::DuplicateId(_))));
    }

    #[test]
    fn dataset_rejects_unknown_label() {
        let exs = vec![TextExample::new("a", "good film", "meh")];
        let err = Dataset::new("d", Split::Train, vec!["pos".into(), "neg".into()], exs);
        assert!(err.is_err());
    }

    #[test]
    fn dataset_rejects_blank_text() {
        let exs = vec![TextExample::new("a", "   ", "pos")];
        let err = Dataset::new("d", Split::Train, vec!["pos".into()], exs);
        assert!(matches!(err, Err(CoreError::EmptyText)));
    }

    #[test]
    fn score_vector_must_sum_to_one() {
        assert!(ScoreVector::new(vec![0.6, 0.3]).is_err());
        assert!(ScoreVector::new(vec![0.7, 0.3]).is_ok());
    }

    #[test]
    fn argmax_breaks_ties_toward_earlier_label() {
        let sv = ScoreVector::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(sv.argmax(), 0);
    }
}
