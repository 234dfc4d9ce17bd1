//! Classifier model: encoder + linear softmax head, with checkpoint I/O.

use super::encoder::{EncoderSpec, TextEncoder};
use super::linear::{LinearSoftmax, SgdConfig, TrainReport};
use super::{Result, VictimError};
use crate::core::{Dataset, RngStream, ScoreVector};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Arc;

/// Training hyperparameters for the victim classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub encoder: EncoderSpec,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
    /// Name of the transform used to augment the train set, when any.
    #[serde(default)]
    pub augment_transform: Option<String>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            encoder: EncoderSpec::hashed(512),
            epochs: 30,
            learning_rate: 0.5,
            batch_size: 16,
            seed: 0,
            augment_transform: None,
        }
    }
}

/// A trained classifier. Weights are immutable after training; inference is
/// deterministic (no dropout).
#[derive(Clone, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub label_set: Vec<String>,
    pub encoder_spec: EncoderSpec,
    pub train_config: TrainConfig,
    pub augmented: bool,
    pub head: LinearSoftmax,
    pub train_report: TrainReport,
    #[serde(skip)]
    encoder: Option<Arc<dyn TextEncoder>>,
}

impl ClassifierModel {
    /// The built encoder; rebuilt lazily after deserialization.
    pub fn encoder(&self) -> Arc<dyn TextEncoder> {
        match &self.encoder {
            Some(e) => Arc::clone(e),
            None => self.encoder_spec.build(),
        }
    }

    fn with_built_encoder(mut self) -> Self {
        self.encoder = Some(self.encoder_spec.build());
        self
    }

    /// Deterministic score vector for `(premise, text)`.
    pub fn predict(&self, premise: Option<&str>, text: &str) -> Result<ScoreVector> {
        if text.trim().is_empty() {
            return Err(VictimError::EmptyText);
        }
        let features = self.encoder().encode(premise, text);
        let probs = self.head.probabilities(&features);
        ScoreVector::new(probs).map_err(|e| VictimError::Checkpoint(e.to_string()))
    }

    pub fn predict_label(&self, premise: Option<&str>, text: &str) -> Result<String> {
        let scores = self.predict(premise, text)?;
        Ok(self.label_set[scores.argmax()].clone())
    }

    /// Accuracy over a dataset.
    pub fn accuracy(&self, dataset: &Dataset) -> f64 {
        if dataset.is_empty() {
            return 0.0;
        }
        let correct = dataset
            .examples
            .iter()
            .filter(|ex| {
                self.predict_label(ex.premise.as_deref(), &ex.text)
                    .map(|l| l == ex.gold_label)
                    .unwrap_or(false)
            })
            .count();
        correct as f64 / dataset.len() as f64
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let json = serde_json::to_string(self)?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json = std::fs::read_to_string(path)?;
        let model: ClassifierModel = serde_json::from_str(&json)?;
        Ok(model.with_built_encoder())
    }
}

/// Train a classifier on `train`. Seed-deterministic; rejects empty or
/// single-label datasets.
pub fn train_classifier(train: &Dataset, config: &TrainConfig) -> Result<ClassifierModel> {
    if train.is_empty() {
        return Err(VictimError::EmptyDataset);
    }
    let present: BTreeSet<&String> = train.examples.iter().map(|e| &e.gold_label).collect();
    if present.len() < 2 {
        return Err(VictimError::SingleLabel(present.len()));
    }

    let encoder = config.encoder.build();
    let features: Vec<Vec<f64>> = train
        .examples
        .iter()
        .map(|ex| encoder.encode(ex.premise.as_deref(), &ex.text))
        .collect();
    let labels: Vec<usize> = train
        .examples
        .iter()
        .map(|ex| train.label_index(&ex.gold_label).expect("label in set"))
        .collect();

    let mut head = LinearSoftmax::zeros(train.label_set.len(), encoder.dim());
    let sgd = SgdConfig {
        epochs: config.epochs,
        learning_rate: config.learning_rate,
        batch_size: config.batch_size,
        l2: 1e-4,
        dropout: 0.0,
    };
    let stream = RngStream::new(config.seed).derive_label("victim-train");
    let train_report = head.fit(&features, &labels, &sgd, &stream);

    Ok(ClassifierModel {
        label_set: train.label_set.clone(),
        encoder_spec: config.encoder.clone(),
        train_config: config.clone(),
        augmented: config.augment_transform.is_some(),
        head,
        train_report,
        encoder: Some(encoder),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{Split, TextExample};

    fn toy_dataset() -> Dataset {
        // linearly separable: label decided by one keyword
        let mut examples = Vec::new();
        let pos = ["good", "great", "fine", "solid"];
        let neg = ["bad", "poor", "dull", "weak"];
        for i in 0..8 {
            examples.push(TextExample::new(
                format!("p{i}"),
                format!("a {} film about life", pos[i % 4]),
                "pos",
            ));
            examples.push(TextExample::new(
                format!("n{i}"),
                format!("a {} film about life", neg[i % 4]),
                "neg",
            ));
        }
        Dataset::new(
            "toy",
            Split::Train,
            vec!["pos".into(), "neg".into()],
            examples,
        )
        .unwrap()
    }

    #[test]
    fn separable_toy_set_hits_full_train_accuracy() {
        let ds = toy_dataset();
        let model = train_classifier(&ds, &TrainConfig::default()).unwrap();
        assert!((model.accuracy(&ds) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_and_single_label_datasets_error() {
        let empty = Dataset::new("e", Split::Train, vec!["pos".into()], vec![]).unwrap();
        assert!(matches!(
            train_classifier(&empty, &TrainConfig::default()),
            Err(VictimError::EmptyDataset)
        ));
        let single = Dataset::new(
            "s",
            Split::Train,
            vec!["pos".into()],
            vec![TextExample::new("a", "good", "pos")],
        )
        .unwrap();
        assert!(matches!(
            train_classifier(&single, &TrainConfig::default()),
            Err(VictimError::SingleLabel(1))
        ));
    }

    #[test]
    fn training_is_seed_deterministic() {
        let ds = toy_dataset();
        let a = train_classifier(&ds, &TrainConfig::default()).unwrap();
        let b = train_classifier(&ds, &TrainConfig::default()).unwrap();
        assert_eq!(a.head, b.head);
    }

    #[test]
    fn checkpoint_round_trip_preserves_predictions() {
        let ds = toy_dataset();
        let model = train_classifier(&ds, &TrainConfig::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        model.save(&path).unwrap();
        let loaded = ClassifierModel::load(&path).unwrap();
        let text = "a good film about life";
        assert_eq!(
            model.predict(None, text).unwrap(),
            loaded.predict(None, text).unwrap()
        );
    }

    #[test]
    fn nli_prediction_varies_only_with_hypothesis_when_premise_fixed() {
        let mut examples = Vec::new();
        for i in 0..12 {
            let (p, h, l) = if i % 2 == 0 {
                ("a man walks", format!("a person moves {i}"), "entail")
            } else {
                ("a man walks", format!("nobody moves anywhere {i}"), "contra")
            };
            examples.push(TextExample::new(format!("x{i}"), h, l).with_premise(p));
        }
        let ds = Dataset::new(
            "nli",
            Split::Train,
            vec!["entail".into(), "contra".into()],
            examples,
        )
        .unwrap();
        let model = train_classifier(&ds, &TrainConfig::default()).unwrap();
        let s1 = model.predict(Some("a man walks"), "a person moves 0").unwrap();
        let s2 = model.predict(Some("a man walks"), "a person moves 0").unwrap();
        assert_eq!(s1, s2);
        let s3 = model
            .predict(Some("a man walks"), "nobody moves anywhere 1")
            .unwrap();
        assert_ne!(s1, s3);
    }
}
