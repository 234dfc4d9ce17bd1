//! The anomaly detector: a binary head over sentence representations whose
//! class-1 probability is the *degree of anomaly* of a text. Trained
//! against one attack (specific mode) or a pool of attacks and datasets
//! (general mode); the general detector doubles as the defense gate and the
//! anomaly-constraint scorer.

mod projection;

pub use projection::project_2d;

use crate::constraints::AnomalyScorer;
use crate::core::{RngStream, ScoreVector};
use crate::victim::{CorpusStats, EncoderSpec, LinearSoftmax, SgdConfig, TextEncoder, TrainReport};
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DetectorError {
    #[error("both classes must be non-empty (normal: {normal}, adversarial: {adversarial})")]
    EmptyClass { normal: usize, adversarial: usize },
    #[error("cannot score empty text")]
    EmptyText,
    #[error("threshold must lie strictly inside (0, 1), got {0}")]
    BadThreshold(f64),
    #[error("evaluation set contains a single class")]
    SingleClassEval,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, DetectorError>;

/// Default decision threshold on the degree of anomaly, used both as the
/// detection gate and as the anomaly-constraint ceiling.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// What the detector was trained against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorMode {
    /// Trained against one known attack.
    Specific { attack_id: String },
    /// Trained on a pool of attacks and datasets; expected to flag unseen
    /// attack families too.
    General,
}

/// Where the training pool came from.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingProvenance {
    /// (dataset, attack_id) sources of the adversarial pool.
    pub sources: Vec<(String, String)>,
    pub normal_count: usize,
    pub adversarial_count: usize,
}

/// Detector training hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub hashed_dim: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    /// Dropout applied to the sentence representation during training only.
    pub dropout: f64,
    pub seed: u64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            hashed_dim: 512,
            epochs: 80,
            learning_rate: 0.5,
            batch_size: 16,
            dropout: 0.1,
            seed: 0,
        }
    }
}

/// The trained detector. Inference is deterministic: dropout is a training
/// device only.
#[derive(Clone, Serialize, Deserialize)]
pub struct DetectorModel {
    pub encoder_spec: EncoderSpec,
    pub head: LinearSoftmax,
    pub dropout: f64,
    pub mode: DetectorMode,
    pub provenance: TrainingProvenance,
    pub threshold: f64,
    pub train_report: TrainReport,
    #[serde(skip)]
    encoder: Option<Arc<dyn TextEncoder>>,
}

/// Verdict for one text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    pub degree: f64,
    pub flag: bool,
    pub threshold: f64,
}

/// Confusion-matrix metrics at the model's threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Binary cross-entropy on the class-1 probability.
pub fn bce_loss(y: f64, p: f64) -> f64 {
    let p = p.clamp(1e-12, 1.0 - 1e-12);
    -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
}

impl DetectorModel {
    fn encoder(&self) -> Arc<dyn TextEncoder> {
        match &self.encoder {
            Some(e) => Arc::clone(e),
            None => self.encoder_spec.build(),
        }
    }

    fn with_built_encoder(mut self) -> Self {
        self.encoder = Some(self.encoder_spec.build());
        self
    }

    /// Sentence representation the head reads (the encoder output).
    pub fn representation(&self, premise: Option<&str>, text: &str) -> Vec<f64> {
        self.encoder().encode(premise, text)
    }

    /// Probability that `text` is adversarial, in [0, 1]. Deterministic.
    pub fn degree_of_anomaly(&self, premise: Option<&str>, text: &str) -> Result<f64> {
        if text.trim().is_empty() {
            return Err(DetectorError::EmptyText);
        }
        let features = self.representation(premise, text);
        let probs = self.head.probabilities(&features);
        Ok(probs[1])
    }

    /// Both class probabilities (they sum to one).
    pub fn class_probabilities(&self, premise: Option<&str>, text: &str) -> Result<ScoreVector> {
        if text.trim().is_empty() {
            return Err(DetectorError::EmptyText);
        }
        let features = self.representation(premise, text);
        ScoreVector::new(self.head.probabilities(&features))
            .map_err(|e| DetectorError::Internal(e.to_string()))
    }

    /// Flag `text` when its degree reaches `threshold`.
    pub fn detect(&self, text: &str, threshold: f64) -> Result<DetectionResult> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(DetectorError::BadThreshold(threshold));
        }
        let degree = self.degree_of_anomaly(None, text)?;
        Ok(DetectionResult {
            degree,
            flag: degree >= threshold,
            threshold,
        })
    }

    /// Per-example training loss of this model on `(text, y)`.
    pub fn example_loss(&self, text: &str, adversarial: bool) -> Result<f64> {
        let p = self.degree_of_anomaly(None, text)?;
        Ok(bce_loss(f64::from(u8::from(adversarial)), p))
    }

    /// Representation matrix (one row per text), for export and projection.
    pub fn export_representations(&self, texts: &[String]) -> Vec<Vec<f64>> {
        texts
            .iter()
            .map(|t| self.representation(None, t))
            .collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        std::fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json = std::fs::read_to_string(path)?;
        let model: DetectorModel = serde_json::from_str(&json)?;
        Ok(model.with_built_encoder())
    }
}

impl AnomalyScorer for DetectorModel {
    fn degree(&self, premise: Option<&str>, text: &str) -> f64 {
        self.degree_of_anomaly(premise, text).unwrap_or(1.0)
    }
}

/// Train a detector on normal (class 0) and adversarial (class 1) texts.
/// Class balance is enforced per epoch by cycling the smaller class so both
/// contribute equal counts. Seed-deterministic.
pub fn train_detector(
    normal: &[String],
    adversarial: &[String],
    config: &DetectorConfig,
    mode: DetectorMode,
    provenance: TrainingProvenance,
) -> Result<DetectorModel> {
    if normal.is_empty() || adversarial.is_empty() {
        return Err(DetectorError::EmptyClass {
            normal: normal.len(),
            adversarial: adversarial.len(),
        });
    }

    let stats = CorpusStats::fit(normal.iter().map(String::as_str));
    let encoder_spec = EncoderSpec::hashed(config.hashed_dim).with_stats(stats);
    let encoder = encoder_spec.build();

    // balanced epoch pool: cycle the smaller class up to the larger
    let m = normal.len().max(adversarial.len());
    let mut features = Vec::with_capacity(2 * m);
    let mut labels = Vec::with_capacity(2 * m);
    for i in 0..m {
        features.push(encoder.encode(None, &normal[i % normal.len()]));
        labels.push(0);
        features.push(encoder.encode(None, &adversarial[i % adversarial.len()]));
        labels.push(1);
    }

    let mut head = LinearSoftmax::zeros(2, encoder.dim());
    let sgd = SgdConfig {
        epochs: config.epochs,
        learning_rate: config.learning_rate,
        batch_size: config.batch_size,
        // no weight decay: the head should saturate so degree scores
        // polarize toward 0 and 1
        l2: 0.0,
        dropout: config.dropout,
    };
    let stream = RngStream::new(config.seed).derive_label("detector-train");
    let train_report = head.fit(&features, &labels, &sgd, &stream);

    Ok(DetectorModel {
        encoder_spec,
        head,
        dropout: config.dropout,
        mode,
        provenance: TrainingProvenance {
            normal_count: normal.len(),
            adversarial_count: adversarial.len(),
            ..provenance
        },
        threshold: DEFAULT_THRESHOLD,
        train_report,
        encoder: Some(encoder),
    })
}

/// Confusion-matrix metrics of `model` on a labeled set
/// (`true` = adversarial).
pub fn evaluate_detector(
    model: &DetectorModel,
    labeled: &[(String, bool)],
) -> Result<DetectorMetrics> {
    let has_pos = labeled.iter().any(|(_, y)| *y);
    let has_neg = labeled.iter().any(|(_, y)| !*y);
    if !has_pos || !has_neg {
        return Err(DetectorError::SingleClassEval);
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0u64, 0u64, 0u64, 0u64);
    for (text, truth) in labeled {
        let flagged = model.detect(text, model.threshold)?.flag;
        match (flagged, truth) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    let total = (tp + fp + tn + fn_) as f64;
    let precision = if tp + fp == 0 {
        0.0
    } else {
        tp as f64 / (tp + fp) as f64
    };
    let recall = if tp + fn_ == 0 {
        0.0
    } else {
        tp as f64 / (tp + fn_) as f64
    };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(DetectorMetrics {
        accuracy: (tp + tn) as f64 / total,
        precision,
        recall,
        f1,
    })
}
