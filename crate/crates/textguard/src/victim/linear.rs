//! Multinomial logistic head: a single linear layer trained with
//! cross-entropy by seeded mini-batch gradient descent. Deterministic given
//! the seed stream; the only randomness is batch shuffling and the optional
//! dropout mask.

use crate::core::RngStream;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|e| e / sum).collect()
}

/// Dense linear layer with per-class weights and bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSoftmax {
    pub n_classes: usize,
    pub dim: usize,
    /// Row-major `[n_classes][dim]`.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

/// Per-epoch mean training loss, for convergence checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub epoch_losses: Vec<f64>,
}

/// Gradient-descent hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgdConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub l2: f64,
    /// Dropout rate applied to input features during training only.
    pub dropout: f64,
}

impl Default for SgdConfig {
    fn default() -> Self {
        Self {
            epochs: 30,
            learning_rate: 0.5,
            batch_size: 16,
            l2: 1e-4,
            dropout: 0.0,
        }
    }
}

impl LinearSoftmax {
    pub fn zeros(n_classes: usize, dim: usize) -> Self {
        Self {
            n_classes,
            dim,
            weights: vec![0.0; n_classes * dim],
            bias: vec![0.0; n_classes],
        }
    }

    pub fn logits(&self, features: &[f64]) -> Vec<f64> {
        debug_assert_eq!(features.len(), self.dim);
        (0..self.n_classes)
            .map(|c| {
                let row = &self.weights[c * self.dim..(c + 1) * self.dim];
                row.iter().zip(features).map(|(w, x)| w * x).sum::<f64>() + self.bias[c]
            })
            .collect()
    }

    pub fn probabilities(&self, features: &[f64]) -> Vec<f64> {
        softmax(&self.logits(features))
    }

    /// Train on pre-encoded features. Deterministic for a fixed stream.
    pub fn fit(
        &mut self,
        features: &[Vec<f64>],
        labels: &[usize],
        config: &SgdConfig,
        stream: &RngStream,
    ) -> TrainReport {
        assert_eq!(features.len(), labels.len());
        let n = features.len();
        let mut epoch_losses = Vec::with_capacity(config.epochs);
        for epoch in 0..config.epochs {
            let mut order: Vec<usize> = (0..n).collect();
            let mut rng = stream.derive(epoch as u64).rng();
            order.shuffle(&mut rng);

            let mut epoch_loss = 0.0;
            for batch in order.chunks(config.batch_size.max(1)) {
                let mut grad_w = vec![0.0; self.weights.len()];
                let mut grad_b = vec![0.0; self.bias.len()];
                for &i in batch {
                    let mut x = features[i].clone();
                    if config.dropout > 0.0 {
                        let keep = 1.0 - config.dropout;
                        for v in &mut x {
                            if rng.gen::<f64>() < config.dropout {
                                *v = 0.0;
                            } else {
                                *v /= keep;
                            }
                        }
                    }
                    let probs = self.probabilities(&x);
                    epoch_loss += -probs[labels[i]].max(1e-12).ln();
                    for c in 0..self.n_classes {
                        let err = probs[c] - f64::from(u8::from(c == labels[i]));
                        grad_b[c] += err;
                        let row = &mut grad_w[c * self.dim..(c + 1) * self.dim];
                        for (g, xv) in row.iter_mut().zip(&x) {
                            *g += err * xv;
                        }
                    }
                }
                let scale = config.learning_rate / batch.len() as f64;
                for (w, g) in self.weights.iter_mut().zip(&grad_w) {
                    *w -= scale * g + config.learning_rate * config.l2 * *w;
                }
                for (b, g) in self.bias.iter_mut().zip(&grad_b) {
                    *b -= scale * g;
                }
            }
            epoch_losses.push(epoch_loss / n as f64);
        }
        TrainReport { epoch_losses }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softmax_sums_to_one() {
        let p = softmax(&[1.0, 2.0, 3.0]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p[2] > p[1] && p[1] > p[0]);
    }

    #[test]
    fn separable_data_reaches_full_train_accuracy() {
        // two clusters on opposite axes
        let features: Vec<Vec<f64>> = (0..16)
            .map(|i| {
                if i % 2 == 0 {
                    vec![1.0, 0.0 + (i as f64) * 0.01]
                } else {
                    vec![0.0, 1.0 + (i as f64) * 0.01]
                }
            })
            .collect();
        let labels: Vec<usize> = (0..16).map(|i| i % 2).collect();
        let mut model = LinearSoftmax::zeros(2, 2);
        let report = model.fit(
            &features,
            &labels,
            &SgdConfig {
                epochs: 50,
                ..SgdConfig::default()
            },
            &RngStream::new(3),
        );
        let correct = features
            .iter()
            .zip(&labels)
            .filter(|(x, &y)| {
                let p = model.probabilities(x);
                (p[1] > p[0]) == (y == 1)
            })
            .count();
        assert_eq!(correct, 16);
        assert!(report.epoch_losses.last().unwrap() < &report.epoch_losses[0]);
    }

    #[test]
    fn training_is_seed_deterministic() {
        let features = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let labels = vec![0, 1, 0];
        let config = SgdConfig {
            dropout: 0.2,
            ..SgdConfig::default()
        };
        let mut a = LinearSoftmax::zeros(2, 2);
        let mut b = LinearSoftmax::zeros(2, 2);
        a.fit(&features, &labels, &config, &RngStream::new(9));
        b.fit(&features, &labels, &config, &RngStream::new(9));
        assert_eq!(a, b);
    }
}
