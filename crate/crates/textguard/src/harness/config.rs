//! Experiment configuration: one structured document drives the whole
//! pipeline. Stage outputs are content-addressed by the config digest.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusConfig {
    pub n_train: usize,
    pub n_test: usize,
    /// Test-split prefix attacked in trend runs.
    pub attack_eval: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            n_train: 800,
            n_test: 300,
            attack_eval: 120,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VictimConfig {
    pub hashed_dim: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
}

impl Default for VictimConfig {
    fn default() -> Self {
        Self {
            hashed_dim: 512,
            epochs: 20,
            learning_rate: 0.5,
            batch_size: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorTrainConfig {
    pub hashed_dim: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub dropout: f64,
}

impl Default for DetectorTrainConfig {
    fn default() -> Self {
        Self {
            hashed_dim: 512,
            epochs: 320,
            learning_rate: 3.0,
            batch_size: 8,
            dropout: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PoolConfig {
    /// Adversarial examples targeted per family when building train pools.
    pub per_family: usize,
    /// And for held-out evaluation pools.
    pub eval_per_family: usize,
}

impl Default for PoolConfig {
    fn default() -> Self {
        Self {
            per_family: 500,
            eval_per_family: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AttackConfig {
    pub budget_factor: u64,
    pub budget_base: u64,
    pub mlm_top_k: usize,
    pub paraphrase_count: u64,
    /// Filter intermediate candidates by the anomaly constraint too.
    pub strict_anomaly: bool,
}

impl Default for AttackConfig {
    fn default() -> Self {
        Self {
            budget_factor: 2,
            budget_base: 500,
            mlm_top_k: 48,
            paraphrase_count: 10,
            strict_anomaly: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DefenseConfig {
    /// Transform kind name.
    pub transform: String,
    pub threshold: f64,
    pub fresh_draw: bool,
    /// Majority-of-m verdict draws for defended success judgments.
    pub verdict_m: usize,
    /// Apply the detector gate (false randomizes unconditionally).
    pub gate: bool,
}

impl Default for DefenseConfig {
    fn default() -> Self {
        Self {
            transform: "synonym_substitution".into(),
            threshold: 0.5,
            fresh_draw: true,
            verdict_m: 1,
            gate: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdaptiveConfig {
    pub k: usize,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self { k: 5 }
    }
}

/// The whole experiment document.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub corpus: CorpusConfig,
    pub victim: VictimConfig,
    pub detector: DetectorTrainConfig,
    pub pool: PoolConfig,
    pub attack: AttackConfig,
    pub defense: DefenseConfig,
    pub adaptive: AdaptiveConfig,
    /// Repeated runs for randomized evaluations (mean reported).
    pub repeats: usize,
}

impl ExperimentConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            repeats: 3,
            ..Self::default()
        }
    }

    /// Content digest over the canonical serialization; stage outputs are
    /// addressed by this.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let out = hasher.finalize();
        out.iter().take(12).map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_tracks_content() {
        let a = ExperimentConfig::with_seed(1);
        let b = ExperimentConfig::with_seed(1);
        assert_eq!(a.digest(), b.digest());
        let c = ExperimentConfig::with_seed(2);
        assert_ne!(a.digest(), c.digest());
    }

    #[test]
    fn partial_documents_fill_defaults() {
        let cfg: ExperimentConfig =
            serde_json::from_str("{\"seed\": 9, \"defense\": {\"gate\": false}}").unwrap();
        assert_eq!(cfg.seed, 9);
        assert!(!cfg.defense.gate);
        assert_eq!(cfg.adaptive.k, 5);
        assert_eq!(cfg.defense.verdict_m, 1);
    }
}
