//! Stage orchestration: train victim, generate adversarial pools, train
//! detectors, run attack/defense protocols. Stages memoize in process and,
//! when a cache directory is configured, on disk keyed by the config
//! digest — rerunning an unchanged stage is a no-op.

use super::config::ExperimentConfig;
use super::synth::{sentiment_corpus, DeskCorpus};
use crate::attacks::{
    run_attack, AttackFamily, AttackSpec, AttackStatus, QueryBudget,
};
use crate::constraints::ConstraintSet;
use crate::core::{Dataset, ExperimentRecord, RngStream, Split};
use crate::detector::{
    train_detector, DetectorConfig, DetectorMode, DetectorModel, TrainingProvenance,
};
use crate::transforms::{TransformConfig, TransformKind};
use crate::victim::{
    augment_with_transform, train_classifier, ClassifierEndpoint, ClassifierModel, EncoderSpec,
    OutputMode, TrainConfig,
};
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Environment variable naming the stage-cache directory.
pub const CACHE_ENV: &str = "TEXTGUARD_CACHE";

/// One successful adversarial example with its source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvPair {
    pub example_id: String,
    pub original: String,
    pub adversarial: String,
}

pub type AdvPool = Vec<AdvPair>;

/// Lazily built experiment artifacts over one corpus and config.
pub struct Pipeline {
    pub config: ExperimentConfig,
    pub corpus: DeskCorpus,
    cache_dir: Option<PathBuf>,
    victim: RefCell<Option<Arc<ClassifierModel>>>,
    augmented: RefCell<BTreeMap<String, Arc<ClassifierModel>>>,
    pools: RefCell<BTreeMap<String, Arc<AdvPool>>>,
    detectors: RefCell<BTreeMap<String, Arc<DetectorModel>>>,
}

impl Pipeline {
    pub fn new(config: ExperimentConfig) -> Self {
        let corpus = sentiment_corpus(config.corpus.n_train, config.corpus.n_test, config.seed);
        let cache_dir = std::env::var(CACHE_ENV).ok().map(PathBuf::from);
        Self {
            config,
            corpus,
            cache_dir,
            victim: RefCell::new(None),
            augmented: RefCell::new(BTreeMap::new()),
            pools: RefCell::new(BTreeMap::new()),
            detectors: RefCell::new(BTreeMap::new()),
        }
    }

    /// Override the disk cache location (tests use temp dirs).
    pub fn with_cache_dir(mut self, dir: Option<PathBuf>) -> Self {
        self.cache_dir = dir;
        self
    }

    fn cache_path(&self, stage: &str) -> Option<PathBuf> {
        self.cache_dir
            .as_ref()
            .map(|dir| dir.join(format!("{stage}-{}.json", self.config.digest())))
    }

    // ------------------------------------------------------------------
    // victim stage
    // ------------------------------------------------------------------

    fn train_config(&self) -> TrainConfig {
        TrainConfig {
            encoder: EncoderSpec::hashed(self.config.victim.hashed_dim),
            epochs: self.config.victim.epochs,
            learning_rate: self.config.victim.learning_rate,
            batch_size: self.config.victim.batch_size,
            seed: self.config.seed,
            augment_transform: None,
        }
    }

    /// The plain victim classifier.
    pub fn victim(&self) -> Arc<ClassifierModel> {
        if let Some(model) = self.victim.borrow().as_ref() {
            return Arc::clone(model);
        }
        let model = self.stage_model("victim", || {
            train_classifier(&self.corpus.train, &self.train_config()).expect("victim trains")
        });
        *self.victim.borrow_mut() = Some(Arc::clone(&model));
        model
    }

    /// Victim trained on the train split augmented with one transform kind.
    pub fn victim_augmented(&self, kind: TransformKind) -> Arc<ClassifierModel> {
        let key = kind.name().to_string();
        if let Some(model) = self.augmented.borrow().get(&key) {
            return Arc::clone(model);
        }
        let model = self.stage_model(&format!("victim-aug-{key}"), || {
            let transform = self
                .corpus
                .transform(kind, RngStream::new(self.config.seed).derive_label("augment"));
            let augmented_set =
                augment_with_transform(&self.corpus.train, &transform, self.config.seed);
            let mut config = self.train_config();
            config.augment_transform = Some(key.clone());
            train_classifier(&augmented_set, &config).expect("augmented victim trains")
        });
        self.augmented.borrow_mut().insert(key, Arc::clone(&model));
        model
    }

    fn stage_model<F: FnOnce() -> ClassifierModel>(&self, stage: &str, produce: F) -> Arc<ClassifierModel> {
        if let Some(path) = self.cache_path(stage) {
            if path.exists() {
                if let Ok(model) = ClassifierModel::load(&path) {
                    return Arc::new(model);
                }
            }
            let model = produce();
            let _ = model.save(&path);
            Arc::new(model)
        } else {
            Arc::new(produce())
        }
    }

    /// Score-mode endpoint over a model.
    pub fn endpoint(&self, model: Arc<ClassifierModel>) -> Arc<ClassifierEndpoint> {
        Arc::new(ClassifierEndpoint::new(model, OutputMode::Score))
    }

    // ------------------------------------------------------------------
    // attack specs
    // ------------------------------------------------------------------

    fn constraint_profile(&self, family: AttackFamily) -> ConstraintSet {
        match family {
            AttackFamily::CharEdit => ConstraintSet::char_profile(),
            AttackFamily::WordSynonym | AttackFamily::WordMlm => {
                ConstraintSet::word_profile(self.corpus.semantic_encoder.clone())
                    .with_grammar_checker(self.corpus.grammar_checker.clone())
            }
            AttackFamily::SentenceParaphrase => {
                ConstraintSet::sentence_profile(self.corpus.semantic_encoder.clone())
            }
        }
    }

    /// Fully wired attack spec for one family.
    pub fn attack_spec(&self, family: AttackFamily) -> AttackSpec {
        let mut spec = AttackSpec::new(family, self.constraint_profile(family))
            .with_synonyms(self.corpus.synonyms.clone())
            .with_suggester(self.corpus.resources.suggester.clone())
            .with_paraphraser(self.corpus.resources.paraphraser.clone());
        spec.query_budget = QueryBudget::PerWord {
            factor: self.config.attack.budget_factor,
            base: self.config.attack.budget_base,
        };
        spec.mlm_top_k = self.config.attack.mlm_top_k;
        spec.paraphrase_count = self.config.attack.paraphrase_count;
        spec.strict_anomaly = self.config.attack.strict_anomaly;
        spec
    }

    /// Test-split prefix used for attack trend runs.
    pub fn attack_eval_set(&self) -> Dataset {
        self.corpus.test.take(self.config.corpus.attack_eval)
    }

    // ------------------------------------------------------------------
    // adversarial pools
    // ------------------------------------------------------------------

    /// Successful adversarial examples of `family` on a split, capped at the
    /// configured pool size.
    pub fn adversarial_pool(&self, family: AttackFamily, split: Split) -> Arc<AdvPool> {
        let (tag, target, dataset) = match split {
            Split::Train => ("train", self.config.pool.per_family, &self.corpus.train),
            Split::Test => ("test", self.config.pool.eval_per_family, &self.corpus.test),
        };
        let key = format!("{}-{}", family.name(), tag);
        if let Some(pool) = self.pools.borrow().get(&key) {
            return Arc::clone(pool);
        }

        let pool = if let Some(path) = self.cache_path(&format!("pool-{key}")) {
            if let Some(pool) = load_pool(&path) {
                pool
            } else {
                let pool = self.build_pool(family, dataset, target, tag);
                let _ = save_pool(&path, &pool);
                pool
            }
        } else {
            self.build_pool(family, dataset, target, tag)
        };

        let pool = Arc::new(pool);
        self.pools.borrow_mut().insert(key, Arc::clone(&pool));
        pool
    }

    fn build_pool(
        &self,
        family: AttackFamily,
        dataset: &Dataset,
        target: usize,
        tag: &str,
    ) -> AdvPool {
        let victim = self.victim();
        let endpoint = self.endpoint(victim);
        let spec = self.attack_spec(family);
        let seed = self.config.seed ^ fxhash(&format!("pool-{}-{tag}", family.name()));
        let record = run_attack(&spec, endpoint.as_ref(), dataset, seed, "pool");
        record
            .per_example
            .iter()
            .filter(|o| o.status == AttackStatus::Success)
            .take(target)
            .map(|o| AdvPair {
                example_id: o.example_id.clone(),
                original: o.original_text.clone(),
                adversarial: o.final_text.clone(),
            })
            .collect()
    }

    // ------------------------------------------------------------------
    // detectors
    // ------------------------------------------------------------------

    fn detector_config(&self, seed: u64) -> DetectorConfig {
        DetectorConfig {
            hashed_dim: self.config.detector.hashed_dim,
            epochs: self.config.detector.epochs,
            learning_rate: self.config.detector.learning_rate,
            batch_size: self.config.detector.batch_size,
            dropout: self.config.detector.dropout,
            seed,
        }
    }

    /// Specific detector for one attack family, trained on the train pool.
    pub fn specific_detector(&self, family: AttackFamily) -> Arc<DetectorModel> {
        let key = format!("specific-{}", family.name());
        if let Some(model) = self.detectors.borrow().get(&key) {
            return Arc::clone(model);
        }
        let model = self.stage_detector(&key, || {
            let pool = self.adversarial_pool(family, Split::Train);
            let normal: Vec<String> = pool.iter().map(|p| p.original.clone()).collect();
            let adversarial: Vec<String> = pool.iter().map(|p| p.adversarial.clone()).collect();
            train_detector(
                &normal,
                &adversarial,
                &self.detector_config(self.config.seed ^ fxhash(&key)),
                DetectorMode::Specific {
                    attack_id: family.name().to_string(),
                },
                TrainingProvenance {
                    sources: vec![(self.corpus.train.name.clone(), family.name().to_string())],
                    ..TrainingProvenance::default()
                },
            )
            .expect("specific detector trains")
        });
        self.detectors.borrow_mut().insert(key, Arc::clone(&model));
        model
    }

    /// General detector over the pooled families, optionally holding one
    /// family out of training (for unseen-attack evaluation).
    pub fn general_detector(&self, exclude: Option<AttackFamily>) -> Arc<DetectorModel> {
        let key = match exclude {
            Some(f) => format!("general-minus-{}", f.name()),
            None => "general".to_string(),
        };
        if let Some(model) = self.detectors.borrow().get(&key) {
            return Arc::clone(model);
        }
        let model = self.stage_detector(&key, || {
            let mut normal = Vec::new();
            let mut adversarial = Vec::new();
            let mut sources = Vec::new();
            for family in AttackFamily::ALL {
                if Some(family) == exclude {
                    continue;
                }
                let pool = self.adversarial_pool(family, Split::Train);
                for pair in pool.iter() {
                    normal.push(pair.original.clone());
                    adversarial.push(pair.adversarial.clone());
                }
                sources.push((self.corpus.train.name.clone(), family.name().to_string()));
            }
            train_detector(
                &normal,
                &adversarial,
                &self.detector_config(self.config.seed ^ fxhash(&key)),
                DetectorMode::General,
                TrainingProvenance {
                    sources,
                    ..TrainingProvenance::default()
                },
            )
            .expect("general detector trains")
        });
        self.detectors.borrow_mut().insert(key, Arc::clone(&model));
        model
    }

    fn stage_detector<F: FnOnce() -> DetectorModel>(&self, stage: &str, produce: F) -> Arc<DetectorModel> {
        if let Some(path) = self.cache_path(&format!("detector-{stage}")) {
            if path.exists() {
                if let Ok(model) = DetectorModel::load(&path) {
                    return Arc::new(model);
                }
            }
            let model = produce();
            let _ = model.save(&path);
            Arc::new(model)
        } else {
            Arc::new(produce())
        }
    }

    /// Detector evaluation set: test-pool adversarial examples plus their
    /// originals, labeled.
    pub fn detector_eval_set(&self, family: AttackFamily) -> Vec<(String, bool)> {
        let pool = self.adversarial_pool(family, Split::Test);
        let mut eval = Vec::with_capacity(pool.len() * 2);
        for pair in pool.iter() {
            eval.push((pair.original.clone(), false));
            eval.push((pair.adversarial.clone(), true));
        }
        eval
    }

    /// Defense transform from the config document.
    pub fn defense_transform(&self, seed: u64) -> TransformConfig {
        let kind = TransformKind::parse(&self.config.defense.transform)
            .unwrap_or(TransformKind::SynonymSubstitution);
        self.corpus
            .transform(kind, RngStream::new(seed).derive_label("defense"))
    }
}

fn fxhash(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn load_pool(path: &Path) -> Option<AdvPool> {
    let content = std::fs::read_to_string(path).ok()?;
    serde_json::from_str(&content).ok()
}

fn save_pool(path: &Path, pool: &AdvPool) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, serde_json::to_string(pool)?)
}

/// Write one record file (convenience for CLI and tests).
pub fn write_run(record: &ExperimentRecord, path: &Path) -> crate::core::Result<()> {
    crate::core::write_records(std::slice::from_ref(record), path)
}
