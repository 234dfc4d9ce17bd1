//! The universal defense: a detector-gated randomizing endpoint that drops
//! in wherever a classifier endpoint is expected, plus the after-attack and
//! during-attack evaluation protocols.

use crate::attacks::{
    run_attack, AdaptiveWrapConfig, AttackOutcome, AttackSpec, AttackStatus, EotEndpoint,
};
use crate::core::{detokenize, tokenize, Dataset, ExperimentRecord, RngStream};
use crate::detector::DetectorModel;
use crate::transforms::{apply, TransformConfig, TransformKind};
use crate::victim::{OutputMode, Prediction, TextClassifierEndpoint};
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// Where randomization sits relative to the attack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DefenseEvalMode {
    /// One transform draw applied to fixed final adversarial texts.
    AfterAttack,
    /// Every attack query routed through the defended endpoint.
    DuringAttack,
}

/// Detector-gated randomizing endpoint. Inputs the detector clears pass to
/// the inner classifier untouched (bit-exact scores); flagged inputs are
/// transformed first, with a fresh draw per query by default. Built without
/// a detector it randomizes unconditionally.
pub struct DefendedEndpoint {
    detector: Option<Arc<DetectorModel>>,
    threshold: f64,
    transform: TransformConfig,
    inner: Arc<dyn TextClassifierEndpoint>,
    mode: OutputMode,
    fresh_draw_per_query: bool,
    queries: AtomicU64,
    draws: AtomicU64,
}

impl DefendedEndpoint {
    pub fn new(
        inner: Arc<dyn TextClassifierEndpoint>,
        detector: Option<Arc<DetectorModel>>,
        transform: TransformConfig,
    ) -> Self {
        Self {
            detector,
            threshold: crate::detector::DEFAULT_THRESHOLD,
            transform,
            inner,
            mode: OutputMode::Score,
            fresh_draw_per_query: true,
            queries: AtomicU64::new(0),
            draws: AtomicU64::new(0),
        }
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    /// Memoize one draw per distinct text instead of a fresh draw per
    /// query (ablation mode).
    pub fn with_memoized_draws(mut self) -> Self {
        self.fresh_draw_per_query = false;
        self
    }

    pub fn transform_kind(&self) -> TransformKind {
        self.transform.kind
    }

    fn next_draw_segment(&self, text: &str) -> u64 {
        if self.fresh_draw_per_query {
            self.draws.fetch_add(1, Ordering::SeqCst)
        } else {
            // per-text memoized draw: segment derived from the text itself
            let mut h: u64 = 0xcbf2_9ce4_8422_2325;
            for b in text.as_bytes() {
                h ^= u64::from(*b);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
            h
        }
    }

    /// The text the inner classifier would receive for this query. Public
    /// for instrumentation; consumes a draw exactly like `query`.
    pub fn randomize(&self, text: &str) -> String {
        let segment = self.next_draw_segment(text);
        let config = self.transform.with_rng(self.transform.rng.derive(segment));
        apply(&config, text).unwrap_or_else(|err| {
            log::warn!("defense transform failed ({err}); forwarding input unchanged");
            text.to_string()
        })
    }

    fn flagged(&self, premise: Option<&str>, text: &str) -> bool {
        match &self.detector {
            Some(detector) => detector
                .degree_of_anomaly(premise, text)
                .map(|d| d >= self.threshold)
                .unwrap_or(true),
            None => true,
        }
    }
}

impl TextClassifierEndpoint for DefendedEndpoint {
    fn label_set(&self) -> &[String] {
        self.inner.label_set()
    }

    fn query(&self, premise: Option<&str>, text: &str) -> Prediction {
        self.queries.fetch_add(1, Ordering::SeqCst);
        if self.flagged(premise, text) {
            let randomized = self.randomize(text);
            self.inner.query(premise, &randomized)
        } else {
            self.inner.query(premise, text)
        }
    }

    fn query_count(&self) -> u64 {
        self.queries.load(Ordering::SeqCst)
    }

    fn output_mode(&self) -> OutputMode {
        self.mode
    }
}

/// Build the defense around a classifier endpoint. Warns when the inner
/// classifier was not trained with augmentation matching the transform
/// kind, since randomized benign inputs then cost clean accuracy.
pub fn wrap(
    classifier: Arc<dyn TextClassifierEndpoint>,
    augmented_with: Option<TransformKind>,
    detector: Option<Arc<DetectorModel>>,
    transform: TransformConfig,
) -> DefendedEndpoint {
    match augmented_with {
        Some(kind) if kind == transform.kind => {}
        other => log::warn!(
            "classifier augmentation {:?} does not match defense transform {:?}",
            other,
            transform.kind
        ),
    }
    DefendedEndpoint::new(classifier, detector, transform)
}

/// Outcome of randomizing fixed adversarial texts once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AfterAttackStats {
    pub total: usize,
    pub attempted: usize,
    pub successful: usize,
    /// Successful adversarial texts whose one-draw randomized version is
    /// classified correctly again.
    pub restored: usize,
    pub restored_fraction: f64,
    /// Accuracy over the whole run before/after the randomization pass.
    pub accuracy_before: f64,
    pub accuracy_after: f64,
}

/// Apply one transform draw to every successful adversarial text from a
/// prior run and re-query the (plain) classifier.
pub fn evaluate_after_attack(
    outcomes: &[AttackOutcome],
    gold_labels: &[(String, String)],
    transform: &TransformConfig,
    classifier: &dyn TextClassifierEndpoint,
    seed: u64,
) -> AfterAttackStats {
    let gold = |id: &str| -> Option<&str> {
        gold_labels
            .iter()
            .find(|(gid, _)| gid == id)
            .map(|(_, label)| label.as_str())
    };
    let stream = RngStream::new(seed).derive_label("after-attack");
    let total = outcomes.len();
    let attempted = outcomes
        .iter()
        .filter(|o| o.status != AttackStatus::SkippedWrongPrediction)
        .count();
    let mut successful = 0usize;
    let mut restored = 0usize;
    for (i, outcome) in outcomes.iter().enumerate() {
        if outcome.status != AttackStatus::Success {
            continue;
        }
        successful += 1;
        let Some(gold_label) = gold(&outcome.example_id) else {
            continue;
        };
        let config = transform.with_rng(stream.derive(i as u64));
        let randomized = apply(&config, &outcome.final_text)
            .unwrap_or_else(|_| outcome.final_text.clone());
        let pred = classifier.query(None, &randomized);
        if pred.label == gold_label {
            restored += 1;
        }
    }
    let restored_fraction = if successful == 0 {
        0.0
    } else {
        restored as f64 / successful as f64
    };
    AfterAttackStats {
        total,
        attempted,
        successful,
        restored,
        restored_fraction,
        accuracy_before: if total == 0 {
            0.0
        } else {
            (attempted - successful) as f64 / total as f64
        },
        accuracy_after: if total == 0 {
            0.0
        } else {
            (attempted - successful + restored) as f64 / total as f64
        },
    }
}

/// During-attack evaluation: the same protocol as a plain attack run but
/// with every query routed through the defended endpoint. Success verdicts
/// are re-judged on the defended endpoint with fresh draws: majority of
/// `verdict_m` (default 1).
pub fn evaluate_during_attack(
    spec: &AttackSpec,
    defended: &DefendedEndpoint,
    dataset: &Dataset,
    seed: u64,
    config_digest: &str,
    verdict_m: usize,
) -> ExperimentRecord {
    let record = run_attack(spec, defended, dataset, seed, config_digest);
    rejudge(record, defended, dataset, verdict_m)
}

/// During-attack evaluation under the adaptive attack: candidate feedback
/// is the k-sample average of defended scores; verdicts as above.
pub fn evaluate_during_attack_adaptive(
    spec: &AttackSpec,
    defended: Arc<DefendedEndpoint>,
    wrap: AdaptiveWrapConfig,
    dataset: &Dataset,
    seed: u64,
    config_digest: &str,
    verdict_m: usize,
) -> ExperimentRecord {
    let eot = EotEndpoint::new(defended.clone() as Arc<dyn TextClassifierEndpoint>, wrap);
    let record = run_attack(spec, &eot, dataset, seed, config_digest);
    rejudge(record, defended.as_ref(), dataset, verdict_m)
}

fn rejudge(
    record: ExperimentRecord,
    defended: &DefendedEndpoint,
    dataset: &Dataset,
    verdict_m: usize,
) -> ExperimentRecord {
    let m = verdict_m.max(1);
    let mut outcomes = record.per_example;
    for outcome in &mut outcomes {
        if outcome.status != AttackStatus::Success {
            continue;
        }
        let premise = dataset
            .examples
            .iter()
            .find(|e| e.id == outcome.example_id)
            .and_then(|e| e.premise.as_deref());
        let gold = dataset
            .examples
            .iter()
            .find(|e| e.id == outcome.example_id)
            .map(|e| e.gold_label.clone())
            .unwrap_or_default();
        let mut wrong = 0usize;
        for _ in 0..m {
            let pred = defended.query(premise, &outcome.final_text);
            if pred.label != gold {
                wrong += 1;
            }
        }
        outcome.queries_used += m as u64;
        if wrong * 2 <= m {
            outcome.status = AttackStatus::Failed;
        }
    }
    ExperimentRecord::from_outcomes(record.config_digest, record.seed, outcomes)
}

/// Convenience: canonical surface form of a text, used when comparing
/// defended and undefended runs.
pub fn canonical_text(text: &str) -> String {
    detokenize(&tokenize(text))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::testing::KeywordVictim;
    use crate::attacks::{AttackFamily, AttackSpec};
    use crate::constraints::{ConstraintSet, HashedWordVecEncoder};
    use crate::core::{Split, TextExample};
    use crate::transforms::{
        IdentityParaphraser, Lexicon, LexiconPosTagger, LexiconRestorer, NgramSuggester,
        SynonymLexicon, TransformResources,
    };

    fn resources() -> TransformResources {
        let mut synonyms = SynonymLexicon::new();
        synonyms.insert_group(&["good", "fine", "nice"]);
        synonyms.insert_group(&["day", "morning", "evening"]);
        let synonyms = Arc::new(synonyms);
        let mut lexicon = Lexicon::from_texts(["a good day outside plain vibes"]);
        lexicon.absorb(synonyms.vocabulary());
        TransformResources {
            synonyms: synonyms.clone(),
            adverbs: Arc::new(vec!["really".into()]),
            tagger: Arc::new(LexiconPosTagger::default()),
            suggester: Arc::new(NgramSuggester::train(["a good day"])),
            paraphraser: Arc::new(IdentityParaphraser),
            restorer: Some(Arc::new(LexiconRestorer::new(lexicon))),
            semantic_encoder: Arc::new(HashedWordVecEncoder::new(32)),
        }
    }

    fn transform(seed: u64) -> TransformConfig {
        TransformConfig::new(
            TransformKind::SynonymSubstitution,
            resources(),
            RngStream::new(seed).derive_label("defense"),
        )
    }

    #[test]
    fn unconditional_defense_randomizes_every_query() {
        let victim = Arc::new(KeywordVictim::new(["good"]));
        let defended = DefendedEndpoint::new(victim.clone(), None, transform(1));
        // "good" should often be substituted away, changing the score
        let mut saw_change = false;
        for _ in 0..8 {
            let pred = defended.query(None, "good day");
            if pred.label == "neg" {
                saw_change = true;
            }
        }
        assert!(saw_change, "randomization never touched the trigger");
        assert_eq!(defended.query_count(), 8);
        assert_eq!(victim.query_count(), 8);
    }

    #[test]
    fn fresh_draws_differ_memoized_draws_repeat() {
        let victim = Arc::new(KeywordVictim::new(["good"]));
        let fresh = DefendedEndpoint::new(victim.clone(), None, transform(2));
        let texts: std::collections::BTreeSet<String> =
            (0..10).map(|_| fresh.randomize("good fine day morning")).collect();
        assert!(texts.len() > 1, "fresh draws should vary");

        let memo = DefendedEndpoint::new(victim, None, transform(2)).with_memoized_draws();
        let texts: std::collections::BTreeSet<String> =
            (0..10).map(|_| memo.randomize("good fine day morning")).collect();
        assert_eq!(texts.len(), 1, "memoized draw must be stable per text");
    }

    #[test]
    fn after_attack_restoration_counts_by_hand() {
        // 10 outcomes: 4 successes; identity transform so restoration
        // happens iff the keyword victim already classifies the final text
        // as gold
        let victim = KeywordVictim::new(["good"]);
        let mut outcomes = Vec::new();
        let mut gold = Vec::new();
        for i in 0..10 {
            let (status, final_text, gold_label) = match i % 5 {
                0 => (AttackStatus::Success, "plain day", "pos"), // not restorable
                1 => (AttackStatus::Success, "good day", "pos"),  // restorable
                2 => (AttackStatus::Failed, "good day", "pos"),
                3 => (AttackStatus::SkippedWrongPrediction, "x", "pos"),
                _ => (AttackStatus::Failed, "plain day", "neg"),
            };
            outcomes.push(AttackOutcome {
                example_id: format!("e{i}"),
                status,
                original_text: "good day".into(),
                final_text: final_text.into(),
                queries_used: 1,
                detector_queries: 0,
                constraint_report: None,
                edit_trace: vec![],
            });
            gold.push((format!("e{i}"), gold_label.to_string()));
        }
        // identity transform: no synonyms, no restorer
        let mut resources = resources();
        resources.synonyms = Arc::new(SynonymLexicon::new());
        resources.restorer = None;
        let config = TransformConfig::new(
            TransformKind::SynonymSubstitution,
            resources,
            RngStream::new(0),
        );
        let stats = evaluate_after_attack(&outcomes, &gold, &config, &victim, 3);
        assert_eq!(stats.successful, 4);
        assert_eq!(stats.restored, 2); // the two "good day" successes
        assert!((stats.restored_fraction - 0.5).abs() < 1e-12);
        assert_eq!(stats.attempted, 8);
        assert!((stats.accuracy_before - 0.4).abs() < 1e-12);
        assert!((stats.accuracy_after - 0.6).abs() < 1e-12);
    }

    #[test]
    fn during_attack_changes_outcomes_vs_undefended() {
        let victim = Arc::new(KeywordVictim::new(["good"]));
        let examples: Vec<TextExample> = (0..6)
            .map(|i| TextExample::new(format!("e{i}"), format!("good day number{i}"), "pos"))
            .collect();
        let ds = Dataset::new("d", Split::Test, vec!["pos".into(), "neg".into()], examples)
            .unwrap();
        let spec = AttackSpec::new(AttackFamily::CharEdit, ConstraintSet::char_profile());

        let undefended = run_attack(&spec, victim.as_ref(), &ds, 9, "d");
        let defended = DefendedEndpoint::new(victim.clone(), None, transform(4));
        let during = evaluate_during_attack(&spec, &defended, &ds, 9, "d", 1);
        // restoration repairs the char corruption, so the defense improves
        // after-attack accuracy
        assert!(
            during.metrics.after_attack_accuracy >= undefended.metrics.after_attack_accuracy,
            "defense should not make things worse here: {} vs {}",
            during.metrics.after_attack_accuracy,
            undefended.metrics.after_attack_accuracy
        );
    }
}
