//! Attack runs over a dataset: per-example outcomes folded into an
//! experiment record. Deterministic given the seed; every example gets its
//! own derived stream so order never perturbs draws.

use super::engines::run_example;
use super::outcome::AttackStatus;
use super::spec::AttackSpec;
use crate::core::{Dataset, ExperimentRecord, RngStream};
use crate::victim::TextClassifierEndpoint;

/// Run `spec` against every example of `dataset` on `endpoint`.
/// Examples the endpoint already misclassifies are recorded as skipped and
/// count as model errors in after-attack accuracy.
pub fn run_attack(
    spec: &AttackSpec,
    endpoint: &dyn TextClassifierEndpoint,
    dataset: &Dataset,
    seed: u64,
    config_digest: &str,
) -> ExperimentRecord {
    run_attack_with_verdict(spec, endpoint, None, dataset, seed, config_digest)
}

/// Like [`run_attack`], but when `verdict` is given, each engine-declared
/// success is re-judged with one fresh query against `verdict` (the
/// defended endpoint in during-attack evaluation); a success the verdict
/// endpoint classifies correctly is demoted to failed.
pub fn run_attack_with_verdict(
    spec: &AttackSpec,
    search: &dyn TextClassifierEndpoint,
    verdict: Option<&dyn TextClassifierEndpoint>,
    dataset: &Dataset,
    seed: u64,
    config_digest: &str,
) -> ExperimentRecord {
    let stream = RngStream::new(seed).derive_label("attack");
    let mut outcomes = Vec::with_capacity(dataset.len());
    for (i, example) in dataset.examples.iter().enumerate() {
        let mut rng = stream.derive(i as u64).rng();
        let mut outcome = run_example(spec, search, example, &mut rng);
        if let Some(verdict) = verdict {
            if outcome.status == AttackStatus::Success {
                let pred = verdict.query(example.premise.as_deref(), &outcome.final_text);
                outcome.queries_used += verdict.query_cost();
                if pred.label == example.gold_label {
                    outcome.status = AttackStatus::Failed;
                }
            }
        }
        outcomes.push(outcome);
    }
    ExperimentRecord::from_outcomes(config_digest, seed, outcomes)
}
