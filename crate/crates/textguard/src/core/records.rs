//! Experiment record files: one JSON object per line, leading version
//! header. Records round-trip exactly and metrics are always recomputable
//! from the per-example outcomes they carry.

use super::{CoreError, Result};
use crate::attacks::{AttackOutcome, AttackStatus};
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

/// Format version written into every record file header.
pub const RECORD_VERSION: u32 = 1;

/// Aggregate effectiveness metrics for one attack run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    /// Victim accuracy on the original examples.
    pub original_accuracy: f64,
    /// Victim accuracy against the crafted adversarial examples; initially
    /// misclassified examples still count as errors.
    pub after_attack_accuracy: f64,
    /// Successful flips over attempted (initially correct) examples.
    pub attack_success_rate: f64,
    /// Victim queries per attempted example.
    pub avg_queries: f64,
}

/// One attack run: per-example outcomes plus their aggregate metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub config_digest: String,
    pub seed: u64,
    pub per_example: Vec<AttackOutcome>,
    pub metrics: MetricsSummary,
}

impl ExperimentRecord {
    /// Assemble a record, computing the metrics from the outcomes.
    pub fn from_outcomes(
        config_digest: impl Into<String>,
        seed: u64,
        per_example: Vec<AttackOutcome>,
    ) -> Self {
        let metrics = recompute_metrics(&per_example);
        Self {
            config_digest: config_digest.into(),
            seed,
            per_example,
            metrics,
        }
    }
}

/// Fold outcomes into a `MetricsSummary`. This is the single source of truth
/// for the metric definitions; stored summaries must match it exactly.
pub fn recompute_metrics(outcomes: &[AttackOutcome]) -> MetricsSummary {
    let total = outcomes.len();
    if total == 0 {
        return MetricsSummary {
            original_accuracy: 0.0,
            after_attack_accuracy: 0.0,
            attack_success_rate: 0.0,
            avg_queries: 0.0,
        };
    }
    let skipped = outcomes
        .iter()
        .filter(|o| o.status == AttackStatus::SkippedWrongPrediction)
        .count();
    let successes = outcomes
        .iter()
        .filter(|o| o.status == AttackStatus::Success)
        .count();
    let attempted = total - skipped;
    let queries: u64 = outcomes
        .iter()
        .filter(|o| o.status != AttackStatus::SkippedWrongPrediction)
        .map(|o| o.queries_used)
        .sum();
    MetricsSummary {
        original_accuracy: attempted as f64 / total as f64,
        after_attack_accuracy: (attempted - successes) as f64 / total as f64,
        attack_success_rate: if attempted == 0 {
            0.0
        } else {
            successes as f64 / attempted as f64
        },
        avg_queries: if attempted == 0 {
            0.0
        } else {
            queries as f64 / attempted as f64
        },
    }
}

#[derive(Serialize, Deserialize)]
struct Header {
    version: u32,
    kind: String,
}

/// Write records as JSONL with a version header line.
pub fn write_records(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let file = File::create(path)?;
    let mut writer = BufWriter::new(file);
    let header = Header {
        version: RECORD_VERSION,
        kind: "experiment-records".into(),
    };
    serde_json::to_writer(&mut writer, &header)?;
    writer.write_all(b"\n")?;
    for record in records {
        serde_json::to_writer(&mut writer, record)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

/// Read records back, rejecting files with a missing or incompatible header.
pub fn read_records(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines();
    let header_line = lines.next().ok_or(CoreError::MissingHeader)??;
    let header: Header =
        serde_json::from_str(&header_line).map_err(|_| CoreError::MissingHeader)?;
    if header.version != RECORD_VERSION {
        return Err(CoreError::VersionMismatch {
            found: header.version,
            expected: RECORD_VERSION,
        });
    }
    let mut records = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line)?);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::AttackOutcome;

    fn outcome(id: &str, status: AttackStatus, queries: u64) -> AttackOutcome {
        AttackOutcome {
            example_id: id.into(),
            status,
            original_text: "good film".into(),
            final_text: "good film".into(),
            queries_used: queries,
            detector_queries: 0,
            constraint_report: None,
            edit_trace: Vec::new(),
        }
    }

    #[test]
    fn empty_sequence_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.jsonl");
        write_records(&[], &path).unwrap();
        let back = read_records(&path).unwrap();
        assert!(back.is_empty());
        // header only
        let content = std::fs::read_to_string(&path).unwrap();
        assert_eq!(content.lines().count(), 1);
    }

    #[test]
    fn seed_and_digest_survive_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.jsonl");
        let rec = ExperimentRecord::from_outcomes(
            "digest-abc",
            7,
            vec![outcome("e1", AttackStatus::Failed, 12)],
        );
        write_records(&[rec.clone()], &path).unwrap();
        let back = read_records(&path).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].seed, 7);
        assert_eq!(back[0].config_digest, "digest-abc");
        assert_eq!(back[0], rec);
    }

    #[test]
    fn order_preserved_and_reserialization_is_byte_stable() {
        let dir = tempfile::tempdir().unwrap();
        let path_a = dir.path().join("a.jsonl");
        let path_b = dir.path().join("b.jsonl");
        let r1 = ExperimentRecord::from_outcomes("d2", 2, vec![]);
        let r2 = ExperimentRecord::from_outcomes("d1", 1, vec![]);
        write_records(&[r1, r2], &path_a).unwrap();
        let back = read_records(&path_a).unwrap();
        assert_eq!(back[0].seed, 2);
        assert_eq!(back[1].seed, 1);
        write_records(&back, &path_b).unwrap();
        assert_eq!(
            std::fs::read(&path_a).unwrap(),
            std::fs::read(&path_b).unwrap()
        );
    }

    #[test]
    fn version_mismatch_is_explicit() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.jsonl");
        std::fs::write(&path, "{\"version\":99,\"kind\":\"experiment-records\"}\n").unwrap();
        match read_records(&path) {
            Err(CoreError::VersionMismatch { found, expected }) => {
                assert_eq!(found, 99);
                assert_eq!(expected, RECORD_VERSION);
            }
            other => panic!("expected version mismatch, got {other:?}"),
        }
    }

    #[test]
    fn metrics_match_hand_count() {
        let outcomes = vec![
            outcome("a", AttackStatus::Success, 10),
            outcome("b", AttackStatus::Failed, 30),
            outcome("c", AttackStatus::SkippedWrongPrediction, 1),
            outcome("d", AttackStatus::Success, 20),
        ];
        let m = recompute_metrics(&outcomes);
        assert!((m.original_accuracy - 0.75).abs() < 1e-12);
        assert!((m.after_attack_accuracy - 0.25).abs() < 1e-12);
        assert!((m.attack_success_rate - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.avg_queries - 20.0).abs() < 1e-12);
    }
}
