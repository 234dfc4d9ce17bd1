//! Per-example attack results.

use super::edits::{replay_edits, CandidateEdit};
use crate::constraints::ConstraintReport;
use serde::{Deserialize, Serialize};

/// How one example ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackStatus {
    /// The final text flips the endpoint label and satisfies the enabled
    /// constraints.
    Success,
    /// Search exhausted without an acceptable flip.
    Failed,
    /// The victim already misclassified the original; no attack attempted.
    SkippedWrongPrediction,
    /// A required hook was not configured for this family.
    SkippedUnavailable,
}

/// One example's trace through an attack run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackOutcome {
    pub example_id: String,
    pub status: AttackStatus,
    pub original_text: String,
    pub final_text: String,
    /// Victim endpoint queries spent on this example.
    pub queries_used: u64,
    /// Anomaly-detector queries (counted separately from victim queries).
    pub detector_queries: u64,
    /// Constraint report of the final text, when the attack got that far.
    pub constraint_report: Option<ConstraintReport>,
    /// Ordered edits whose replay on `original_text` reproduces
    /// `final_text`.
    pub edit_trace: Vec<CandidateEdit>,
}

impl AttackOutcome {
    pub fn skipped(example_id: &str, text: &str, queries_used: u64) -> Self {
        Self {
            example_id: example_id.to_string(),
            status: AttackStatus::SkippedWrongPrediction,
            original_text: text.to_string(),
            final_text: text.to_string(),
            queries_used,
            detector_queries: 0,
            constraint_report: None,
            edit_trace: Vec::new(),
        }
    }

    /// Replay the edit trace on the original text.
    pub fn replay(&self) -> String {
        replay_edits(&self.original_text, &self.edit_trace)
    }

    /// The trace-replay invariant: for success and failed outcomes the
    /// recorded final text equals the replayed trace.
    pub fn trace_is_consistent(&self) -> bool {
        self.replay() == self.final_text
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::edits::CharOp;

    #[test]
    fn replay_consistency_check() {
        let outcome = AttackOutcome {
            example_id: "e".into(),
            status: AttackStatus::Success,
            original_text: "the movie was good".into(),
            final_text: "the movie was godo".into(),
            queries_used: 4,
            detector_queries: 0,
            constraint_report: None,
            edit_trace: vec![CandidateEdit::Char {
                position: 3,
                op: CharOp::SwapAdjacent { index: 2 },
            }],
        };
        assert!(outcome.trace_is_consistent());
    }
}
