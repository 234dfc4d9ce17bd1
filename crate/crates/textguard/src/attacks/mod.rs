//! Black-box attack engines at character, word, and sentence granularity,
//! plus the anomaly-constraint gate and the adaptive (expectation over
//! transformation) feedback wrapper.

mod edits;
mod engines;
mod eot;
mod importance;
mod outcome;
mod runner;
mod spec;
pub mod testing;

pub use edits::{replay_edits, CandidateEdit, CharOp};
pub use engines::{char_attack, paraphrase_attack, run_example, word_mlm_attack, word_synonym_attack};
pub use eot::{AdaptiveWrapConfig, EotEndpoint};
pub use importance::{rank_word_importance, ImportanceMode, MASK_TOKEN};
pub use outcome::{AttackOutcome, AttackStatus};
pub use runner::{run_attack, run_attack_with_verdict};
pub use spec::{AttackFamily, AttackSpec, CountingAnomalyScorer, QueryBudget};
