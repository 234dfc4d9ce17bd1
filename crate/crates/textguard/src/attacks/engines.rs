//! The greedy attack engines. All four share the same skeleton: check the
//! victim is right, rank word importance, then walk the ranking trying
//! constraint-satisfying candidates until the label flips or the budget
//! runs out; a flipping candidate that fails the full constraint check
//! (anomaly included) is discarded and the search continues.

use super::edits::{CandidateEdit, CharOp};
use super::importance::{rank_word_importance, ImportanceMode};
use super::outcome::{AttackOutcome, AttackStatus};
use super::spec::{AttackFamily, AttackSpec};
use crate::constraints::ConstraintReport;
use crate::core::{detokenize, tokenize, word_positions, TextExample};
use crate::victim::{Prediction, TextClassifierEndpoint};
use rand::Rng;
use rand_chacha::ChaCha12Rng;

/// Budgeted query issuing for one example.
struct SearchCtx<'a> {
    endpoint: &'a dyn TextClassifierEndpoint,
    premise: Option<&'a str>,
    budget: u64,
    queries: u64,
}

impl<'a> SearchCtx<'a> {
    fn new(endpoint: &'a dyn TextClassifierEndpoint, premise: Option<&'a str>, budget: u64) -> Self {
        Self {
            endpoint,
            premise,
            budget,
            queries: 0,
        }
    }

    fn cost(&self) -> u64 {
        self.endpoint.query_cost()
    }

    /// `None` once the budget cannot cover another query.
    fn query(&mut self, text: &str) -> Option<Prediction> {
        if self.queries + self.cost() > self.budget {
            return None;
        }
        self.queries += self.cost();
        Some(self.endpoint.query(self.premise, text))
    }

    fn can_afford(&self, queries: u64) -> bool {
        self.queries + queries * self.cost() <= self.budget
    }
}

fn check_intermediate(spec: &AttackSpec, example: &TextExample, text: &str) -> ConstraintReport {
    if spec.strict_anomaly && spec.constraints.anomaly_enabled() {
        spec.constraints.check(example, text)
    } else {
        spec.constraints.check_classic(example, text)
    }
}

struct RunState {
    tokens: Vec<String>,
    gold_score: f64,
    trace: Vec<CandidateEdit>,
}

enum StepVerdict {
    /// Flip found and fully admissible; the state holds the final tokens.
    Success(ConstraintReport),
    /// Keep walking the ranking.
    Continue,
    /// Budget exhausted mid-step.
    OutOfBudget,
}

/// Evaluate one position's candidate set; shared by all word-granular
/// families. A candidate is `(edit, candidate_tokens)`.
fn evaluate_candidates(
    spec: &AttackSpec,
    example: &TextExample,
    ctx: &mut SearchCtx<'_>,
    state: &mut RunState,
    gold_index: usize,
    candidates: Vec<(CandidateEdit, Vec<String>)>,
) -> StepVerdict {
    let mut best: Option<(CandidateEdit, Vec<String>, f64)> = None;
    for (edit, cand_tokens) in candidates {
        let cand_text = detokenize(&cand_tokens);
        if cand_text == detokenize(&state.tokens) {
            continue;
        }
        if !check_intermediate(spec, example, &cand_text).pass {
            continue;
        }
        let Some(pred) = ctx.query(&cand_text) else {
            return StepVerdict::OutOfBudget;
        };
        if pred.label != example.gold_label {
            // candidate flips: admissible only if the full check passes
            let report = spec.constraints.check(example, &cand_text);
            if report.pass {
                state.trace.push(edit);
                state.tokens = cand_tokens;
                return StepVerdict::Success(report);
            }
            // rejected (e.g. anomaly ceiling): discard and keep searching
            continue;
        }
        let score = pred.scores.prob(gold_index);
        let drop = state.gold_score - score;
        if drop > 0.0 && best.as_ref().map(|(_, _, s)| score < *s).unwrap_or(true) {
            best = Some((edit, cand_tokens, score));
        }
    }
    if let Some((edit, tokens, score)) = best {
        state.trace.push(edit);
        state.tokens = tokens;
        state.gold_score = score;
    }
    StepVerdict::Continue
}

fn finish(
    spec: &AttackSpec,
    example: &TextExample,
    ctx: &SearchCtx<'_>,
    state: RunState,
    status: AttackStatus,
    report: Option<ConstraintReport>,
    detector_base: u64,
) -> AttackOutcome {
    let final_text = detokenize(&state.tokens);
    let report = report.or_else(|| Some(spec.constraints.check(example, &final_text)));
    AttackOutcome {
        example_id: example.id.clone(),
        status,
        original_text: example.text.clone(),
        final_text,
        queries_used: ctx.queries,
        detector_queries: spec.detector_queries() - detector_base,
        constraint_report: report,
        edit_trace: state.trace,
    }
}

fn random_letter(rng: &mut ChaCha12Rng, exclude: Option<char>) -> char {
    loop {
        let ch = (b'a' + rng.gen_range(0..26u8)) as char;
        if Some(ch) != exclude {
            return ch;
        }
    }
}

/// The four character edits for one word, positions and letters drawn from
/// the stream.
fn char_ops_for_word(word: &str, rng: &mut ChaCha12Rng) -> Vec<CharOp> {
    let len = word.chars().count();
    if len == 0 {
        return Vec::new();
    }
    let chars: Vec<char> = word.chars().collect();
    let mut ops = Vec::with_capacity(4);
    let sub_idx = rng.gen_range(0..len);
    ops.push(CharOp::SubstituteChar {
        index: sub_idx,
        ch: random_letter(rng, Some(chars[sub_idx])),
    });
    ops.push(CharOp::InsertChar {
        index: rng.gen_range(0..=len),
        ch: random_letter(rng, None),
    });
    if len >= 2 {
        ops.push(CharOp::DeleteChar {
            index: rng.gen_range(0..len),
        });
        let swap_idx = rng.gen_range(0..len - 1);
        if chars[swap_idx] != chars[swap_idx + 1] {
            ops.push(CharOp::SwapAdjacent { index: swap_idx });
        }
    }
    ops
}

/// Shared skeleton: initial correctness probe plus importance ranking.
/// Returns `Err(outcome)` when the run ends before the greedy walk.
#[allow(clippy::type_complexity)]
fn begin_attack<'a>(
    spec: &AttackSpec,
    endpoint: &'a dyn TextClassifierEndpoint,
    example: &'a TextExample,
    mode: ImportanceMode,
    rank: bool,
) -> Result<(SearchCtx<'a>, RunState, usize, Vec<usize>, u64), Box<AttackOutcome>> {
    let gold_index = endpoint
        .label_set()
        .iter()
        .position(|l| *l == example.gold_label)
        .unwrap_or_else(|| panic!("gold label {:?} unknown to endpoint", example.gold_label));
    let detector_base = spec.detector_queries();
    let budget = spec.query_budget.for_text(&example.text);
    let mut ctx = SearchCtx::new(endpoint, example.premise.as_deref(), budget);

    let Some(initial) = ctx.query(&example.text) else {
        return Err(Box::new(AttackOutcome {
            example_id: example.id.clone(),
            status: AttackStatus::Failed,
            original_text: example.text.clone(),
            final_text: example.text.clone(),
            queries_used: ctx.queries,
            detector_queries: 0,
            constraint_report: None,
            edit_trace: Vec::new(),
        }));
    };
    if initial.label != example.gold_label {
        return Err(Box::new(AttackOutcome::skipped(
            &example.id,
            &example.text,
            ctx.queries,
        )));
    }

    let tokens = tokenize(&example.text);
    let positions = word_positions(&tokens);
    let state = RunState {
        gold_score: initial.scores.prob(gold_index),
        tokens,
        trace: Vec::new(),
    };

    let order = if rank {
        let rank_cost = if positions.len() == 1 { 0 } else { positions.len() as u64 };
        if !ctx.can_afford(rank_cost) {
            let outcome = finish(
                spec,
                example,
                &ctx,
                state,
                AttackStatus::Failed,
                None,
                detector_base,
            );
            return Err(Box::new(outcome));
        }
        let order = rank_word_importance(endpoint, example, gold_index, mode);
        ctx.queries += rank_cost * ctx.cost();
        order
    } else {
        Vec::new()
    };

    Ok((ctx, state, gold_index, order, detector_base))
}

/// Character-level greedy attack: per word (in importance order) try the
/// four edit ops and keep the one with the largest gold-score drop; one
/// edit per word.
pub fn char_attack(
    spec: &AttackSpec,
    endpoint: &dyn TextClassifierEndpoint,
    example: &TextExample,
    rng: &mut ChaCha12Rng,
) -> AttackOutcome {
    debug_assert_eq!(spec.family, AttackFamily::CharEdit);
    let (mut ctx, mut state, gold_index, order, detector_base) =
        match begin_attack(spec, endpoint, example, ImportanceMode::Deletion, true) {
            Ok(x) => x,
            Err(outcome) => return *outcome,
        };

    for pos in order {
        let word = state.tokens[pos].clone();
        let candidates: Vec<(CandidateEdit, Vec<String>)> = char_ops_for_word(&word, rng)
            .into_iter()
            .filter_map(|op| {
                op.apply(&word).map(|updated| {
                    let mut cand = state.tokens.clone();
                    cand[pos] = updated;
                    (CandidateEdit::Char { position: pos, op }, cand)
                })
            })
            .collect();
        match evaluate_candidates(spec, example, &mut ctx, &mut state, gold_index, candidates) {
            StepVerdict::Success(report) => {
                return finish(
                    spec,
                    example,
                    &ctx,
                    state,
                    AttackStatus::Success,
                    Some(report),
                    detector_base,
                );
            }
            StepVerdict::OutOfBudget => break,
            StepVerdict::Continue => {}
        }
    }
    finish(spec, example, &ctx, state, AttackStatus::Failed, None, detector_base)
}

/// Word-substitution greedy attack over a synonym lexicon.
pub fn word_synonym_attack(
    spec: &AttackSpec,
    endpoint: &dyn TextClassifierEndpoint,
    example: &TextExample,
) -> AttackOutcome {
    debug_assert_eq!(spec.family, AttackFamily::WordSynonym);
    let Some(synonyms) = spec.synonyms.clone() else {
        return unavailable(spec, example);
    };
    let (mut ctx, mut state, gold_index, order, detector_base) =
        match begin_attack(spec, endpoint, example, ImportanceMode::Deletion, true) {
            Ok(x) => x,
            Err(outcome) => return *outcome,
        };

    for pos in order {
        let word = state.tokens[pos].clone();
        let candidates: Vec<(CandidateEdit, Vec<String>)> = synonyms
            .synonyms(&word)
            .into_iter()
            .map(|replacement| {
                let mut cand = state.tokens.clone();
                cand[pos] = replacement.clone();
                (CandidateEdit::Word { position: pos, replacement }, cand)
            })
            .collect();
        match evaluate_candidates(spec, example, &mut ctx, &mut state, gold_index, candidates) {
            StepVerdict::Success(report) => {
                return finish(
                    spec,
                    example,
                    &ctx,
                    state,
                    AttackStatus::Success,
                    Some(report),
                    detector_base,
                );
            }
            StepVerdict::OutOfBudget => break,
            StepVerdict::Continue => {}
        }
    }
    finish(spec, example, &ctx, state, AttackStatus::Failed, None, detector_base)
}

/// Word-substitution greedy attack with fill-in suggestions as candidates:
/// the masked position's top-k suggester fills, minus the original token.
pub fn word_mlm_attack(
    spec: &AttackSpec,
    endpoint: &dyn TextClassifierEndpoint,
    example: &TextExample,
) -> AttackOutcome {
    debug_assert_eq!(spec.family, AttackFamily::WordMlm);
    let Some(suggester) = spec.suggester.clone() else {
        return unavailable(spec, example);
    };
    let (mut ctx, mut state, gold_index, order, detector_base) =
        match begin_attack(spec, endpoint, example, ImportanceMode::Mask, true) {
            Ok(x) => x,
            Err(outcome) => return *outcome,
        };

    for pos in order {
        let original = state.tokens[pos].to_lowercase();
        let left = state.tokens[..pos].to_vec();
        let right = state.tokens[pos + 1..].to_vec();
        let mut seen = std::collections::BTreeSet::new();
        let candidates: Vec<(CandidateEdit, Vec<String>)> = suggester
            .suggest(&left, &right, spec.mlm_top_k)
            .into_iter()
            .filter(|c| c.to_lowercase() != original && seen.insert(c.to_lowercase()))
            .map(|replacement| {
                let mut cand = state.tokens.clone();
                cand[pos] = replacement.clone();
                (CandidateEdit::Word { position: pos, replacement }, cand)
            })
            .collect();
        match evaluate_candidates(spec, example, &mut ctx, &mut state, gold_index, candidates) {
            StepVerdict::Success(report) => {
                return finish(
                    spec,
                    example,
                    &ctx,
                    state,
                    AttackStatus::Success,
                    Some(report),
                    detector_base,
                );
            }
            StepVerdict::OutOfBudget => break,
            StepVerdict::Continue => {}
        }
    }
    finish(spec, example, &ctx, state, AttackStatus::Failed, None, detector_base)
}

/// Sentence-level attack: up to `paraphrase_count` full-sentence candidates
/// from the paraphrase hook, first admissible flip wins.
pub fn paraphrase_attack(
    spec: &AttackSpec,
    endpoint: &dyn TextClassifierEndpoint,
    example: &TextExample,
) -> AttackOutcome {
    debug_assert_eq!(spec.family, AttackFamily::SentenceParaphrase);
    let Some(paraphraser) = spec.paraphraser.clone() else {
        return unavailable(spec, example);
    };
    let (mut ctx, mut state, _gold_index, _order, detector_base) =
        match begin_attack(spec, endpoint, example, ImportanceMode::Deletion, false) {
            Ok(x) => x,
            Err(outcome) => return *outcome,
        };

    for variant in 0..spec.paraphrase_count {
        let Some(raw) = paraphraser.paraphrase(&example.text, variant) else {
            continue;
        };
        // canonical surface form, so the recorded text, the constraint
        // check, and the trace replay all agree byte for byte
        let candidate = detokenize(&tokenize(&raw));
        if candidate.trim().is_empty() || candidate == example.text {
            continue;
        }
        if !check_intermediate(spec, example, &candidate).pass {
            continue;
        }
        let Some(pred) = ctx.query(&candidate) else {
            break;
        };
        if pred.label != example.gold_label {
            let report = spec.constraints.check(example, &candidate);
            if report.pass {
                state.trace.push(CandidateEdit::Rewrite {
                    text: candidate.clone(),
                });
                state.tokens = tokenize(&candidate);
                return finish(
                    spec,
                    example,
                    &ctx,
                    state,
                    AttackStatus::Success,
                    Some(report),
                    detector_base,
                );
            }
        }
    }
    finish(spec, example, &ctx, state, AttackStatus::Failed, None, detector_base)
}

fn unavailable(spec: &AttackSpec, example: &TextExample) -> AttackOutcome {
    log::warn!(
        "attack family {:?} missing its hook; skipping {}",
        spec.family,
        example.id
    );
    AttackOutcome {
        example_id: example.id.clone(),
        status: AttackStatus::SkippedUnavailable,
        original_text: example.text.clone(),
        final_text: example.text.clone(),
        queries_used: 0,
        detector_queries: 0,
        constraint_report: None,
        edit_trace: Vec::new(),
    }
}

/// Dispatch one example to its family engine.
pub fn run_example(
    spec: &AttackSpec,
    endpoint: &dyn TextClassifierEndpoint,
    example: &TextExample,
    rng: &mut ChaCha12Rng,
) -> AttackOutcome {
    match spec.family {
        AttackFamily::CharEdit => char_attack(spec, endpoint, example, rng),
        AttackFamily::WordSynonym => word_synonym_attack(spec, endpoint, example),
        AttackFamily::WordMlm => word_mlm_attack(spec, endpoint, example),
        AttackFamily::SentenceParaphrase => paraphrase_attack(spec, endpoint, example),
    }
}
