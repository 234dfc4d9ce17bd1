//! Candidate edits and trace replay. An attack outcome carries the ordered
//! edits it applied; replaying them on the original text must reproduce the
//! final text byte for byte.

use crate::core::{detokenize, tokenize};
use serde::{Deserialize, Serialize};

/// One character-level operation inside a word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "op")]
pub enum CharOp {
    SubstituteChar { index: usize, ch: char },
    InsertChar { index: usize, ch: char },
    DeleteChar { index: usize },
    SwapAdjacent { index: usize },
}

impl CharOp {
    /// Apply to a single word; `None` when out of bounds.
    pub fn apply(&self, word: &str) -> Option<String> {
        let mut chars: Vec<char> = word.chars().collect();
        match *self {
            CharOp::SubstituteChar { index, ch } => {
                if index >= chars.len() {
                    return None;
                }
                chars[index] = ch;
            }
            CharOp::InsertChar { index, ch } => {
                if index > chars.len() {
                    return None;
                }
                chars.insert(index, ch);
            }
            CharOp::DeleteChar { index } => {
                if index >= chars.len() || chars.len() == 1 {
                    return None;
                }
                chars.remove(index);
            }
            CharOp::SwapAdjacent { index } => {
                if index + 1 >= chars.len() {
                    return None;
                }
                chars.swap(index, index + 1);
            }
        }
        Some(chars.into_iter().collect())
    }

    /// Worst-case Levenshtein delta introduced by this op.
    pub fn max_levenshtein_delta(&self) -> usize {
        match self {
            CharOp::SwapAdjacent { .. } => 2,
            _ => 1,
        }
    }
}

/// One edit applied by an attack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CandidateEdit {
    /// Character-level edit inside the token at `position`.
    Char { position: usize, op: CharOp },
    /// Token replacement at `position`.
    Word { position: usize, replacement: String },
    /// Whole-sentence rewrite (paraphrase attacks).
    Rewrite { text: String },
}

/// Replay `edits` on `original`, in order.
pub fn replay_edits(original: &str, edits: &[CandidateEdit]) -> String {
    let mut tokens = tokenize(original);
    for edit in edits {
        match edit {
            CandidateEdit::Char { position, op } => {
                if let Some(word) = tokens.get(*position) {
                    if let Some(updated) = op.apply(word) {
                        tokens[*position] = updated;
                    }
                }
            }
            CandidateEdit::Word {
                position,
                replacement,
            } => {
                if *position < tokens.len() {
                    tokens[*position] = replacement.clone();
                }
            }
            CandidateEdit::Rewrite { text } => {
                tokens = tokenize(text);
            }
        }
    }
    detokenize(&tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn char_ops_apply_in_bounds() {
        assert_eq!(
            CharOp::SubstituteChar { index: 1, ch: 'x' }.apply("good"),
            Some("gxod".to_string())
        );
        assert_eq!(
            CharOp::InsertChar { index: 4, ch: 'z' }.apply("good"),
            Some("goodz".to_string())
        );
        assert_eq!(
            CharOp::DeleteChar { index: 0 }.apply("good"),
            Some("ood".to_string())
        );
        assert_eq!(
            CharOp::SwapAdjacent { index: 2 }.apply("good"),
            Some("godo".to_string())
        );
        // swapping equal characters is a no-op output
        assert_eq!(
            CharOp::SwapAdjacent { index: 1 }.apply("good"),
            Some("good".to_string())
        );
        // never empty a word
        assert_eq!(CharOp::DeleteChar { index: 0 }.apply("a"), None);
        assert_eq!(CharOp::SwapAdjacent { index: 3 }.apply("good"), None);
    }

    #[test]
    fn char_edit_levenshtein_delta_is_at_most_two() {
        use crate::constraints::levenshtein;
        let word = "rehearsal";
        let ops = [
            CharOp::SubstituteChar { index: 3, ch: 'x' },
            CharOp::InsertChar { index: 0, ch: 'q' },
            CharOp::DeleteChar { index: 5 },
            CharOp::SwapAdjacent { index: 2 },
        ];
        for op in ops {
            let edited = op.apply(word).unwrap();
            let d = levenshtein(word, &edited);
            assert!(d <= op.max_levenshtein_delta(), "{op:?} moved {d}");
        }
    }

    #[test]
    fn replay_reproduces_mixed_trace() {
        let original = "the movie was good";
        let edits = vec![
            CandidateEdit::Word {
                position: 3,
                replacement: "fine".into(),
            },
            CandidateEdit::Char {
                position: 1,
                op: CharOp::SwapAdjacent { index: 0 },
            },
        ];
        assert_eq!(replay_edits(original, &edits), "the omvie was fine");
    }

    #[test]
    fn rewrite_replaces_everything() {
        let edits = vec![CandidateEdit::Rewrite {
            text: "a complete paraphrase".into(),
        }];
        assert_eq!(replay_edits("anything at all", &edits), "a complete paraphrase");
    }

    #[test]
    fn edit_serialization_round_trips() {
        let edits = vec![
            CandidateEdit::Char {
                position: 2,
                op: CharOp::InsertChar { index: 1, ch: 'q' },
            },
            CandidateEdit::Word {
                position: 0,
                replacement: "swap".into(),
            },
        ];
        let json = serde_json::to_string(&edits).unwrap();
        let back: Vec<CandidateEdit> = serde_json::from_str(&json).unwrap();
        assert_eq!(edits, back);
    }
}
