//! Word importance ranking: probe each word position once and sort by how
//! much the gold-class score drops without it.

use crate::core::{detokenize, tokenize, TextExample};
use crate::victim::TextClassifierEndpoint;

/// How a word is suppressed for its importance probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImportanceMode {
    /// Remove the word (character and synonym attacks).
    Deletion,
    /// Replace it with a mask placeholder (fill-in attacks).
    Mask,
}

pub const MASK_TOKEN: &str = "[MASK]";

/// Word positions of `example.text` sorted by descending importance: the
/// positions whose suppression leaves the lowest gold score come first;
/// ties break toward the earlier position. Costs exactly one endpoint query
/// per word position.
pub fn rank_word_importance(
    endpoint: &dyn TextClassifierEndpoint,
    example: &TextExample,
    gold_index: usize,
    mode: ImportanceMode,
) -> Vec<usize> {
    let tokens = tokenize(&example.text);
    let positions: Vec<usize> = tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| t.chars().any(char::is_alphanumeric))
        .map(|(i, _)| i)
        .collect();
    if positions.len() == 1 {
        return positions;
    }

    let mut scored: Vec<(usize, f64)> = Vec::with_capacity(positions.len());
    for &pos in &positions {
        let mut probe = tokens.clone();
        match mode {
            ImportanceMode::Deletion => {
                probe.remove(pos);
            }
            ImportanceMode::Mask => {
                probe[pos] = MASK_TOKEN.to_string();
            }
        }
        let text = if probe.is_empty() {
            MASK_TOKEN.to_string()
        } else {
            detokenize(&probe)
        };
        let prediction = endpoint.query(example.premise.as_deref(), &text);
        scored.push((pos, prediction.scores.prob(gold_index)));
    }

    // lowest remaining gold score = most important; stable sort keeps
    // earlier positions first on ties
    scored.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    scored.into_iter().map(|(pos, _)| pos).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::testing::KeywordVictim;

    #[test]
    fn single_word_text_ranks_trivially() {
        let victim = KeywordVictim::new(["good"]);
        let example = TextExample::new("e", "good", "pos");
        let order = rank_word_importance(&victim, &example, 0, ImportanceMode::Deletion);
        assert_eq!(order, vec![0]);
        assert_eq!(victim.query_count(), 0);
    }

    #[test]
    fn keyword_is_ranked_first() {
        let victim = KeywordVictim::new(["good"]);
        let example = TextExample::new("e", "a good day", "pos");
        let order = rank_word_importance(&victim, &example, 0, ImportanceMode::Deletion);
        assert_eq!(order[0], 1, "position of 'good' must lead");
        // one query per word
        assert_eq!(victim.query_count(), 3);
    }

    #[test]
    fn ties_break_toward_earlier_positions() {
        let victim = KeywordVictim::new(["good"]);
        let example = TextExample::new("e", "a plain day", "pos");
        let order = rank_word_importance(&victim, &example, 0, ImportanceMode::Deletion);
        // nothing matters: original order preserved
        assert_eq!(order, vec![0, 1, 2]);
    }

    #[test]
    fn mask_mode_issues_one_query_per_word() {
        let victim = KeywordVictim::new(["good"]);
        let example = TextExample::new("e", "a good day today", "pos");
        let order = rank_word_importance(&victim, &example, 0, ImportanceMode::Mask);
        assert_eq!(victim.query_count(), 4);
        assert_eq!(order[0], 1);
    }
}
