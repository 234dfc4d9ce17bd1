//! Spelling restoration: the first stage of every randomization process.

use super::lexicon::Lexicon;
use crate::constraints::levenshtein;
use crate::core::{detokenize, tokenize};

/// Repairs misspelled tokens. Desk default is lexicon-nearest-neighbor;
/// contextual checkers plug in behind the same trait.
pub trait SpellingRestorer: Send + Sync {
    fn restore(&self, text: &str) -> String;
}

/// Replace each out-of-lexicon token by the nearest in-lexicon token within
/// edit distance 2; ties break by corpus frequency, then lexicographic
/// order. Tokens with no neighbor in range pass through unchanged.
#[derive(Debug, Clone)]
pub struct LexiconRestorer {
    lexicon: Lexicon,
}

impl LexiconRestorer {
    pub fn new(lexicon: Lexicon) -> Self {
        Self { lexicon }
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    fn best_repair(&self, token: &str) -> Option<String> {
        let lower = token.to_lowercase();
        // (distance, -frequency, word) minimized
        let mut best: Option<(usize, u64, &String)> = None;
        for word in self.lexicon.words() {
            // cheap length filter before the DP
            if word.chars().count().abs_diff(lower.chars().count()) > 2 {
                continue;
            }
            let d = levenshtein(&lower, word);
            if d == 0 || d > 2 {
                continue;
            }
            let freq = self.lexicon.frequency(word);
            let better = match &best {
                None => true,
                Some((bd, bf, bw)) => {
                    d < *bd || (d == *bd && (freq > *bf || (freq == *bf && word < *bw)))
                }
            };
            if better {
                best = Some((d, freq, word));
            }
        }
        best.map(|(_, _, w)| w.clone())
    }
}

impl SpellingRestorer for LexiconRestorer {
    fn restore(&self, text: &str) -> String {
        let tokens = tokenize(text);
        let restored: Vec<String> = tokens
            .into_iter()
            .map(|t| {
                if !t.chars().any(char::is_alphabetic) || self.lexicon.contains(&t) {
                    t
                } else {
                    self.best_repair(&t).unwrap_or(t)
                }
            })
            .collect();
        detokenize(&restored)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn restorer() -> LexiconRestorer {
        let mut lexicon = Lexicon::from_texts([
            "great movie", "great film", "the story was fine", "a quiet night",
        ]);
        lexicon.absorb(["good".to_string()]);
        LexiconRestorer::new(lexicon)
    }

    #[test]
    fn repairs_distance_one_typo() {
        let r = restorer();
        assert_eq!(r.restore("graet movie"), "great movie");
    }

    #[test]
    fn in_lexicon_text_is_unchanged() {
        let r = restorer();
        assert_eq!(r.restore("great movie"), "great movie");
    }

    #[test]
    fn hopeless_token_passes_through() {
        let r = restorer();
        assert_eq!(r.restore("zzxqvop movie"), "zzxqvop movie");
    }

    #[test]
    fn ties_break_by_frequency_then_lexicographic() {
        // "gine" is distance 1 from both "fine" and "wine"; with equal
        // frequencies the lexicographically smaller word wins
        let lexicon = Lexicon::from_texts(["fine wine"]);
        let r = LexiconRestorer::new(lexicon);
        assert_eq!(r.restore("gine"), "fine");
        // frequency dominates the lexicographic tie-break
        let lexicon = Lexicon::from_texts(["fine wine wine wine"]);
        let r = LexiconRestorer::new(lexicon);
        assert_eq!(r.restore("gine"), "wine");
        // a closer candidate beats a more frequent farther one
        let lexicon = Lexicon::from_texts(["film fine fine fine"]);
        let r = LexiconRestorer::new(lexicon);
        assert_eq!(r.restore("fila"), "film");
    }
}
