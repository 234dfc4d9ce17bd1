//! Soft hooks: grammar checking and fluency scoring. Both are pluggable;
//! when a hook is absent the corresponding constraint is reported as
//! skipped, never failed.

use super::{ConstraintError, Result};
use crate::core::tokenize;
use std::collections::{BTreeMap, BTreeSet};

/// Counts grammar errors in a text. The desk default counts out-of-lexicon
/// tokens; full checkers plug in behind the same trait.
pub trait GrammarChecker: Send + Sync {
    fn error_count(&self, text: &str) -> usize;
}

/// Desk-scale checker: every alphabetic token absent from the lexicon is one
/// error.
#[derive(Debug, Clone)]
pub struct LexiconGrammarChecker {
    vocabulary: BTreeSet<String>,
}

impl LexiconGrammarChecker {
    pub fn new<I: IntoIterator<Item = String>>(words: I) -> Self {
        Self {
            vocabulary: words.into_iter().map(|w| w.to_lowercase()).collect(),
        }
    }
}

impl GrammarChecker for LexiconGrammarChecker {
    fn error_count(&self, text: &str) -> usize {
        tokenize(text)
            .iter()
            .filter(|t| t.chars().any(char::is_alphabetic))
            .filter(|t| !self.vocabulary.contains(&t.to_lowercase()))
            .count()
    }
}

/// Absolute increase in grammar errors from `original` to `adversarial`;
/// negative when the candidate fixes errors.
pub fn grammar_error_increase(
    checker: &dyn GrammarChecker,
    original: &str,
    adversarial: &str,
) -> i64 {
    checker.error_count(adversarial) as i64 - checker.error_count(original) as i64
}

/// Fluency scorer hook.
pub trait PerplexityScorer: Send + Sync {
    fn perplexity(&self, text: &str) -> Result<f64>;
}

/// Add-one-smoothed bigram language model, trained on a corpus (typically
/// the train split). Perplexity is exp of the mean negative log probability
/// over the tokens, each conditioned on its predecessor (sentence-start for
/// the first).
#[derive(Debug, Clone)]
pub struct NgramPerplexity {
    bigram_counts: BTreeMap<(String, String), u64>,
    unigram_counts: BTreeMap<String, u64>,
    vocab_size: usize,
}

const BOS: &str = "<s>";

impl NgramPerplexity {
    pub fn train<'a, I: IntoIterator<Item = &'a str>>(texts: I) -> Self {
        let mut bigram_counts = BTreeMap::new();
        let mut unigram_counts: BTreeMap<String, u64> = BTreeMap::new();
        let mut vocab = BTreeSet::new();
        for text in texts {
            let tokens: Vec<String> = tokenize(text)
                .into_iter()
                .map(|t| t.to_lowercase())
                .collect();
            let mut prev = BOS.to_string();
            *unigram_counts.entry(prev.clone()).or_insert(0) += 1;
            for token in tokens {
                vocab.insert(token.clone());
                *bigram_counts
                    .entry((prev.clone(), token.clone()))
                    .or_insert(0) += 1;
                *unigram_counts.entry(token.clone()).or_insert(0) += 1;
                prev = token;
            }
        }
        Self {
            bigram_counts,
            unigram_counts,
            vocab_size: vocab.len().max(1),
        }
    }

    /// Model with an empty corpus over a declared vocabulary size; every
    /// token is equally likely (probability 1/V).
    pub fn uniform(vocab_size: usize) -> Self {
        Self {
            bigram_counts: BTreeMap::new(),
            unigram_counts: BTreeMap::new(),
            vocab_size: vocab_size.max(1),
        }
    }

    fn prob(&self, prev: &str, token: &str) -> f64 {
        let joint = self
            .bigram_counts
            .get(&(prev.to_string(), token.to_string()))
            .copied()
            .unwrap_or(0);
        let context = self.unigram_counts.get(prev).copied().unwrap_or(0);
        (joint as f64 + 1.0) / (context as f64 + self.vocab_size as f64)
    }
}

impl PerplexityScorer for NgramPerplexity {
    fn perplexity(&self, text: &str) -> Result<f64> {
        let tokens: Vec<String> = tokenize(text)
            .into_iter()
            .map(|t| t.to_lowercase())
            .collect();
        if tokens.is_empty() {
            return Err(ConstraintError::EmptyText);
        }
        let mut log_prob = 0.0;
        let mut prev = BOS.to_string();
        for token in &tokens {
            log_prob += self.prob(&prev, token).ln();
            prev = token.clone();
        }
        Ok((-log_prob / tokens.len() as f64).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_increase_counts_new_oov_tokens() {
        let checker = LexiconGrammarChecker::new(
            ["the", "movie", "was", "great", "fine"]
                .iter()
                .map(|s| s.to_string()),
        );
        assert_eq!(grammar_error_increase(&checker, "the movie was great", "the movie was great"), 0);
        assert_eq!(grammar_error_increase(&checker, "the movie was great", "the movie was graet"), 1);
        // candidate fixes a typo present in the original
        assert_eq!(grammar_error_increase(&checker, "the movie was graet", "the movie was great"), -1);
    }

    #[test]
    fn uniform_model_perplexity_is_vocab_size() {
        let scorer = NgramPerplexity::uniform(100);
        let ppl = scorer.perplexity("word").unwrap();
        assert!((ppl - 100.0).abs() < 1e-9);
    }

    #[test]
    fn in_domain_text_beats_shuffled_text() {
        let corpus = [
            "the movie was great",
            "the movie was fine",
            "the story was great",
            "the story was dull",
        ];
        let scorer = NgramPerplexity::train(corpus.iter().copied());
        let fluent = scorer.perplexity("the movie was great").unwrap();
        let shuffled = scorer.perplexity("great was the movie").unwrap();
        assert!(fluent < shuffled, "fluent {fluent} vs shuffled {shuffled}");
    }

    #[test]
    fn empty_text_is_an_error() {
        let scorer = NgramPerplexity::uniform(10);
        assert!(matches!(
            scorer.perplexity("  "),
            Err(ConstraintError::EmptyText)
        ));
    }
}
