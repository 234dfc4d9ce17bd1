//! Fill-in-the-blank suggestion hook: given left and right context, propose
//! ranked replacement tokens. The desk default is a bigram continuation
//! model trained on a corpus; masked language models plug in behind the
//! same trait.

use std::collections::BTreeMap;

use crate::core::tokenize;

/// Ranked fill-in candidates for a masked position.
pub trait FillInSuggester: Send + Sync {
    /// Top `k` candidates for the blank between `left` and `right`, ranked
    /// best first. May include the original token; callers filter.
    fn suggest(&self, left: &[String], right: &[String], k: usize) -> Vec<String>;
}

const BOS: &str = "<s>";
const EOS: &str = "</s>";

/// Bigram continuation model: candidates are scored by how well they chain
/// from the token on the left and into the token on the right.
#[derive(Debug, Clone, Default)]
pub struct NgramSuggester {
    /// prev -> (candidate -> count)
    forward: BTreeMap<String, BTreeMap<String, u64>>,
    /// next -> (candidate -> count)
    backward: BTreeMap<String, BTreeMap<String, u64>>,
}

impl NgramSuggester {
    pub fn train<'a, I: IntoIterator<Item = &'a str>>(texts: I) -> Self {
        let mut forward: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
        let mut backward: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
        for text in texts {
            let mut tokens: Vec<String> = vec![BOS.to_string()];
            tokens.extend(tokenize(text).into_iter().map(|t| t.to_lowercase()));
            tokens.push(EOS.to_string());
            for pair in tokens.windows(2) {
                *forward
                    .entry(pair[0].clone())
                    .or_default()
                    .entry(pair[1].clone())
                    .or_insert(0) += 1;
                *backward
                    .entry(pair[1].clone())
                    .or_default()
                    .entry(pair[0].clone())
                    .or_insert(0) += 1;
            }
        }
        Self { forward, backward }
    }
}

impl FillInSuggester for NgramSuggester {
    fn suggest(&self, left: &[String], right: &[String], k: usize) -> Vec<String> {
        let prev = left
            .last()
            .map(|t| t.to_lowercase())
            .unwrap_or_else(|| BOS.to_string());
        let next = right
            .first()
            .map(|t| t.to_lowercase())
            .unwrap_or_else(|| EOS.to_string());

        let forward = self.forward.get(&prev);
        let backward = self.backward.get(&next);

        let mut scores: BTreeMap<&String, (u64, u64)> = BTreeMap::new();
        if let Some(f) = forward {
            for (cand, c) in f {
                scores.entry(cand).or_insert((0, 0)).0 = *c;
            }
        }
        if let Some(b) = backward {
            for (cand, c) in b {
                scores.entry(cand).or_insert((0, 0)).1 = *c;
            }
        }

        let mut ranked: Vec<(&String, u64)> = scores
            .into_iter()
            .filter(|(cand, _)| cand.as_str() != BOS && cand.as_str() != EOS)
            .map(|(cand, (f, b))| (cand, f + b))
            .collect();
        // stable rank: score desc, then lexicographic for determinism
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        ranked.into_iter().take(k).map(|(c, _)| c.clone()).collect()
    }
}

/// Scripted suggester for tests: always proposes the same candidates.
#[derive(Debug, Clone)]
pub struct FixedSuggester(pub Vec<String>);

impl FillInSuggester for FixedSuggester {
    fn suggest(&self, _left: &[String], _right: &[String], k: usize) -> Vec<String> {
        self.0.iter().take(k).cloned().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus_suggester() -> NgramSuggester {
        NgramSuggester::train([
            "the movie was great",
            "the movie was fine",
            "the movie was fine",
            "the story was dull",
        ])
    }

    #[test]
    fn ranks_by_contextual_count() {
        let s = corpus_suggester();
        let left = vec!["was".to_string()];
        let right = vec![];
        let suggestions = s.suggest(&left, &right, 3);
        // "fine" seen twice after "was", ahead of "great"/"dull"
        assert_eq!(suggestions[0], "fine");
    }

    #[test]
    fn respects_k() {
        let s = corpus_suggester();
        let left = vec!["the".to_string()];
        assert!(s.suggest(&left, &[], 1).len() <= 1);
    }

    #[test]
    fn unseen_context_yields_empty() {
        let s = corpus_suggester();
        let left = vec!["zzz".to_string()];
        let right = vec!["qqq".to_string()];
        assert!(s.suggest(&left, &right, 5).is_empty());
    }

    #[test]
    fn right_context_contributes() {
        let s = NgramSuggester::train(["a b c", "a x c", "a x c"]);
        // blank between "a" and "c": x seen twice, b once
        let out = s.suggest(&["a".to_string()], &["c".to_string()], 2);
        assert_eq!(out[0], "x");
        assert_eq!(out[1], "b");
    }
}
