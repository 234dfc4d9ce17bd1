//! Sentence embedding hook used by the semantic-similarity constraint.
//!
//! The desk-scale default embeds a sentence as the frequency-weighted mean
//! of static per-word vectors derived deterministically from a stable hash
//! of the word. Heavier sentence encoders plug in behind the same trait.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::core::tokenize;

/// Deterministic sentence embedding: equal texts must give equal vectors.
pub trait SemanticEncoder: Send + Sync {
    fn dim(&self) -> usize;
    fn embed(&self, text: &str) -> Vec<f64>;
}

/// FNV-1a 64-bit. Stable across platforms and releases, unlike the std
/// hasher.
pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mean of hash-derived static word vectors with smooth inverse-frequency
/// weighting: common words contribute less, so content words dominate the
/// sentence direction.
#[derive(Debug, Clone)]
pub struct HashedWordVecEncoder {
    dim: usize,
    /// word -> corpus count, for the frequency weighting; empty means
    /// uniform weights.
    frequencies: BTreeMap<String, u64>,
    total_count: u64,
    sif_a: f64,
}

impl HashedWordVecEncoder {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            frequencies: BTreeMap::new(),
            total_count: 0,
            sif_a: 1e-3,
        }
    }

    /// Attach corpus frequencies (token -> count) for inverse-frequency
    /// weighting.
    pub fn with_frequencies(mut self, frequencies: BTreeMap<String, u64>) -> Self {
        self.total_count = frequencies.values().sum();
        self.frequencies = frequencies;
        self
    }

    pub fn shared(self) -> Arc<dyn SemanticEncoder> {
        Arc::new(self)
    }

    fn word_vector(&self, word: &str) -> Vec<f64> {
        let mut state = fnv1a(word.as_bytes());
        let mut v: Vec<f64> = (0..self.dim)
            .map(|_| {
                // uniform in [-1, 1)
                let raw = splitmix64(&mut state);
                (raw >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
            })
            .collect();
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            for x in &mut v {
                *x /= norm;
            }
        }
        v
    }

    fn weight(&self, word: &str) -> f64 {
        if self.total_count == 0 {
            return 1.0;
        }
        let p = self
            .frequencies
            .get(word)
            .map(|c| *c as f64 / self.total_count as f64)
            .unwrap_or(0.0);
        self.sif_a / (self.sif_a + p)
    }
}

impl SemanticEncoder for HashedWordVecEncoder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, text: &str) -> Vec<f64> {
        let tokens = tokenize(text);
        let mut acc = vec![0.0; self.dim];
        if tokens.is_empty() {
            return acc;
        }
        for token in &tokens {
            let word = token.to_lowercase();
            let w = self.weight(&word);
            for (a, x) in acc.iter_mut().zip(self.word_vector(&word)) {
                *a += w * x;
            }
        }
        let n = tokens.len() as f64;
        for a in &mut acc {
            *a /= n;
        }
        acc
    }
}

/// Word polarity induced from conjunction patterns, with no label
/// supervision: words joined by "and" tend to share polarity, words joined
/// by "but" tend to oppose. A signed co-occurrence graph over those pairs
/// is 2-colored by power iteration; the dominant eigenvector's sign is the
/// polarity and its magnitude the confidence.
#[derive(Debug, Clone, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PolarityLexicon {
    scores: BTreeMap<String, f64>,
}

impl PolarityLexicon {
    pub fn induce<'a, I: IntoIterator<Item = &'a str>>(texts: I) -> Self {
        let mut edges: BTreeMap<(String, String), f64> = BTreeMap::new();
        let mut add_edge = |a: &str, b: &str, sign: f64| {
            if a == b || !a.chars().any(char::is_alphabetic) || !b.chars().any(char::is_alphabetic)
            {
                return;
            }
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            *edges.entry((a.to_string(), b.to_string())).or_insert(0.0) += sign;
        };

        for text in texts {
            let tokens: Vec<String> = tokenize(text)
                .into_iter()
                .map(|t| t.to_lowercase())
                .collect();
            for i in 0..tokens.len() {
                match tokens[i].as_str() {
                    "and" if i > 0 && i + 1 < tokens.len() => {
                        add_edge(&tokens[i - 1], &tokens[i + 1], 1.0);
                    }
                    "but" if i > 0 && i + 1 < tokens.len() => {
                        // contrast the word before "but" with the last
                        // content word of the clause after it
                        let clause_end = tokens[i + 1..]
                            .iter()
                            .position(|t| t == "," || t == "." || t == "and" || t == "but")
                            .map(|p| i + 1 + p)
                            .unwrap_or(tokens.len());
                        let after = tokens[i + 1..clause_end]
                            .iter()
                            .rev()
                            .find(|t| t.chars().any(char::is_alphabetic));
                        if let Some(after) = after {
                            add_edge(&tokens[i - 1], after, -1.0);
                        }
                    }
                    _ => {}
                }
            }
        }

        // vocabulary of the signed graph
        let mut vocab: Vec<String> = Vec::new();
        for (a, b) in edges.keys() {
            if !vocab.contains(a) {
                vocab.push(a.clone());
            }
            if !vocab.contains(b) {
                vocab.push(b.clone());
            }
        }
        vocab.sort();
        if vocab.is_empty() {
            return Self::default();
        }
        let index: BTreeMap<&String, usize> =
            vocab.iter().enumerate().map(|(i, w)| (w, i)).collect();

        // power iteration with damping on the signed adjacency
        let mut p: Vec<f64> = vocab
            .iter()
            .map(|w| {
                let h = fnv1a(w.as_bytes());
                ((h >> 11) as f64 / (1u64 << 53) as f64) - 0.5
            })
            .collect();
        for _ in 0..60 {
            let mut next = p.clone();
            for ((a, b), sign) in &edges {
                let (ia, ib) = (index[a], index[b]);
                next[ia] += sign * p[ib];
                next[ib] += sign * p[ia];
            }
            let max = next.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if max == 0.0 {
                break;
            }
            for x in &mut next {
                *x /= max;
            }
            p = next;
        }
        // deterministic sign convention: first vocab word with a strong
        // score is positive
        if let Some(lead) = p.iter().find(|x| x.abs() > 0.1) {
            if *lead < 0.0 {
                for x in &mut p {
                    *x = -*x;
                }
            }
        }

        // saturate against a robust quantile so sparsely attested words in
        // the colored component still count as fully polar
        let mut magnitudes: Vec<f64> = p.iter().map(|x| x.abs()).filter(|x| *x > 0.01).collect();
        magnitudes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if !magnitudes.is_empty() {
            let q = magnitudes[magnitudes.len() / 5].max(1e-6);
            for x in &mut p {
                *x = (*x / q).clamp(-1.0, 1.0);
                if x.abs() < 0.05 {
                    *x = 0.0;
                }
            }
        }

        let scores = vocab.into_iter().zip(p).collect();
        Self { scores }
    }

    /// Spread scores through synonym sets: a word with weak direct
    /// evidence inherits the mean polarity of its strongly scored
    /// synonyms. Dictionary-based propagation, still label-free.
    pub fn propagate_synonyms(mut self, synonyms: &crate::transforms::SynonymLexicon) -> Self {
        const STRONG: f64 = 0.2;
        let mut updates: Vec<(String, f64)> = Vec::new();
        for word in synonyms.vocabulary() {
            if self.score(&word).abs() >= STRONG {
                continue;
            }
            let strong: Vec<f64> = synonyms
                .synonyms(&word)
                .iter()
                .map(|s| self.score(s))
                .filter(|p| p.abs() >= STRONG)
                .collect();
            if !strong.is_empty() {
                let mean = strong.iter().sum::<f64>() / strong.len() as f64;
                updates.push((word, mean.clamp(-1.0, 1.0)));
            }
        }
        for (word, score) in updates {
            self.scores.insert(word, score);
        }
        self
    }

    /// Signed polarity score in [-1, 1]; 0 for unknown or neutral words.
    pub fn score(&self, word: &str) -> f64 {
        self.scores.get(&word.to_lowercase()).copied().unwrap_or(0.0)
    }

    /// The raw score table (word -> signed polarity).
    pub fn scores(&self) -> &BTreeMap<String, f64> {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// Semantic encoder with a polarity axis: the hashed topic embedding plus
/// one dimension carrying the mean induced polarity, weighted by `alpha`.
/// Swapping a strong-polarity word for its opposite moves the sentence
/// along this axis far enough to fail the similarity floor, while
/// same-polarity synonym swaps barely move it.
#[derive(Debug, Clone)]
pub struct PolarityAwareEncoder {
    topic: HashedWordVecEncoder,
    polarity: PolarityLexicon,
    alpha: f64,
}

impl PolarityAwareEncoder {
    pub fn new(topic: HashedWordVecEncoder, polarity: PolarityLexicon, alpha: f64) -> Self {
        Self {
            topic,
            polarity,
            alpha,
        }
    }

    pub fn shared(self) -> Arc<dyn SemanticEncoder> {
        Arc::new(self)
    }
}

impl SemanticEncoder for PolarityAwareEncoder {
    fn dim(&self) -> usize {
        self.topic.dim() + 1
    }

    fn embed(&self, text: &str) -> Vec<f64> {
        let mut v = self.topic.embed(text);
        let tokens = tokenize(text);
        // net polarity balance, length-independent: flipping the dominant
        // polarity swings this axis fully even in long sentences. Words
        // after a contrast marker carry the sentence's final stance and
        // weigh double.
        let mut weight = 1.0;
        let mut signed = 0.0;
        let mut mass = 0.0;
        for token in &tokens {
            if token == "but" {
                weight = 2.0;
                continue;
            }
            let p = self.polarity.score(token);
            signed += weight * p;
            mass += weight * p.abs();
        }
        v.push(self.alpha * signed / (mass + 0.5));
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::cosine_similarity;

    #[test]
    fn equal_texts_equal_vectors() {
        let enc = HashedWordVecEncoder::new(64);
        assert_eq!(enc.embed("a fine movie"), enc.embed("a fine movie"));
    }

    #[test]
    fn small_edit_keeps_similarity_high() {
        let enc = HashedWordVecEncoder::new(64);
        let a = enc.embed("the film was a fine and quiet picture about family life");
        let b = enc.embed("the film was a good and quiet picture about family life");
        let sim = cosine_similarity(&a, &b).unwrap();
        assert!(sim > 0.7, "one word of eleven changed, got sim {sim}");
    }

    #[test]
    fn disjoint_texts_are_less_similar_than_close_ones() {
        let enc = HashedWordVecEncoder::new(64);
        let base = enc.embed("the film was fine");
        let near = enc.embed("the film was good");
        let far = enc.embed("quarterly revenue dropped sharply overnight");
        let sim_near = cosine_similarity(&base, &near).unwrap();
        let sim_far = cosine_similarity(&base, &far).unwrap();
        assert!(sim_near > sim_far);
    }

    #[test]
    fn conjunction_polarity_splits_the_graph() {
        let corpus = [
            "the film was good and moving .",
            "the story was dull and tedious .",
            "the acting was good but the plot was dull .",
            "the cast was moving but the score was tedious .",
            "the film was moving and good .",
            "the plot was tedious but the cast was good .",
        ];
        let lex = PolarityLexicon::induce(corpus.iter().copied());
        let good = lex.score("good");
        let moving = lex.score("moving");
        let dull = lex.score("dull");
        let tedious = lex.score("tedious");
        assert!(good * moving > 0.0, "and-linked words share sign");
        assert!(dull * tedious > 0.0, "and-linked words share sign");
        assert!(good * dull < 0.0, "but-linked words oppose: {good} vs {dull}");
        assert_eq!(lex.score("unseen"), 0.0);
    }

    #[test]
    fn polarity_axis_vetoes_antonym_swaps_but_not_synonym_swaps() {
        let corpus = [
            "the film was good and fine .",
            "the film was dull and boring .",
            "the cast was good but the plot was boring .",
            "the story was fine but the score was dull .",
        ];
        let lex = PolarityLexicon::induce(corpus.iter().copied());
        let enc = PolarityAwareEncoder::new(HashedWordVecEncoder::new(256), lex, 1.5);
        let base = enc.embed("the film was good .");
        let synonym = enc.embed("the film was fine .");
        let antonym = enc.embed("the film was dull .");
        let sim_syn = cosine_similarity(&base, &synonym).unwrap();
        let sim_ant = cosine_similarity(&base, &antonym).unwrap();
        assert!(
            sim_syn > sim_ant + 0.2,
            "synonym {sim_syn} should beat antonym {sim_ant}"
        );
    }

    #[test]
    fn frequency_weighting_downweights_stopwords() {
        let mut freq = BTreeMap::new();
        freq.insert("the".to_string(), 10_000u64);
        freq.insert("fine".to_string(), 10u64);
        let enc = HashedWordVecEncoder::new(64).with_frequencies(freq);
        // "the" is near-ubiquitous, so swapping it moves the embedding less
        // than swapping the rare content word
        let base = enc.embed("the fine movie");
        let swap_stop = enc.embed("a fine movie");
        let swap_content = enc.embed("the dull movie");
        let sim_stop = cosine_similarity(&base, &swap_stop).unwrap();
        let sim_content = cosine_similarity(&base, &swap_content).unwrap();
        assert!(sim_stop > sim_content);
    }
}
