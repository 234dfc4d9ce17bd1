//! Pluggable text encoders.
//!
//! The desk-scale default hashes word uni/bigrams and boundary-marked
//! character n-grams into a fixed-width feature vector, optionally extended
//! with a few corpus-statistics features (out-of-vocabulary rate, token
//! rarity, bigram log-likelihood). The statistics features give downstream
//! heads a granularity-independent signal for how "in distribution" a text
//! looks, which is what heavyweight contextual encoders provide at full
//! scale.

use crate::constraints::PolarityLexicon;
use crate::core::tokenize;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Deterministic text-to-vector map shared by the victim classifier and the
/// anomaly detector.
pub trait TextEncoder: Send + Sync {
    fn id(&self) -> &str;
    fn dim(&self) -> usize;
    /// Encode `(premise, text)`. The premise, when present, contributes its
    /// own feature namespace plus overlap features against the text.
    fn encode(&self, premise: Option<&str>, text: &str) -> Vec<f64>;
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Corpus statistics backing the dense distribution features, fitted on a
/// reference corpus (typically the clean train split).
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct CorpusStats {
    pub token_counts: BTreeMap<String, u64>,
    pub bigram_counts: BTreeMap<String, u64>,
    pub total_tokens: u64,
    #[serde(default)]
    pub polarity: PolarityLexicon,
}

impl CorpusStats {
    pub fn fit<'a, I: IntoIterator<Item = &'a str> + Clone>(texts: I) -> Self {
        let polarity = PolarityLexicon::induce(texts.clone());
        let mut token_counts: BTreeMap<String, u64> = BTreeMap::new();
        let mut bigram_counts: BTreeMap<String, u64> = BTreeMap::new();
        let mut total = 0u64;
        for text in texts {
            let toks: Vec<String> = tokenize(text)
                .into_iter()
                .map(|t| t.to_lowercase())
                .collect();
            for w in &toks {
                *token_counts.entry(w.clone()).or_insert(0) += 1;
                total += 1;
            }
            for pair in toks.windows(2) {
                *bigram_counts
                    .entry(format!("{} {}", pair[0], pair[1]))
                    .or_insert(0) += 1;
            }
        }
        Self {
            token_counts,
            bigram_counts,
            total_tokens: total,
            polarity,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.total_tokens == 0
    }

    fn vocab_size(&self) -> usize {
        self.token_counts.len().max(1)
    }

    /// Per-text dense distribution features, each scaled into [0, 1]:
    /// out-of-vocabulary rate, rare-token rate, mean and peak token
    /// surprisal, mean and peak bigram surprisal, and three
    /// polarity-consistency signals (opposite-polarity words in one
    /// sentence, the same without a contrast marker, and agreeing
    /// polarities across a contrast marker).
    fn features(&self, tokens: &[String]) -> [f64; 9] {
        if tokens.is_empty() || self.is_empty() {
            return [0.0; 9];
        }
        const SURPRISE_SCALE: f64 = 15.0;
        let n = tokens.len() as f64;
        let mut oov = 0usize;
        let mut rare = 0usize;
        let mut sum_surprise = 0.0;
        let mut max_surprise = 0.0f64;
        for w in tokens {
            let c = self.token_counts.get(w).copied().unwrap_or(0);
            if c == 0 {
                oov += 1;
            }
            if c <= 2 {
                rare += 1;
            }
            let s = -(((c + 1) as f64 / (self.total_tokens + 1) as f64).ln());
            sum_surprise += s;
            max_surprise = max_surprise.max(s);
        }
        let mut bigram_surprise = 0.0;
        let mut max_bigram_surprise = 0.0f64;
        let mut bigrams = 0usize;
        for pair in tokens.windows(2) {
            let key = format!("{} {}", pair[0], pair[1]);
            let joint = self.bigram_counts.get(&key).copied().unwrap_or(0);
            let context = self.token_counts.get(&pair[0]).copied().unwrap_or(0);
            let s = -(((joint as f64 + 1.0) / (context as f64 + self.vocab_size() as f64)).ln());
            bigram_surprise += s;
            max_bigram_surprise = max_bigram_surprise.max(s);
            bigrams += 1;
        }
        let mean_bigram = if bigrams == 0 {
            0.0
        } else {
            bigram_surprise / bigrams as f64
        };
        let (contrast, contrast_unmarked, marker_concord) = self.polarity_features(tokens);
        [
            oov as f64 / n,
            rare as f64 / n,
            (sum_surprise / n / SURPRISE_SCALE).min(1.0),
            (max_surprise / SURPRISE_SCALE).min(1.0),
            (mean_bigram / SURPRISE_SCALE).min(1.0),
            (max_bigram_surprise / SURPRISE_SCALE).min(1.0),
            contrast,
            contrast_unmarked,
            marker_concord,
        ]
    }

    fn polarity_features(&self, tokens: &[String]) -> (f64, f64, f64) {
        let scores: Vec<f64> = tokens.iter().map(|t| self.polarity.score(t)).collect();
        let pos_max = scores.iter().cloned().fold(0.0f64, |m, p| m.max(p));
        let neg_max = scores.iter().cloned().fold(0.0f64, |m, p| m.max(-p));
        let contrast = pos_max.min(neg_max);
        let but_positions: Vec<usize> = tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| t.as_str() == "but")
            .map(|(i, _)| i)
            .collect();
        let contrast_unmarked = if but_positions.is_empty() { contrast } else { 0.0 };
        // agreeing polarity across a contrast marker is itself anomalous
        let mut marker_concord = 0.0f64;
        for &i in &but_positions {
            let strongest = |range: &[f64]| -> f64 {
                range
                    .iter()
                    .cloned()
                    .max_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap())
                    .unwrap_or(0.0)
            };
            let left = strongest(&scores[..i]);
            let right = strongest(&scores[i + 1..]);
            if left * right > 0.0 {
                marker_concord = marker_concord.max(left.abs().min(right.abs()));
            }
        }
        (contrast, contrast_unmarked, marker_concord)
    }
}

/// Serializable recipe for reconstructing an encoder; the model checkpoint
/// stores this instead of the built object.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EncoderSpec {
    pub id: String,
    pub hashed_dim: usize,
    pub char_ngrams: (usize, usize),
    pub word_ngrams: usize,
    #[serde(default)]
    pub stats: Option<CorpusStats>,
}

impl EncoderSpec {
    pub fn hashed(dim: usize) -> Self {
        Self {
            id: format!("hashed-ngram-{dim}"),
            hashed_dim: dim,
            char_ngrams: (3, 5),
            word_ngrams: 2,
            stats: None,
        }
    }

    pub fn with_stats(mut self, stats: CorpusStats) -> Self {
        self.id = format!("{}+stats", self.id);
        self.stats = Some(stats);
        self
    }

    pub fn build(&self) -> Arc<dyn TextEncoder> {
        Arc::new(HashedNgramEncoder::from_spec(self.clone()))
    }
}

/// The desk-scale encoder: L2-normalized hashed n-gram features plus
/// optional corpus-statistics features.
#[derive(Debug, Clone)]
pub struct HashedNgramEncoder {
    spec: EncoderSpec,
}

const STATS_DIMS: usize = 9;
const PREMISE_DIMS: usize = 1;

impl HashedNgramEncoder {
    pub fn new(dim: usize) -> Self {
        Self::from_spec(EncoderSpec::hashed(dim))
    }

    pub fn from_spec(spec: EncoderSpec) -> Self {
        Self { spec }
    }

    pub fn spec(&self) -> &EncoderSpec {
        &self.spec
    }

    fn bucket(&self, feature: &str) -> usize {
        (fnv1a(feature.as_bytes()) % self.spec.hashed_dim as u64) as usize
    }

    fn add_text_features(&self, out: &mut [f64], tokens: &[String], namespace: &str) {
        for token in tokens {
            out[self.bucket(&format!("{namespace}w1:{token}"))] += 1.0;
        }
        if self.spec.word_ngrams >= 2 {
            for pair in tokens.windows(2) {
                out[self.bucket(&format!("{namespace}w2:{} {}", pair[0], pair[1]))] += 1.0;
            }
        }
        let (lo, hi) = self.spec.char_ngrams;
        for token in tokens {
            let marked: Vec<char> = format!("^{token}$").chars().collect();
            for n in lo..=hi {
                if marked.len() < n {
                    continue;
                }
                for window in marked.windows(n) {
                    let gram: String = window.iter().collect();
                    out[self.bucket(&format!("{namespace}c{n}:{gram}"))] += 1.0;
                }
            }
        }
    }
}

impl TextEncoder for HashedNgramEncoder {
    fn id(&self) -> &str {
        &self.spec.id
    }

    fn dim(&self) -> usize {
        self.spec.hashed_dim + STATS_DIMS + PREMISE_DIMS
    }

    fn encode(&self, premise: Option<&str>, text: &str) -> Vec<f64> {
        let tokens: Vec<String> = tokenize(text)
            .into_iter()
            .map(|t| t.to_lowercase())
            .collect();
        let mut hashed = vec![0.0; self.spec.hashed_dim];
        self.add_text_features(&mut hashed, &tokens, "");

        let mut overlap = 0.0;
        if let Some(premise) = premise {
            let p_tokens: Vec<String> = tokenize(premise)
                .into_iter()
                .map(|t| t.to_lowercase())
                .collect();
            self.add_text_features(&mut hashed, &p_tokens, "p:");
            if !tokens.is_empty() {
                overlap = tokens
                    .iter()
                    .filter(|t| p_tokens.contains(t))
                    .count() as f64
                    / tokens.len() as f64;
            }
        }

        let norm: f64 = hashed.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            for x in &mut hashed {
                *x /= norm;
            }
        }

        let stats = self
            .spec
            .stats
            .as_ref()
            .map(|s| s.features(&tokens))
            .unwrap_or([0.0; STATS_DIMS]);
        hashed.extend_from_slice(&stats);
        hashed.push(overlap);
        hashed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encoding_is_deterministic() {
        let enc = HashedNgramEncoder::new(128);
        assert_eq!(
            enc.encode(None, "a good movie"),
            enc.encode(None, "a good movie")
        );
    }

    #[test]
    fn premise_changes_features() {
        let enc = HashedNgramEncoder::new(128);
        let a = enc.encode(Some("a man walks"), "a person moves");
        let b = enc.encode(Some("a dog barks"), "a person moves");
        assert_ne!(a, b);
    }

    #[test]
    fn stats_flag_out_of_vocabulary_tokens() {
        let stats = CorpusStats::fit(["the movie was great", "the story was fine"]);
        let spec = EncoderSpec::hashed(64).with_stats(stats);
        let enc = HashedNgramEncoder::from_spec(spec);
        let clean = enc.encode(None, "the movie was fine");
        let typo = enc.encode(None, "the mvoie was fnie");
        let oov_idx = 64; // first stats feature
        assert_eq!(clean[oov_idx], 0.0);
        assert!(typo[oov_idx] > 0.4);
    }

    #[test]
    fn spec_round_trip_rebuilds_identical_encoder() {
        let stats = CorpusStats::fit(["one two three"]);
        let spec = EncoderSpec::hashed(64).with_stats(stats);
        let json = serde_json::to_string(&spec).unwrap();
        let back: EncoderSpec = serde_json::from_str(&json).unwrap();
        let a = spec.build();
        let b = back.build();
        assert_eq!(a.encode(None, "one two four"), b.encode(None, "one two four"));
    }

}
