//! Lexical resources: synonym sets, vocabulary with frequencies, neutral
//! adverbs, stopwords, and the lexicon-based POS tagger.

use super::{Result, TransformError};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

/// Word -> synonym set. File format: `word<TAB>syn1,syn2,...`, UTF-8.
#[derive(Debug, Clone, Default)]
pub struct SynonymLexicon {
    entries: BTreeMap<String, Vec<String>>,
}

impl SynonymLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert<I: IntoIterator<Item = String>>(&mut self, word: &str, synonyms: I) {
        let word = word.to_lowercase();
        let entry = self.entries.entry(word).or_default();
        for s in synonyms {
            let s = s.to_lowercase();
            if !entry.contains(&s) {
                entry.push(s);
            }
        }
    }

    /// Register a full synonym group: every member maps to all the others.
    pub fn insert_group(&mut self, group: &[&str]) {
        for (i, word) in group.iter().enumerate() {
            let others: Vec<String> = group
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, w)| w.to_string())
                .collect();
            self.insert(word, others);
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let content = std::fs::read_to_string(path)?;
        let mut lex = Self::new();
        for (idx, line) in content.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.splitn(2, '\t');
            let word = parts.next().unwrap_or_default().trim();
            let syns = parts.next().ok_or_else(|| TransformError::Malformed {
                line: idx + 1,
                reason: "expected `word<TAB>synonyms`".into(),
            })?;
            lex.insert(
                word,
                syns.split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty()),
            );
        }
        Ok(lex)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for (word, syns) in &self.entries {
            out.push_str(word);
            out.push('\t');
            out.push_str(&syns.join(","));
            out.push('\n');
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    /// Synonyms of `word` excluding the word itself; empty when unknown.
    pub fn synonyms(&self, word: &str) -> Vec<String> {
        let lower = word.to_lowercase();
        self.entries
            .get(&lower)
            .map(|syns| syns.iter().filter(|s| **s != lower).cloned().collect())
            .unwrap_or_default()
    }

    pub fn has_synonyms(&self, word: &str) -> bool {
        !self.synonyms(word).is_empty()
    }

    /// All words known to the lexicon (keys and synonyms).
    pub fn vocabulary(&self) -> BTreeSet<String> {
        let mut vocab: BTreeSet<String> = self.entries.keys().cloned().collect();
        for syns in self.entries.values() {
            vocab.extend(syns.iter().cloned());
        }
        vocab
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Vocabulary with corpus frequencies; the reference for spelling
/// restoration and the desk grammar checker.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    counts: BTreeMap<String, u64>,
}

impl Lexicon {
    pub fn from_texts<'a, I: IntoIterator<Item = &'a str>>(texts: I) -> Self {
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for text in texts {
            for token in crate::core::tokenize(text) {
                if token.chars().any(char::is_alphabetic) {
                    *counts.entry(token.to_lowercase()).or_insert(0) += 1;
                }
            }
        }
        Self { counts }
    }

    /// Merge in words (count 1 when unseen), e.g. synonym-lexicon entries.
    pub fn absorb<I: IntoIterator<Item = String>>(&mut self, words: I) {
        for w in words {
            self.counts.entry(w.to_lowercase()).or_insert(1);
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.counts.contains_key(&word.to_lowercase())
    }

    pub fn frequency(&self, word: &str) -> u64 {
        self.counts.get(&word.to_lowercase()).copied().unwrap_or(0)
    }

    pub fn words(&self) -> impl Iterator<Item = &String> {
        self.counts.keys()
    }

    pub fn frequencies(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Load a neutral-adverb list: one adverb per line.
pub fn load_adverb_list(path: &Path) -> Result<Vec<String>> {
    let content = std::fs::read_to_string(path)?;
    Ok(content
        .lines()
        .map(|l| l.trim().to_lowercase())
        .filter(|l| !l.is_empty())
        .collect())
}

/// Built-in neutral adverbs for configurations that do not supply a file.
/// Chosen to be polarity-free so insertion does not move the label.
pub fn default_neutral_adverbs() -> Vec<String> {
    [
        "actually", "apparently", "basically", "certainly", "clearly", "definitely",
        "essentially", "evidently", "frankly", "generally", "gradually", "honestly",
        "largely", "literally", "mainly", "mostly", "naturally", "normally", "obviously",
        "occasionally", "often", "particularly", "perhaps", "possibly", "presumably",
        "primarily", "probably", "quietly", "rather", "really", "reportedly", "roughly",
        "seemingly", "simply", "slowly", "somewhat", "steadily", "surely", "typically",
        "usually",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

/// Common function words excluded from synonym-substitution pools.
pub fn stopwords() -> BTreeSet<String> {
    [
        "a", "an", "the", "this", "that", "these", "those", "it", "its", "he", "she",
        "his", "her", "they", "them", "their", "i", "we", "you", "me", "my", "our",
        "and", "or", "but", "if", "of", "in", "on", "at", "by", "to", "for", "with",
        "from", "as", "is", "was", "are", "were", "be", "been", "am", "do", "does",
        "did", "has", "have", "had", "not", "no", "so", "too", "very", "about", "into",
        "over", "than", "then", "there", "here", "out", "up", "down", "all", "any",
        "some", "such", "own", "same", "s", "t",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

/// Coarse part-of-speech tags for the desk tagger.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PosTag {
    Verb,
    Adverb,
    Adjective,
    Noun,
    Other,
}

impl PosTag {
    pub fn parse(s: &str) -> PosTag {
        match s.to_lowercase().as_str() {
            "verb" | "v" => PosTag::Verb,
            "adv" | "adverb" | "r" => PosTag::Adverb,
            "adj" | "adjective" | "j" => PosTag::Adjective,
            "noun" | "n" => PosTag::Noun,
            _ => PosTag::Other,
        }
    }
}

/// Assigns a tag per token.
pub trait PosTagger: Send + Sync {
    fn tag(&self, token: &str) -> PosTag;
}

/// Lexicon-based tagger: exact lookup, unknown words are `Other`.
/// File format: `word<TAB>tag`.
#[derive(Debug, Clone, Default)]
pub struct LexiconPosTagger {
    tags: BTreeMap<String, PosTag>,
}

impl LexiconPosTagger {
    pub fn new(tags: BTreeMap<String, PosTag>) -> Self {
        Self { tags }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let content = std::fs::read_to_string(path)?;
        let mut tags = BTreeMap::new();
        for (idx, line) in content.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.splitn(2, '\t');
            let word = parts.next().unwrap_or_default().trim().to_lowercase();
            let tag = parts.next().ok_or_else(|| TransformError::Malformed {
                line: idx + 1,
                reason: "expected `word<TAB>tag`".into(),
            })?;
            tags.insert(word, PosTag::parse(tag.trim()));
        }
        Ok(Self { tags })
    }

    pub fn insert(&mut self, word: &str, tag: PosTag) {
        self.tags.insert(word.to_lowercase(), tag);
    }
}

impl PosTagger for LexiconPosTagger {
    fn tag(&self, token: &str) -> PosTag {
        self.tags
            .get(&token.to_lowercase())
            .copied()
            .unwrap_or(PosTag::Other)
    }
}
