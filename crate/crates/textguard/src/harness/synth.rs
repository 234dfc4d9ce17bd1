//! Deterministic synthetic review corpus for desk-scale runs and tests.
//!
//! Sentences are template-generated over synonym groups with skewed member
//! frequencies (a canonical member dominates, the last member is rare), so
//! a trained victim carries uneven synonym weights — the surface real word
//! substitution attacks exploit. Mixed-polarity templates put a slice of
//! the data near the decision boundary.

use crate::constraints::{
    HashedWordVecEncoder, LexiconGrammarChecker, PolarityAwareEncoder, PolarityLexicon,
    SemanticEncoder,
};
use crate::core::{Dataset, RngStream, Split, TextExample};
use crate::transforms::{
    default_neutral_adverbs, Lexicon, LexiconPosTagger, LexiconRestorer, NgramSuggester, PosTag,
    RuleParaphraser, SynonymLexicon, TransformConfig, TransformKind, TransformResources,
};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use std::sync::Arc;

const POSITIVE_GROUPS: [[&str; 6]; 8] = [
    ["good", "great", "fine", "decent", "lovely", "admirable"],
    ["wonderful", "excellent", "superb", "marvelous", "terrific", "splendid"],
    ["enjoyable", "pleasant", "charming", "delightful", "agreeable", "endearing"],
    ["funny", "hilarious", "witty", "amusing", "comical", "droll"],
    ["moving", "touching", "stirring", "affecting", "poignant", "heartfelt"],
    ["smart", "clever", "sharp", "shrewd", "astute", "canny"],
    ["strong", "solid", "sturdy", "robust", "forceful", "assured"],
    ["fresh", "original", "inventive", "novel", "imaginative", "daring"],
];

const NEGATIVE_GROUPS: [[&str; 6]; 8] = [
    ["bad", "poor", "weak", "shoddy", "lousy", "inferior"],
    ["awful", "terrible", "dreadful", "horrid", "atrocious", "abysmal"],
    ["boring", "dull", "tedious", "monotonous", "dreary", "humdrum"],
    ["messy", "sloppy", "clumsy", "untidy", "chaotic", "haphazard"],
    ["silly", "absurd", "ridiculous", "ludicrous", "inane", "farcical"],
    ["slow", "sluggish", "plodding", "languid", "torpid", "leaden"],
    ["flat", "stale", "lifeless", "bland", "insipid", "vapid"],
    ["confusing", "muddled", "garbled", "jumbled", "incoherent", "disjointed"],
];

const NOUN_GROUPS: [[&str; 4]; 8] = [
    ["movie", "film", "picture", "feature"],
    ["story", "plot", "script", "narrative"],
    ["acting", "cast", "ensemble", "performances"],
    ["music", "score", "soundtrack", "melody"],
    ["pacing", "rhythm", "tempo", "cadence"],
    ["dialogue", "writing", "lines", "prose"],
    ["direction", "editing", "craft", "staging"],
    ["ending", "finale", "climax", "conclusion"],
];

const VERBS: [&str; 8] = [
    "is", "was", "feels", "seems", "looks", "sounds", "stays", "remains",
];

/// Skewed member choice: the canonical member dominates, tail members are
/// rare, so learned weights differ sharply across a synonym set.
fn pick_member<'a>(group: &'a [&'a str], rng: &mut ChaCha12Rng) -> &'a str {
    const CUMULATIVE: [f64; 6] = [0.55, 0.80, 0.90, 0.95, 0.98, 1.0];
    let n = group.len().min(CUMULATIVE.len());
    let roll: f64 = rng.gen::<f64>() * CUMULATIVE[n - 1];
    for (i, cut) in CUMULATIVE.iter().take(n).enumerate() {
        if roll < *cut {
            return group[i];
        }
    }
    group[n - 1]
}

fn pick<'a, T>(items: &'a [T], rng: &mut ChaCha12Rng) -> &'a T {
    &items[rng.gen_range(0..items.len())]
}

fn adjective(positive: bool, rng: &mut ChaCha12Rng) -> String {
    let groups: &[[&str; 6]; 8] = if positive {
        &POSITIVE_GROUPS
    } else {
        &NEGATIVE_GROUPS
    };
    pick_member(pick(groups, rng), rng).to_string()
}

fn noun(rng: &mut ChaCha12Rng) -> String {
    pick_member(pick(&NOUN_GROUPS, rng), rng).to_string()
}

fn verb(rng: &mut ChaCha12Rng) -> String {
    (*pick(&VERBS, rng)).to_string()
}

fn adverb(adverbs: &[String], rng: &mut ChaCha12Rng) -> String {
    pick(adverbs, rng).clone()
}

/// One generated sentence for a target polarity.
fn sentence(positive: bool, adverbs: &[String], rng: &mut ChaCha12Rng) -> String {
    match rng.gen_range(0..6u32) {
        // "the movie feels really fresh ."
        0 => format!(
            "the {} {} {} {} .",
            noun(rng),
            verb(rng),
            adverb(adverbs, rng),
            adjective(positive, rng)
        ),
        // "the story was great and moving ."
        1 => format!(
            "the {} {} {} and {} .",
            noun(rng),
            verb(rng),
            adjective(positive, rng),
            adjective(positive, rng)
        ),
        // "a fresh movie with solid acting ."
        2 => format!(
            "a {} {} with {} {} .",
            adjective(positive, rng),
            noun(rng),
            adjective(positive, rng),
            noun(rng)
        ),
        // mixed clause, label follows the second half:
        // "the acting was good but the plot is dull ."
        3 => format!(
            "the {} {} {} but the {} {} {} .",
            noun(rng),
            verb(rng),
            adjective(!positive, rng),
            noun(rng),
            verb(rng),
            adjective(positive, rng)
        ),
        // "i thought the dialogue was quite witty ."
        4 => format!(
            "i thought the {} {} {} {} .",
            noun(rng),
            verb(rng),
            adverb(adverbs, rng),
            adjective(positive, rng)
        ),
        // three concordant clauses
        _ => format!(
            "the {} {} {} , the {} {} {} , and the {} {} {} .",
            noun(rng),
            verb(rng),
            adjective(positive, rng),
            noun(rng),
            verb(rng),
            adjective(positive, rng),
            noun(rng),
            verb(rng),
            adjective(positive, rng)
        ),
    }
}

/// The corpus plus every resource derived from it.
pub struct DeskCorpus {
    pub train: Dataset,
    pub test: Dataset,
    pub synonyms: Arc<SynonymLexicon>,
    pub resources: TransformResources,
    pub semantic_encoder: Arc<dyn SemanticEncoder>,
    pub grammar_checker: Arc<LexiconGrammarChecker>,
}

impl DeskCorpus {
    /// Transform configuration over this corpus's resources.
    pub fn transform(&self, kind: TransformKind, rng: RngStream) -> TransformConfig {
        TransformConfig::new(kind, self.resources.clone(), rng)
    }
}

/// The full synonym lexicon implied by the generator's groups.
pub fn synonym_lexicon() -> SynonymLexicon {
    let mut lex = SynonymLexicon::new();
    for group in POSITIVE_GROUPS.iter().chain(NEGATIVE_GROUPS.iter()) {
        lex.insert_group(group.as_slice());
    }
    for group in &NOUN_GROUPS {
        lex.insert_group(group.as_slice());
    }
    lex
}

/// POS lexicon for the generator vocabulary: verbs and the neutral adverbs.
pub fn pos_tagger(adverbs: &[String]) -> LexiconPosTagger {
    let mut tagger = LexiconPosTagger::default();
    for v in VERBS {
        tagger.insert(v, PosTag::Verb);
    }
    for a in adverbs {
        tagger.insert(a, PosTag::Adverb);
    }
    for group in POSITIVE_GROUPS.iter().chain(NEGATIVE_GROUPS.iter()) {
        for w in group {
            tagger.insert(w, PosTag::Adjective);
        }
    }
    for group in &NOUN_GROUPS {
        for w in group {
            tagger.insert(w, PosTag::Noun);
        }
    }
    tagger
}

/// Generate a labeled sentiment corpus with `n_train`/`n_test` examples and
/// build the lexicons, hooks, and encoders every other module needs.
/// Deterministic in `seed`.
pub fn sentiment_corpus(n_train: usize, n_test: usize, seed: u64) -> DeskCorpus {
    let adverbs: Vec<String> = default_neutral_adverbs();
    let stream = RngStream::new(seed).derive_label("synth-corpus");

    let make_split = |split: Split, n: usize, tag: &str, segment: u64| {
        let mut rng = stream.derive(segment).rng();
        let examples: Vec<TextExample> = (0..n)
            .map(|i| {
                let positive = i % 2 == 0;
                let text = sentence(positive, &adverbs, &mut rng);
                TextExample::new(
                    format!("{tag}{i}"),
                    text,
                    if positive { "pos" } else { "neg" },
                )
            })
            .collect();
        Dataset::new("desk-reviews", split, vec!["pos".into(), "neg".into()], examples).unwrap()
    };

    let train = make_split(Split::Train, n_train, "tr", 0);
    let test = make_split(Split::Test, n_test, "te", 1);

    let synonyms = Arc::new(synonym_lexicon());
    let train_texts: Vec<&str> = train.examples.iter().map(|e| e.text.as_str()).collect();

    let mut lexicon = Lexicon::from_texts(train_texts.iter().copied());
    lexicon.absorb(synonyms.vocabulary());
    lexicon.absorb(adverbs.iter().cloned());
    lexicon.absorb(VERBS.iter().map(|v| v.to_string()));

    let grammar_checker = Arc::new(LexiconGrammarChecker::new(
        lexicon.words().cloned().collect::<Vec<_>>(),
    ));
    let polarity =
        PolarityLexicon::induce(train_texts.iter().copied()).propagate_synonyms(&synonyms);
    let semantic_encoder: Arc<dyn SemanticEncoder> = Arc::new(PolarityAwareEncoder::new(
        HashedWordVecEncoder::new(256).with_frequencies(lexicon.frequencies().clone()),
        polarity,
        1.0,
    ));

    let resources = TransformResources {
        synonyms: synonyms.clone(),
        adverbs: Arc::new(adverbs),
        tagger: Arc::new(pos_tagger(&default_neutral_adverbs())),
        suggester: Arc::new(NgramSuggester::train(train_texts.iter().copied())),
        paraphraser: Arc::new(RuleParaphraser::new(synonyms.clone())),
        restorer: Some(Arc::new(LexiconRestorer::new(lexicon))),
        semantic_encoder: semantic_encoder.clone(),
    };

    DeskCorpus {
        train,
        test,
        synonyms,
        resources,
        semantic_encoder,
        grammar_checker,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::tokenize;

    #[test]
    fn corpus_is_deterministic_and_balanced() {
        let a = sentiment_corpus(100, 20, 7);
        let b = sentiment_corpus(100, 20, 7);
        assert_eq!(a.train, b.train);
        assert_eq!(a.test, b.test);
        let pos = a.train.examples.iter().filter(|e| e.gold_label == "pos").count();
        assert_eq!(pos, 50);
    }

    #[test]
    fn sentences_are_long_enough_for_word_attacks() {
        let corpus = sentiment_corpus(200, 0, 3);
        for ex in &corpus.train.examples {
            let tokens = tokenize(&ex.text);
            assert!(tokens.len() >= 6, "too short: {:?}", ex.text);
        }
    }

    #[test]
    fn every_content_word_is_in_the_restoration_lexicon() {
        let corpus = sentiment_corpus(100, 10, 5);
        let restorer = corpus.resources.restorer.as_ref().unwrap();
        for ex in corpus.train.examples.iter().take(20) {
            assert_eq!(restorer.restore(&ex.text), ex.text);
        }
    }

    #[test]
    fn different_seeds_differ() {
        let a = sentiment_corpus(50, 0, 1);
        let b = sentiment_corpus(50, 0, 2);
        assert_ne!(a.train, b.train);
    }
}
