//! The randomization operations. Each is a pure function of
//! `(text, resources, rng)`.

use super::lexicon::{stopwords, PosTag, PosTagger, SynonymLexicon};
use super::paraphrase::Paraphraser;
use super::suggest::FillInSuggester;
use super::{Result, TransformError};
use crate::constraints::{cosine_similarity, SemanticEncoder};
use crate::core::{detokenize, tokenize, word_positions};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha12Rng;

/// Replace a fraction of words by random synonyms. The quota is
/// `ceil(fraction * word_count)`, capped by the number of synonym-bearing
/// non-stopword positions; positions are drawn uniformly without
/// replacement and each replacement is a uniform draw from the word's
/// synonym set.
pub fn random_synonym_substitution(
    text: &str,
    lexicon: &SynonymLexicon,
    fraction: f64,
    rng: &mut ChaCha12Rng,
) -> String {
    let mut tokens = tokenize(text);
    let words = word_positions(&tokens);
    if words.is_empty() {
        return text.to_string();
    }
    let stop = stopwords();
    let mut eligible: Vec<usize> = words
        .iter()
        .copied()
        .filter(|&i| {
            let lower = tokens[i].to_lowercase();
            !stop.contains(&lower) && lexicon.has_synonyms(&lower)
        })
        .collect();
    if eligible.is_empty() {
        return text.to_string();
    }
    let quota = ((fraction * words.len() as f64).ceil() as usize).max(1);
    let k = quota.min(eligible.len());
    eligible.shuffle(rng);
    let mut chosen: Vec<usize> = eligible.into_iter().take(k).collect();
    chosen.sort_unstable();
    for pos in chosen {
        let syns = lexicon.synonyms(&tokens[pos]);
        let pick = syns[rng.gen_range(0..syns.len())].clone();
        tokens[pos] = pick;
    }
    detokenize(&tokens)
}

/// Insert one neutral adverb immediately before a uniformly chosen verb;
/// with no verb in sight, insert before a uniformly chosen word instead.
pub fn random_adverb_insertion(
    text: &str,
    adverbs: &[String],
    tagger: &dyn PosTagger,
    rng: &mut ChaCha12Rng,
) -> Result<String> {
    if adverbs.is_empty() {
        return Err(TransformError::EmptyAdverbLexicon);
    }
    let mut tokens = tokenize(text);
    if tokens.is_empty() {
        return Ok(text.to_string());
    }
    let verbs: Vec<usize> = word_positions(&tokens)
        .into_iter()
        .filter(|&i| tagger.tag(&tokens[i]) == PosTag::Verb)
        .collect();
    let insert_at = if verbs.is_empty() {
        let words = word_positions(&tokens);
        words[rng.gen_range(0..words.len())]
    } else {
        verbs[rng.gen_range(0..verbs.len())]
    };
    let adverb = adverbs[rng.gen_range(0..adverbs.len())].clone();
    tokens.insert(insert_at, adverb);
    Ok(detokenize(&tokens))
}

/// Replace one uniformly chosen word position with the suggester's top
/// candidate that differs from the original token. Falls back to other
/// positions (in random order) when the chosen one has no differing
/// candidate; returns the input unchanged when none does.
pub fn random_mlm_suggestion(
    text: &str,
    suggester: &dyn FillInSuggester,
    rng: &mut ChaCha12Rng,
) -> String {
    let tokens = tokenize(text);
    let mut positions = word_positions(&tokens);
    if positions.is_empty() {
        return text.to_string();
    }
    positions.shuffle(rng);
    for pos in positions {
        let left = &tokens[..pos];
        let right = &tokens[pos + 1..];
        let original = tokens[pos].to_lowercase();
        let candidate = suggester
            .suggest(left, right, 8)
            .into_iter()
            .filter(|c| c.chars().any(char::is_alphabetic))
            .find(|c| c.to_lowercase() != original);
        if let Some(candidate) = candidate {
            let mut out = tokens.clone();
            out[pos] = candidate;
            return detokenize(&out);
        }
    }
    text.to_string()
}

/// Round-trip paraphrase with a semantic-similarity guard: candidates below
/// 0.4 similarity to the input are discarded and the input is returned
/// unchanged. Hook failure also returns the input.
pub fn back_translate(
    text: &str,
    paraphraser: &dyn Paraphraser,
    encoder: &dyn SemanticEncoder,
    variant: u64,
) -> String {
    const GUARD: f64 = 0.4;
    match paraphraser.paraphrase(text, variant) {
        Some(candidate) if !candidate.trim().is_empty() => {
            let sim = cosine_similarity(&encoder.embed(text), &encoder.embed(&candidate))
                .unwrap_or(0.0);
            if sim >= GUARD {
                candidate
            } else {
                log::warn!("paraphrase below similarity guard ({sim:.3}), keeping input");
                text.to_string()
            }
        }
        _ => {
            log::warn!("paraphraser returned nothing, keeping input");
            text.to_string()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::HashedWordVecEncoder;
    use crate::core::RngStream;
    use crate::transforms::lexicon::LexiconPosTagger;
    use crate::transforms::paraphrase::IdentityParaphraser;
    use crate::transforms::suggest::FixedSuggester;

    fn lexicon() -> SynonymLexicon {
        let mut lex = SynonymLexicon::new();
        lex.insert_group(&["good", "great", "fine"]);
        lex.insert_group(&["movie", "film", "picture"]);
        lex.insert_group(&["story", "plot", "tale"]);
        lex.insert_group(&["acting", "cast", "performance"]);
        lex.insert_group(&["strong", "solid", "sturdy"]);
        lex.insert_group(&["quiet", "calm", "gentle"]);
        lex.insert_group(&["warm", "tender", "kind"]);
        lex.insert_group(&["smart", "clever", "sharp"]);
        lex
    }

    fn rng(seed: u64) -> ChaCha12Rng {
        RngStream::new(seed).rng()
    }

    #[test]
    fn synonym_substitution_changes_exactly_quota_words() {
        // 8 words, every word synonym-bearing: quota = ceil(0.25*8) = 2
        let text = "good movie strong story quiet acting warm smart";
        let out = random_synonym_substitution(text, &lexicon(), 0.25, &mut rng(5));
        let orig: Vec<String> = tokenize(text);
        let new: Vec<String> = tokenize(&out);
        assert_eq!(orig.len(), new.len());
        let diff = orig.iter().zip(&new).filter(|(a, b)| a != b).count();
        assert_eq!(diff, 2);
    }

    #[test]
    fn replacements_come_from_the_synonym_set() {
        let lex = lexicon();
        let text = "good movie strong story quiet acting warm smart";
        let orig = tokenize(text);
        for seed in 0..10 {
            let out = random_synonym_substitution(text, &lex, 0.25, &mut rng(seed));
            for (a, b) in orig.iter().zip(tokenize(&out)) {
                if *a != b {
                    assert!(
                        lex.synonyms(a).contains(&b),
                        "{b} is not a synonym of {a}"
                    );
                }
            }
        }
    }

    #[test]
    fn fixed_rng_path_gives_identical_output() {
        let text = "good movie strong story";
        let a = random_synonym_substitution(text, &lexicon(), 0.25, &mut rng(9));
        let b = random_synonym_substitution(text, &lexicon(), 0.25, &mut rng(9));
        assert_eq!(a, b);
    }

    #[test]
    fn no_synonyms_returns_input() {
        let lex = SynonymLexicon::new();
        assert_eq!(
            random_synonym_substitution("plain words here", &lex, 0.25, &mut rng(1)),
            "plain words here"
        );
    }

    #[test]
    fn adverb_insertion_adds_one_token_before_a_verb() {
        let mut tagger = LexiconPosTagger::default();
        tagger.insert("started", PosTag::Verb);
        tagger.insert("fall", PosTag::Verb);
        let adverbs = vec!["slowly".to_string(), "gently".to_string()];
        let text = "rain started to fall";
        let out = random_adverb_insertion(text, &adverbs, &tagger, &mut rng(4)).unwrap();
        let orig = tokenize(text);
        let new = tokenize(&out);
        assert_eq!(new.len(), orig.len() + 1);
        // the inserted token is an adverb from the list
        let inserted: Vec<&String> = new.iter().filter(|t| !orig.contains(t)).collect();
        assert_eq!(inserted.len(), 1);
        assert!(adverbs.contains(inserted[0]));
        // deleting the inserted token recovers the input exactly
        let recovered: Vec<String> = new
            .iter()
            .cloned()
            .filter(|t| t != inserted[0])
            .collect();
        assert_eq!(detokenize(&recovered), text);
        // it sits immediately before a verb
        let idx = new.iter().position(|t| t == inserted[0]).unwrap();
        assert_eq!(tagger.tag(&new[idx + 1]), PosTag::Verb);
    }

    #[test]
    fn adverb_insertion_without_verbs_still_inserts() {
        let tagger = LexiconPosTagger::default();
        let adverbs = vec!["slowly".to_string()];
        let out = random_adverb_insertion("a quiet film", &adverbs, &tagger, &mut rng(2)).unwrap();
        assert_eq!(tokenize(&out).len(), 4);
    }

    #[test]
    fn empty_adverb_lexicon_is_an_error() {
        let tagger = LexiconPosTagger::default();
        assert!(matches!(
            random_adverb_insertion("text here", &[], &tagger, &mut rng(1)),
            Err(TransformError::EmptyAdverbLexicon)
        ));
    }

    #[test]
    fn mlm_suggestion_changes_exactly_one_position() {
        let suggester = FixedSuggester(vec!["fresh".to_string()]);
        let text = "a quiet film";
        let out = random_mlm_suggestion(text, &suggester, &mut rng(3));
        let orig = tokenize(text);
        let new = tokenize(&out);
        assert_eq!(orig.len(), new.len());
        let diffs: Vec<(&String, &String)> =
            orig.iter().zip(&new).filter(|(a, b)| a != b).collect();
        assert_eq!(diffs.len(), 1);
        assert_eq!(diffs[0].1, "fresh");
    }

    #[test]
    fn mlm_suggestion_with_no_candidates_is_identity() {
        let suggester = FixedSuggester(vec![]);
        assert_eq!(
            random_mlm_suggestion("a quiet film", &suggester, &mut rng(3)),
            "a quiet film"
        );
    }

    #[test]
    fn mlm_suggestion_never_echoes_the_original_token() {
        // suggester proposes the original first; the op must skip to a
        // differing candidate
        struct Echo;
        impl FillInSuggester for Echo {
            fn suggest(&self, left: &[String], _right: &[String], _k: usize) -> Vec<String> {
                // proposes whatever word it saw on the left plus one fixed word
                let mut v = left.last().cloned().into_iter().collect::<Vec<_>>();
                v.push("novel".to_string());
                v
            }
        }
        let out = random_mlm_suggestion("word word word", &Echo, &mut rng(1));
        assert!(out.contains("novel"));
    }

    #[test]
    fn back_translate_guard_and_identity() {
        let encoder = HashedWordVecEncoder::new(256);
        // identity paraphrase passes the guard trivially
        let out = back_translate("the movie was great", &IdentityParaphraser, &encoder, 0);
        assert_eq!(out, "the movie was great");

        // a similarity-violating paraphrase is rejected
        struct OffTopic;
        impl Paraphraser for OffTopic {
            fn paraphrase(&self, _text: &str, _variant: u64) -> Option<String> {
                Some("entirely unrelated quarterly earnings report".to_string())
            }
        }
        let out = back_translate("the movie was great", &OffTopic, &encoder, 0);
        assert_eq!(out, "the movie was great");

        // hook failure returns the input
        struct Broken;
        impl Paraphraser for Broken {
            fn paraphrase(&self, _text: &str, _variant: u64) -> Option<String> {
                None
            }
        }
        let out = back_translate("the movie was great", &Broken, &encoder, 0);
        assert_eq!(out, "the movie was great");
    }
}
