//! Training-set augmentation: original examples plus one randomized copy of
//! each, so a randomizing defense does not cost clean accuracy.

use crate::core::{Dataset, RngStream, TextExample};
use crate::transforms::{apply, TransformConfig};

/// Append one transformed copy per example. Labels and originals are
/// preserved verbatim; copies get a derived id. An example whose transform
/// fails keeps only its original (logged, not fatal).
pub fn augment_with_transform(train: &Dataset, transform: &TransformConfig, seed: u64) -> Dataset {
    let base = RngStream::new(seed).derive_label("augment");
    let mut examples = train.examples.clone();
    for (i, ex) in train.examples.iter().enumerate() {
        let config = transform.with_rng(base.derive(i as u64));
        match apply(&config, &ex.text) {
            Ok(text) => {
                let mut copy = TextExample::new(
                    format!("{}::aug", ex.id),
                    text,
                    ex.gold_label.clone(),
                );
                copy.premise = ex.premise.clone();
                examples.push(copy);
            }
            Err(err) => {
                log::warn!("augmentation failed for {}: {err}", ex.id);
            }
        }
    }
    Dataset::new(
        train.name.clone(),
        train.split,
        train.label_set.clone(),
        examples,
    )
    .expect("augmented dataset inherits validated invariants")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::HashedWordVecEncoder;
    use crate::core::{tokenize, Split};
    use crate::transforms::{
        IdentityParaphraser, Lexicon, LexiconPosTagger, LexiconRestorer, NgramSuggester,
        SynonymLexicon, TransformKind, TransformResources,
    };
    use std::sync::Arc;

    fn resources() -> TransformResources {
        let mut synonyms = SynonymLexicon::new();
        synonyms.insert_group(&["good", "great", "fine", "nice"]);
        synonyms.insert_group(&["movie", "film", "picture"]);
        synonyms.insert_group(&["story", "plot", "tale"]);
        synonyms.insert_group(&["quiet", "calm", "gentle"]);
        let synonyms = Arc::new(synonyms);
        let texts: Vec<String> = (0..10)
            .map(|i| format!("a good movie story quiet number{i}"))
            .collect();
        let mut lexicon = Lexicon::from_texts(texts.iter().map(String::as_str));
        lexicon.absorb(synonyms.vocabulary());
        TransformResources {
            synonyms: synonyms.clone(),
            adverbs: Arc::new(vec!["really".into()]),
            tagger: Arc::new(LexiconPosTagger::default()),
            suggester: Arc::new(NgramSuggester::train(["a good movie"])),
            paraphraser: Arc::new(IdentityParaphraser),
            restorer: Some(Arc::new(LexiconRestorer::new(lexicon))),
            semantic_encoder: Arc::new(HashedWordVecEncoder::new(32)),
        }
    }

    fn dataset() -> Dataset {
        let examples: Vec<TextExample> = (0..10)
            .map(|i| {
                TextExample::new(
                    format!("e{i}"),
                    format!("a good movie story quiet number{i}"),
                    if i % 2 == 0 { "pos" } else { "neg" },
                )
            })
            .collect();
        Dataset::new("d", Split::Train, vec!["pos".into(), "neg".into()], examples).unwrap()
    }

    #[test]
    fn size_doubles_and_originals_survive_verbatim() {
        let ds = dataset();
        let config = TransformConfig::new(
            TransformKind::SynonymSubstitution,
            resources(),
            RngStream::new(0),
        );
        let augmented = augment_with_transform(&ds, &config, 3);
        assert_eq!(augmented.len(), 20);
        for (orig, copy) in ds.examples.iter().zip(&augmented.examples) {
            assert_eq!(orig, copy);
        }
        for i in 0..10 {
            assert_eq!(augmented.examples[10 + i].id, format!("e{i}::aug"));
            assert_eq!(
                augmented.examples[10 + i].gold_label,
                ds.examples[i].gold_label
            );
        }
    }

    #[test]
    fn identity_behaving_transform_still_doubles() {
        let ds = dataset();
        // back translation with the identity paraphraser echoes the input
        let config = TransformConfig::new(
            TransformKind::BackTranslation,
            resources(),
            RngStream::new(0),
        );
        let augmented = augment_with_transform(&ds, &config, 3);
        assert_eq!(augmented.len(), 20);
        for i in 0..10 {
            assert_eq!(augmented.examples[10 + i].text, ds.examples[i].text);
        }
    }

    #[test]
    fn synonym_copies_respect_the_edit_budget() {
        let ds = dataset();
        let config = TransformConfig::new(
            TransformKind::SynonymSubstitution,
            resources(),
            RngStream::new(0),
        );
        let augmented = augment_with_transform(&ds, &config, 3);
        for i in 0..10 {
            let orig = tokenize(&ds.examples[i].text);
            let copy = tokenize(&augmented.examples[10 + i].text);
            assert_eq!(orig.len(), copy.len());
            let diff = orig.iter().zip(&copy).filter(|(a, b)| a != b).count();
            let budget = ((0.25 * orig.len() as f64).ceil()) as usize;
            assert!(diff <= budget, "{diff} edits exceed budget {budget}");
        }
    }
}
