//! The four randomization processes plus spelling restoration, each a
//! seeded text-to-text map. Restoration always runs first, then the
//! kind-specific operation.

mod lexicon;
mod ops;
mod paraphrase;
mod restore;
mod suggest;

pub use lexicon::{
    default_neutral_adverbs, load_adverb_list, stopwords, Lexicon, LexiconPosTagger, PosTag,
    PosTagger, SynonymLexicon,
};
pub use ops::{
    back_translate, random_adverb_insertion, random_mlm_suggestion, random_synonym_substitution,
};
pub use paraphrase::{IdentityParaphraser, Paraphraser, RuleParaphraser};
pub use restore::{LexiconRestorer, SpellingRestorer};
pub use suggest::{FillInSuggester, FixedSuggester, NgramSuggester};

use crate::constraints::SemanticEncoder;
use crate::core::RngStream;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed lexicon row at line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("adverb lexicon is empty")]
    EmptyAdverbLexicon,
    #[error("transform kind {kind:?} requires hook {hook}")]
    MissingHook { kind: TransformKind, hook: &'static str },
    #[error("substitution fraction must be in (0, 1], got {0}")]
    BadFraction(f64),
}

pub type Result<T> = std::result::Result<T, TransformError>;

/// The four randomization processes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    SynonymSubstitution,
    AdverbInsertion,
    MlmSuggestion,
    BackTranslation,
}

impl TransformKind {
    pub const ALL: [TransformKind; 4] = [
        TransformKind::SynonymSubstitution,
        TransformKind::AdverbInsertion,
        TransformKind::MlmSuggestion,
        TransformKind::BackTranslation,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TransformKind::SynonymSubstitution => "synonym_substitution",
            TransformKind::AdverbInsertion => "adverb_insertion",
            TransformKind::MlmSuggestion => "mlm_suggestion",
            TransformKind::BackTranslation => "back_translation",
        }
    }

    pub fn parse(s: &str) -> Option<TransformKind> {
        match s {
            "synonym_substitution" | "synonym" | "substitution" => {
                Some(TransformKind::SynonymSubstitution)
            }
            "adverb_insertion" | "adverb" | "insertion" => Some(TransformKind::AdverbInsertion),
            "mlm_suggestion" | "mlm" | "suggestion" => Some(TransformKind::MlmSuggestion),
            "back_translation" | "back-translation" | "backtranslation" => {
                Some(TransformKind::BackTranslation)
            }
            _ => None,
        }
    }
}

/// Shared hooks and lexical resources behind the transforms. Build once,
/// clone cheaply.
#[derive(Clone)]
pub struct TransformResources {
    pub synonyms: Arc<SynonymLexicon>,
    pub adverbs: Arc<Vec<String>>,
    pub tagger: Arc<dyn PosTagger>,
    pub suggester: Arc<dyn FillInSuggester>,
    pub paraphraser: Arc<dyn Paraphraser>,
    pub restorer: Option<Arc<dyn SpellingRestorer>>,
    pub semantic_encoder: Arc<dyn SemanticEncoder>,
}

/// A fully configured transform: kind, parameters, hooks, and the random
/// stream it draws from.
#[derive(Clone)]
pub struct TransformConfig {
    pub kind: TransformKind,
    pub substitution_fraction: f64,
    pub resources: TransformResources,
    pub rng: RngStream,
}

impl TransformConfig {
    pub fn new(kind: TransformKind, resources: TransformResources, rng: RngStream) -> Self {
        Self {
            kind,
            substitution_fraction: 0.25,
            resources,
            rng,
        }
    }

    /// Same transform, different stream.
    pub fn with_rng(&self, rng: RngStream) -> Self {
        Self {
            rng,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.substitution_fraction > 0.0 && self.substitution_fraction <= 1.0) {
            return Err(TransformError::BadFraction(self.substitution_fraction));
        }
        if self.kind == TransformKind::AdverbInsertion && self.resources.adverbs.is_empty() {
            return Err(TransformError::EmptyAdverbLexicon);
        }
        Ok(())
    }
}

/// Restore spelling, then apply the kind-specific randomization, drawing
/// from the config's stream. Pure in `(text, config)`: the same stream path
/// always yields the same output.
pub fn apply(config: &TransformConfig, text: &str) -> Result<String> {
    config.validate()?;
    let restored = match &config.resources.restorer {
        Some(restorer) => restorer.restore(text),
        None => text.to_string(),
    };
    let mut rng = config.rng.rng();
    let out = match config.kind {
        TransformKind::SynonymSubstitution => random_synonym_substitution(
            &restored,
            &config.resources.synonyms,
            config.substitution_fraction,
            &mut rng,
        ),
        TransformKind::AdverbInsertion => random_adverb_insertion(
            &restored,
            &config.resources.adverbs,
            config.resources.tagger.as_ref(),
            &mut rng,
        )?,
        TransformKind::MlmSuggestion => {
            random_mlm_suggestion(&restored, config.resources.suggester.as_ref(), &mut rng)
        }
        TransformKind::BackTranslation => {
            let variant: u64 = rng.gen();
            back_translate(
                &restored,
                config.resources.paraphraser.as_ref(),
                config.resources.semantic_encoder.as_ref(),
                variant,
            )
        }
    };
    Ok(out)
}

/// The family of transform draws sampled in during-attack randomization and
/// by the adaptive attack: one base configuration, one fresh stream path
/// per draw index.
#[derive(Clone)]
pub struct TransformDistribution {
    base: TransformConfig,
}

impl TransformDistribution {
    pub fn new(base: TransformConfig) -> Self {
        Self { base }
    }

    pub fn kind(&self) -> TransformKind {
        self.base.kind
    }

    /// Apply draw `index`; the same `(text, index)` always produces the
    /// same output.
    pub fn apply_draw(&self, text: &str, index: u64) -> Result<String> {
        apply(&self.base.with_rng(self.base.rng.derive(index)), text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::HashedWordVecEncoder;

    pub(crate) fn test_resources() -> TransformResources {
        let mut synonyms = SynonymLexicon::new();
        synonyms.insert_group(&["good", "great", "fine"]);
        synonyms.insert_group(&["movie", "film", "picture"]);
        synonyms.insert_group(&["story", "plot", "tale"]);
        let synonyms = Arc::new(synonyms);

        let mut lexicon = Lexicon::from_texts([
            "the good movie had a fine story",
            "a great film with a quiet plot",
        ]);
        lexicon.absorb(synonyms.vocabulary());

        let mut tagger = LexiconPosTagger::default();
        tagger.insert("had", PosTag::Verb);
        tagger.insert("was", PosTag::Verb);

        TransformResources {
            synonyms: synonyms.clone(),
            adverbs: Arc::new(vec!["really".into(), "quite".into()]),
            tagger: Arc::new(tagger),
            suggester: Arc::new(NgramSuggester::train([
                "the good movie had a fine story",
                "a great film with a quiet plot",
            ])),
            paraphraser: Arc::new(RuleParaphraser::new(synonyms)),
            restorer: Some(Arc::new(LexiconRestorer::new(lexicon))),
            semantic_encoder: Arc::new(HashedWordVecEncoder::new(64)),
        }
    }

    #[test]
    fn restoration_runs_before_substitution() {
        let config = TransformConfig::new(
            TransformKind::SynonymSubstitution,
            test_resources(),
            RngStream::new(11),
        );
        let out = apply(&config, "the gooq movie had a fine story").unwrap();
        // the typo is repaired, so every output token is in-lexicon
        assert!(!out.contains("gooq"));
        let restorer_only = config
            .resources
            .restorer
            .as_ref()
            .unwrap()
            .restore("the gooq movie had a fine story");
        assert_eq!(restorer_only, "the good movie had a fine story");
    }

    #[test]
    fn clean_text_restoration_is_identity_then_substitutes() {
        let config = TransformConfig::new(
            TransformKind::SynonymSubstitution,
            test_resources(),
            RngStream::new(11),
        );
        let input = "the good movie had a fine story";
        let out = apply(&config, input).unwrap();
        assert_ne!(out, input, "quota of at least one substitution applies");
    }

    #[test]
    fn same_path_same_output_for_every_kind() {
        for kind in TransformKind::ALL {
            let config =
                TransformConfig::new(kind, test_resources(), RngStream::new(7).derive(3));
            let a = apply(&config, "the good movie had a fine story").unwrap();
            let b = apply(&config, "the good movie had a fine story").unwrap();
            assert_eq!(a, b, "kind {kind:?} not deterministic");
        }
    }

    #[test]
    fn distribution_draws_are_reproducible_and_varied() {
        let config = TransformConfig::new(
            TransformKind::SynonymSubstitution,
            test_resources(),
            RngStream::new(5),
        );
        let dist = TransformDistribution::new(config);
        let text = "the good movie had a fine story";
        let d0 = dist.apply_draw(text, 0).unwrap();
        let d0_again = dist.apply_draw(text, 0).unwrap();
        assert_eq!(d0, d0_again);
        let all: Vec<String> = (0..8).map(|i| dist.apply_draw(text, i).unwrap()).collect();
        let distinct: std::collections::BTreeSet<&String> = all.iter().collect();
        assert!(distinct.len() > 1, "draws never vary");
    }

    #[test]
    fn bad_fraction_is_rejected() {
        let mut config = TransformConfig::new(
            TransformKind::SynonymSubstitution,
            test_resources(),
            RngStream::new(5),
        );
        config.substitution_fraction = 0.0;
        assert!(matches!(
            apply(&config, "text"),
            Err(TransformError::BadFraction(_))
        ));
    }
}
