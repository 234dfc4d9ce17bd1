//! Attack configuration: family, constraint profile, budgets, candidate
//! sources, and the optional anomaly gate.

use crate::constraints::{AnomalyScorer, ConstraintSet, DEFAULT_MAX_DEGREE_OF_ANOMALY};
use crate::core::tokenize;
use crate::transforms::{FillInSuggester, Paraphraser, SynonymLexicon};
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// The four attack families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackFamily {
    CharEdit,
    WordSynonym,
    WordMlm,
    SentenceParaphrase,
}

impl AttackFamily {
    pub const ALL: [AttackFamily; 4] = [
        AttackFamily::CharEdit,
        AttackFamily::WordSynonym,
        AttackFamily::WordMlm,
        AttackFamily::SentenceParaphrase,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            AttackFamily::CharEdit => "char_edit",
            AttackFamily::WordSynonym => "word_synonym",
            AttackFamily::WordMlm => "word_mlm",
            AttackFamily::SentenceParaphrase => "sentence_paraphrase",
        }
    }

    pub fn parse(s: &str) -> Option<AttackFamily> {
        match s {
            "char_edit" | "char" => Some(AttackFamily::CharEdit),
            "word_synonym" | "synonym" => Some(AttackFamily::WordSynonym),
            "word_mlm" | "mlm" => Some(AttackFamily::WordMlm),
            "sentence_paraphrase" | "paraphrase" | "sentence" => {
                Some(AttackFamily::SentenceParaphrase)
            }
            _ => None,
        }
    }
}

/// Victim-query ceiling per example.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryBudget {
    Fixed(u64),
    /// `factor * word_count + base`.
    PerWord { factor: u64, base: u64 },
}

impl Default for QueryBudget {
    fn default() -> Self {
        QueryBudget::PerWord { factor: 2, base: 500 }
    }
}

impl QueryBudget {
    pub fn for_text(&self, text: &str) -> u64 {
        match *self {
            QueryBudget::Fixed(n) => n,
            QueryBudget::PerWord { factor, base } => {
                factor * tokenize(text).len() as u64 + base
            }
        }
    }
}

/// Counts degree queries so detector load is reported separately from
/// victim queries.
pub struct CountingAnomalyScorer {
    inner: Arc<dyn AnomalyScorer>,
    count: AtomicU64,
}

impl CountingAnomalyScorer {
    pub fn new(inner: Arc<dyn AnomalyScorer>) -> Self {
        Self {
            inner,
            count: AtomicU64::new(0),
        }
    }

    pub fn count(&self) -> u64 {
        self.count.load(Ordering::SeqCst)
    }
}

impl AnomalyScorer for CountingAnomalyScorer {
    fn degree(&self, premise: Option<&str>, text: &str) -> f64 {
        self.count.fetch_add(1, Ordering::SeqCst);
        self.inner.degree(premise, text)
    }
}

/// Everything an attack engine needs besides the endpoint.
#[derive(Clone)]
pub struct AttackSpec {
    pub family: AttackFamily,
    pub constraints: ConstraintSet,
    pub query_budget: QueryBudget,
    /// Candidate pool size for fill-in attacks.
    pub mlm_top_k: usize,
    /// Number of paraphrase candidates for sentence attacks.
    pub paraphrase_count: u64,
    pub synonyms: Option<Arc<SynonymLexicon>>,
    pub suggester: Option<Arc<dyn FillInSuggester>>,
    pub paraphraser: Option<Arc<dyn Paraphraser>>,
    /// Enforce the anomaly ceiling on intermediate candidates too.
    pub strict_anomaly: bool,
    anomaly_counter: Option<Arc<CountingAnomalyScorer>>,
}

impl AttackSpec {
    pub fn new(family: AttackFamily, constraints: ConstraintSet) -> Self {
        Self {
            family,
            constraints,
            query_budget: QueryBudget::default(),
            mlm_top_k: 48,
            paraphrase_count: 10,
            synonyms: None,
            suggester: None,
            paraphraser: None,
            strict_anomaly: false,
            anomaly_counter: None,
        }
    }

    pub fn with_synonyms(mut self, synonyms: Arc<SynonymLexicon>) -> Self {
        self.synonyms = Some(synonyms);
        self
    }

    pub fn with_suggester(mut self, suggester: Arc<dyn FillInSuggester>) -> Self {
        self.suggester = Some(suggester);
        self
    }

    pub fn with_paraphraser(mut self, paraphraser: Arc<dyn Paraphraser>) -> Self {
        self.paraphraser = Some(paraphraser);
        self
    }

    /// Require `Degree(final) < max_degree` for success. The scorer is
    /// wrapped so its queries are counted separately; the constraint binds
    /// the final candidate unless `strict` also filters intermediates.
    pub fn with_anomaly_constraint(mut self, scorer: Arc<dyn AnomalyScorer>, strict: bool) -> Self {
        let counting = Arc::new(CountingAnomalyScorer::new(scorer));
        self.constraints = self
            .constraints
            .clone()
            .with_anomaly_constraint(counting.clone(), DEFAULT_MAX_DEGREE_OF_ANOMALY);
        self.anomaly_counter = Some(counting);
        self.strict_anomaly = strict;
        self
    }

    pub(crate) fn detector_queries(&self) -> u64 {
        self.anomaly_counter.as_ref().map(|c| c.count()).unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_budget_is_two_per_word_plus_five_hundred() {
        let budget = QueryBudget::default();
        assert_eq!(budget.for_text("one two three four"), 508);
        assert_eq!(QueryBudget::Fixed(42).for_text("anything"), 42);
    }

    #[test]
    fn counting_scorer_counts() {
        struct Zero;
        impl AnomalyScorer for Zero {
            fn degree(&self, _p: Option<&str>, _t: &str) -> f64 {
                0.0
            }
        }
        let counter = CountingAnomalyScorer::new(Arc::new(Zero));
        counter.degree(None, "a");
        counter.degree(None, "b");
        assert_eq!(counter.count(), 2);
    }

    #[test]
    fn anomaly_wiring_enables_the_constraint() {
        struct High;
        impl AnomalyScorer for High {
            fn degree(&self, _p: Option<&str>, _t: &str) -> f64 {
                0.9
            }
        }
        let spec = AttackSpec::new(AttackFamily::CharEdit, ConstraintSet::char_profile())
            .with_anomaly_constraint(Arc::new(High), false);
        assert!(spec.constraints.anomaly_enabled());
        assert_eq!(spec.detector_queries(), 0);
    }
}
