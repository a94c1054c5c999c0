//! Vocabulary construction: body word n-grams (1..=4) and title unigrams
//! above a document-frequency floor, in stable lexicographic order.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::analysis::text::ngrams;

pub const MAX_NGRAM: usize = 4;

/// Feature terms with stable indices: body terms first, then title terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub body_terms: Vec<String>,
    pub title_terms: Vec<String>,
    pub doc_freq_floor: f64,
}

impl Vocabulary {
    pub fn dimension(&self) -> usize {
        self.body_terms.len() + self.title_terms.len()
    }
}

/// All body n-grams (1..=4) of a preprocessed token sequence.
pub fn body_terms_of(tokens: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    for n in 1..=MAX_NGRAM {
        out.extend(ngrams(tokens, n));
    }
    out
}

/// Build the vocabulary over preprocessed (body tokens, title tokens)
/// pairs. A term survives iff its document frequency is at least `floor`
/// (inclusive: a term in exactly 1% of documents stays).
pub fn build_vocabulary(docs: &[(Vec<String>, Vec<String>)], floor: f64) -> Vocabulary {
    let n_docs = docs.len();
    let mut body_df: BTreeMap<String, usize> = BTreeMap::new();
    let mut title_df: BTreeMap<String, usize> = BTreeMap::new();

    for (body, title) in docs {
        let body_set: BTreeSet<String> = body_terms_of(body).into_iter().collect();
        for term in body_set {
            *body_df.entry(term).or_insert(0) += 1;
        }
        let title_set: BTreeSet<&String> = title.iter().collect();
        for term in title_set {
            *title_df.entry(term.clone()).or_insert(0) += 1;
        }
    }

    let keep = |df: usize| n_docs > 0 && df as f64 / n_docs as f64 >= floor;
    // BTreeMap iteration is already lexicographic
    Vocabulary {
        body_terms: body_df
            .into_iter()
            .filter(|&(_, df)| keep(df))
            .map(|(t, _)| t)
            .collect(),
        title_terms: title_df
            .into_iter()
            .filter(|&(_, df)| keep(df))
            .map(|(t, _)| t)
            .collect(),
        doc_freq_floor: floor,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn one_percent_boundary_is_inclusive() {
        let mut docs: Vec<(Vec<String>, Vec<String>)> = Vec::new();
        docs.push((toks(&["rare"]), Vec::new()));
        for _ in 0..99 {
            docs.push((toks(&["common"]), Vec::new()));
        }
        let vocab = build_vocabulary(&docs, 0.01);
        assert!(vocab.body_terms.contains(&"rare".to_string()));
        assert!(vocab.body_terms.contains(&"common".to_string()));

        // one of 101 documents falls below the floor
        docs.push((toks(&["common"]), Vec::new()));
        let vocab = build_vocabulary(&docs, 0.01);
        assert!(!vocab.body_terms.contains(&"rare".to_string()));
    }

    #[test]
    fn floor_zero_keeps_everything_observed() {
        let docs = vec![(toks(&["alpha", "beta"]), toks(&["gamma"]))];
        let vocab = build_vocabulary(&docs, 0.0);
        assert!(vocab.body_terms.contains(&"alpha beta".to_string()));
        assert_eq!(vocab.title_terms, vec!["gamma".to_string()]);
    }

    #[test]
    fn ngrams_up_to_four_lexicographic() {
        let docs = vec![(toks(&["d", "c", "b", "a"]), Vec::new())];
        let vocab = build_vocabulary(&docs, 0.0);
        let mut sorted = vocab.body_terms.clone();
        sorted.sort();
        assert_eq!(vocab.body_terms, sorted);
        assert!(vocab.body_terms.contains(&"d c b a".to_string()));
        assert!(vocab.body_terms.contains(&"c b".to_string()));
        assert_eq!(vocab.body_terms.len(), 4 + 3 + 2 + 1);
    }

    #[test]
    fn document_frequency_counts_documents_not_occurrences() {
        // "spam" appears five times but only in one of two documents
        let docs = vec![
            (toks(&["spam", "spam", "spam", "spam", "spam"]), Vec::new()),
            (toks(&["ham"]), Vec::new()),
        ];
        let vocab = build_vocabulary(&docs, 0.6);
        assert!(!vocab.body_terms.contains(&"spam".to_string()));
    }

    #[test]
    fn title_terms_are_unigrams_only() {
        let docs = vec![(Vec::new(), toks(&["privacy", "policy"]))];
        let vocab = build_vocabulary(&docs, 0.0);
        assert_eq!(vocab.title_terms, vec!["policy".to_string(), "privacy".to_string()]);
        assert!(vocab.body_terms.is_empty());
    }

    #[test]
    fn empty_corpus_empty_vocabulary() {
        let vocab = build_vocabulary(&[], 0.01);
        assert_eq!(vocab.dimension(), 0);
    }
}
