//! Feature vectors: occurrence counts of vocabulary terms.

use std::collections::HashMap;

use super::vocab::{body_terms_of, Vocabulary};

/// Count vocabulary-term occurrences in a preprocessed document. Body
/// features come first, then title features; the vector length always
/// equals the vocabulary dimension.
pub fn featurize(
    body_tokens: &[String],
    title_tokens: &[String],
    vocab: &Vocabulary,
) -> Vec<f64> {
    let mut body_counts: HashMap<String, u32> = HashMap::new();
    for term in body_terms_of(body_tokens) {
        *body_counts.entry(term).or_insert(0) += 1;
    }
    let mut title_counts: HashMap<&str, u32> = HashMap::new();
    for term in title_tokens {
        *title_counts.entry(term.as_str()).or_insert(0) += 1;
    }

    let mut out = Vec::with_capacity(vocab.dimension());
    for term in &vocab.body_terms {
        out.push(f64::from(body_counts.get(term).copied().unwrap_or(0)));
    }
    for term in &vocab.title_terms {
        out.push(f64::from(title_counts.get(term.as_str()).copied().unwrap_or(0)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::vocab::build_vocabulary;

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn counts_match_hand_example() {
        let vocab = Vocabulary {
            body_terms: vec!["cookie".into(), "cookie policy".into(), "policy".into()],
            title_terms: Vec::new(),
            doc_freq_floor: 0.0,
        };
        let body = toks(&["cookie", "cookie", "policy"]);
        // unigrams: cookie ×2, policy ×1; bigram "cookie policy" ×1
        assert_eq!(featurize(&body, &[], &vocab), vec![2.0, 1.0, 1.0]);
    }

    #[test]
    fn out_of_vocabulary_document_is_zero_vector() {
        let docs = vec![(toks(&["privacy", "policy"]), toks(&["privacy"]))];
        let vocab = build_vocabulary(&docs, 0.0);
        let vec = featurize(&toks(&["unrelated", "words"]), &toks(&["other"]), &vocab);
        assert_eq!(vec.len(), vocab.dimension());
        assert!(vec.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn title_features_fill_the_tail() {
        let vocab = Vocabulary {
            body_terms: vec!["data".into()],
            title_terms: vec!["policy".into(), "privacy".into()],
            doc_freq_floor: 0.0,
        };
        let vec = featurize(&toks(&["data"]), &toks(&["privacy", "policy"]), &vocab);
        assert_eq!(vec, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn featurize_depends_only_on_tokens() {
        let docs = vec![(toks(&["a", "b", "c"]), Vec::new())];
        let vocab = build_vocabulary(&docs, 0.0);
        let first = featurize(&toks(&["a", "b"]), &[], &vocab);
        let second = featurize(&toks(&["a", "b"]), &[], &vocab);
        assert_eq!(first, second);
    }
}
