//! Term-trend surfacing: build per-interval document-frequency series for
//! several term kinds, score them, and rank the top movers. Also the
//! change-point concentration analysis over lemmatized n-grams.

use std::collections::{BTreeMap, BTreeSet};

use super::lemma::lemmatize;
use super::pelt::{default_penalty, pelt_changepoints};
use super::placeholders::normalize_placeholders;
use super::text::{ngrams, split_sentences, strip_markup, tokenize};
use super::AnalysisDoc;
use crate::corpus::Interval;
use crate::parallel::par_map;

/// Relative document frequency of one term per interval. Intervals with no
/// documents at all are absent; intervals with documents but no occurrence
/// carry an explicit 0.
#[derive(Clone, Debug, PartialEq)]
pub struct TermSeries {
    pub term: String,
    pub frequencies: BTreeMap<Interval, f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TermKind {
    /// Word n-grams of the placeholder-normalized text, n in 1..=4.
    NGram(usize),
    /// Whole sentences of the placeholder-normalized text.
    Sentence,
    /// Original strings behind entity placeholders.
    Entity,
    /// Original strings behind URL placeholders.
    Url,
}

impl TermKind {
    pub fn label(self) -> String {
        match self {
            TermKind::NGram(n) => format!("{n}-gram"),
            TermKind::Sentence => "sentence".to_string(),
            TermKind::Entity => "entity".to_string(),
            TermKind::Url => "url".to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scorer {
    /// Highest minus lowest frequency.
    Gain,
    /// Largest rise over a window of one or two intervals.
    PosSlope2,
}

impl Scorer {
    pub fn label(self) -> &'static str {
        match self {
            Scorer::Gain => "gain",
            Scorer::PosSlope2 => "pos_slope_2",
        }
    }

    pub fn score(self, values: &[f64]) -> f64 {
        match self {
            Scorer::Gain => score_gain(values),
            Scorer::PosSlope2 => score_pos_slope2(values),
        }
    }
}

/// max − min over the present intervals; 0 on empty or constant series.
pub fn score_gain(values: &[f64]) -> f64 {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        min = min.min(v);
        max = max.max(v);
    }
    if values.is_empty() {
        0.0
    } else {
        max - min
    }
}

/// Largest `f[i+k] − f[i]` for k in {1, 2}, floored at 0.
pub fn score_pos_slope2(values: &[f64]) -> f64 {
    let mut best = 0.0f64;
    for i in 0..values.len() {
        for k in 1..=2usize {
            if i + k < values.len() {
                best = best.max(values[i + k] - values[i]);
            }
        }
    }
    best
}

/// The terms of `kind` present in one document, deduplicated.
fn doc_terms(markdown: &str, kind: TermKind) -> BTreeSet<String> {
    let plain = strip_markup(markdown);
    let normalized = normalize_placeholders(&plain);
    match kind {
        TermKind::NGram(n) => {
            let tokens = tokenize(&normalized.text);
            ngrams(&tokens, n).into_iter().collect()
        }
        TermKind::Sentence => split_sentences(&normalized.text).into_iter().collect(),
        TermKind::Entity => normalized.entities.into_iter().collect(),
        TermKind::Url => normalized.urls.into_iter().collect(),
    }
}

/// Document-frequency series for every term of `kind` whose frequency
/// reaches `min_doc_freq` in at least one interval.
pub fn term_series(
    docs: &[AnalysisDoc],
    kind: TermKind,
    min_doc_freq: f64,
) -> Vec<TermSeries> {
    let mut interval_totals: BTreeMap<Interval, usize> = BTreeMap::new();
    for doc in docs {
        *interval_totals.entry(doc.interval).or_insert(0) += 1;
    }

    let per_doc: Vec<(Interval, BTreeSet<String>)> = par_map(docs.iter().collect(), |doc| {
        (doc.interval, doc_terms(&doc.markdown, kind))
    });

    let mut counts: BTreeMap<String, BTreeMap<Interval, usize>> = BTreeMap::new();
    for (interval, terms) in per_doc {
        for term in terms {
            *counts.entry(term).or_default().entry(interval).or_insert(0) += 1;
        }
    }

    let mut out = Vec::new();
    for (term, by_interval) in counts {
        let mut frequencies = BTreeMap::new();
        let mut peak = 0.0f64;
        for (&interval, &total) in &interval_totals {
            let k = by_interval.get(&interval).copied().unwrap_or(0);
            let f = k as f64 / total as f64;
            peak = peak.max(f);
            frequencies.insert(interval, f);
        }
        if peak >= min_doc_freq {
            out.push(TermSeries { term, frequencies });
        }
    }
    out
}

/// One ranked list of `(term, score)` per requested kind and scorer.
pub fn surface_trends(
    docs: &[AnalysisDoc],
    kinds: &[TermKind],
    scorers: &[Scorer],
    min_doc_freq: f64,
    top_k: usize,
) -> BTreeMap<(String, String), Vec<(String, f64)>> {
    let mut out = BTreeMap::new();
    for &kind in kinds {
        let series = term_series(docs, kind, min_doc_freq);
        for &scorer in scorers {
            let mut scored: Vec<(String, f64)> = series
                .iter()
                .map(|s| {
                    let values: Vec<f64> = s.frequencies.values().copied().collect();
                    (s.term.clone(), scorer.score(&values))
                })
                .collect();
            scored.sort_by(|a, b| {
                b.1.partial_cmp(&a.1)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then_with(|| a.0.cmp(&b.0))
            });
            scored.truncate(top_k);
            out.insert((kind.label(), scorer.label().to_string()), scored);
        }
    }
    out
}

/// Count PELT change points per interval across every lemmatized n-gram
/// whose document frequency reaches `min_doc_freq` somewhere. Terms see the
/// plain (not placeholder-normalized) text. Corpora spanning fewer than two
/// intervals have nothing to segment and return all-absent.
pub fn changepoint_concentration(
    docs: &[AnalysisDoc],
    n: usize,
    min_doc_freq: f64,
    penalty: Option<f64>,
) -> BTreeMap<Interval, usize> {
    let mut interval_totals: BTreeMap<Interval, usize> = BTreeMap::new();
    for doc in docs {
        *interval_totals.entry(doc.interval).or_insert(0) += 1;
    }
    let intervals: Vec<Interval> = interval_totals.keys().copied().collect();
    let mut out: BTreeMap<Interval, usize> = intervals.iter().map(|&iv| (iv, 0)).collect();
    if intervals.len() < 2 {
        return out;
    }

    let per_doc: Vec<(Interval, BTreeSet<String>)> = par_map(docs.iter().collect(), |doc| {
        let plain = strip_markup(&doc.markdown);
        let tokens: Vec<String> = tokenize(&plain).iter().map(|t| lemmatize(t)).collect();
        (doc.interval, ngrams(&tokens, n).into_iter().collect())
    });

    let mut counts: BTreeMap<String, BTreeMap<Interval, usize>> = BTreeMap::new();
    for (interval, terms) in per_doc {
        for term in terms {
            *counts.entry(term).or_default().entry(interval).or_insert(0) += 1;
        }
    }

    for (_, by_interval) in counts {
        let series: Vec<f64> = intervals
            .iter()
            .map(|iv| {
                by_interval.get(iv).copied().unwrap_or(0) as f64 / interval_totals[iv] as f64
            })
            .collect();
        if series.iter().cloned().fold(0.0f64, f64::max) < min_doc_freq {
            continue;
        }
        let beta = penalty.unwrap_or_else(|| default_penalty(&series));
        let cps = pelt_changepoints(&series, beta).expect("series spans >= 2 intervals");
        for cp in cps {
            *out.get_mut(&intervals[cp]).unwrap() += 1;
        }
    }
    out
}
