//! Longitudinal metrics over the curated corpus: lengths, readability,
//! update detection, change points, term trends, matchers, outbound policy
//! links, and rank-bucket success rates.

pub mod buckets;
pub mod lemma;
pub mod matchers;
pub mod outbound;
pub mod pelt;
pub mod placeholders;
pub mod readability;
pub mod similarity;
pub mod text;
pub mod trends;
pub mod updates;

pub use buckets::{rank_bucket_stats, BucketStat, RankBucket};
pub use lemma::lemmatize;
pub use matchers::{match_terms, parse_matcher_pack, Matcher};
pub use outbound::{outbound_policy_links, LinkedPolicy, OutboundLinks};
pub use pelt::{default_penalty, pelt_changepoints};
pub use placeholders::{normalize_placeholders, NormalizedText};
pub use readability::{fkgl, syllables};
pub use similarity::similarity_ratio;
pub use text::word_count;
pub use trends::{
    changepoint_concentration, score_gain, score_pos_slope2, surface_trends, term_series,
    Scorer, TermKind, TermSeries,
};
pub use updates::{detect_updates, update_length, UpdateStatus};

use crate::corpus::Interval;
use thiserror::Error;

/// One curated document as the analysis passes see it.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisDoc {
    pub site: String,
    pub interval: Interval,
    pub markdown: String,
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("text has no sentences, readability undefined")]
    NoSentences,
    #[error("series of length {0} is too short for change-point detection")]
    SeriesTooShort(usize),
    #[error("bad matcher pack: {0}")]
    BadMatcherPack(String),
}
