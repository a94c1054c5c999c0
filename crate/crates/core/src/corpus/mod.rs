//! Corpus data model: the half-year time axis, site and document records,
//! rank-list ingestion, and the on-disk store.

pub mod interval;
pub mod store;
pub mod targets;
pub mod types;

pub use interval::{interval_of, interval_of_timestamp14, parse_timestamp14, Half, Interval};
pub use store::{read_metadata_log, write_metadata_log, CorpusStore};
pub use targets::{build_target_list, RankList, TargetList};
pub use types::{
    FailureCause, MetadataRecord, Outcome, PolicyDocument, SiteRecord, SnapshotRef,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("bad interval {0:?}: expected <year><A|B> like 2005A")]
    BadInterval(String),
    #[error("year {0} precedes the archive era")]
    YearOutOfRange(i32),
    #[error("bad timestamp {0:?}: expected 14 digits YYYYMMDDhhmmss")]
    BadTimestamp(String),
    #[error("bad HTTP status {0}")]
    BadStatus(u16),
    #[error("interval mismatch: expected {expected}, got {actual}")]
    IntervalMismatch { expected: Interval, actual: Interval },
    #[error("empty document for {site} {interval}")]
    EmptyDocument { site: String, interval: Interval },
    #[error("bad outcome {0:?}")]
    BadOutcome(String),
    #[error("bad rank list: {0}")]
    BadRankList(String),
    #[error("bad metadata log: {0}")]
    BadMetadata(String),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
}
