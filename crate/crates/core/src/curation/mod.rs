//! Corpus curation: parked-domain, redirect-artifact, and duplicate
//! removal, plus failure-cause accounting.

pub mod domain;
pub mod filters;
pub mod stats;

pub use domain::{registrable_domain, registrable_of_url, SuffixTable};
pub use filters::{
    curate, dedup_by_policy_url, filter_cohr, filter_parked, normalize_policy_url,
    parse_parking_list, StageCount,
};
pub use stats::{failure_stats, FailureStat};
