//! Failure-cause accounting over the metadata log.

use serde::{Deserialize, Serialize};

use crate::corpus::{FailureCause, MetadataRecord, Outcome};

/// One failure cause with its share of all homepage snapshot attempts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureStat {
    pub cause: FailureCause,
    pub count: u64,
    /// Percent of all attempts (successes included in the denominator).
    pub percent: f64,
}

/// Count failures by cause. Rows are sorted by count descending (cause
/// order breaks ties); causes that never occurred are omitted.
pub fn failure_stats(records: &[MetadataRecord]) -> Vec<FailureStat> {
    let total = records.len();
    if total == 0 {
        return Vec::new();
    }
    let mut counts: Vec<(FailureCause, u64)> =
        FailureCause::ALL.iter().map(|&c| (c, 0u64)).collect();
    for record in records {
        if let Outcome::Failure(cause) = record.outcome {
            let slot = counts
                .iter_mut()
                .find(|(c, _)| *c == cause)
                .expect("ALL covers every cause");
            slot.1 += 1;
        }
    }
    counts.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    counts
        .into_iter()
        .filter(|&(_, count)| count > 0)
        .map(|(cause, count)| FailureStat {
            cause,
            count,
            percent: 100.0 * count as f64 / total as f64,
        })
        .collect()
}
