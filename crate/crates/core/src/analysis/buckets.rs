//! Success rates by site-popularity rank bucket.

use std::fmt;

use crate::corpus::{Interval, MetadataRecord, PolicyDocument, TargetList};

/// Half-open popularity bands; sites without a rank at the relevant
/// interval land in `Beyond`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RankBucket {
    Top1K,
    To10K,
    To100K,
    To1M,
    Beyond,
}

impl RankBucket {
    pub const ALL: [RankBucket; 5] = [
        RankBucket::Top1K,
        RankBucket::To10K,
        RankBucket::To100K,
        RankBucket::To1M,
        RankBucket::Beyond,
    ];

    pub fn of(rank: Option<u32>) -> RankBucket {
        match rank {
            Some(r) if r <= 1_000 => RankBucket::Top1K,
            Some(r) if r <= 10_000 => RankBucket::To10K,
            Some(r) if r <= 100_000 => RankBucket::To100K,
            Some(r) if r <= 1_000_000 => RankBucket::To1M,
            _ => RankBucket::Beyond,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            RankBucket::Top1K => "(1,1K]",
            RankBucket::To10K => "(1K,10K]",
            RankBucket::To100K => "(10K,100K]",
            RankBucket::To1M => "(100K,1M]",
            RankBucket::Beyond => ">1M",
        }
    }
}

impl fmt::Display for RankBucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One bucket's attempt and policy counts; percent = policies per attempt.
#[derive(Clone, Debug, PartialEq)]
pub struct BucketStat {
    pub bucket: RankBucket,
    pub homepage_snapshots: u64,
    pub policies: u64,
    pub percent: f64,
}

/// Tabulate every homepage snapshot attempt and every curated policy by the
/// site's rank bucket at that interval. All five rows are always present,
/// in bucket order.
pub fn rank_bucket_stats(
    records: &[MetadataRecord],
    policies: &[PolicyDocument],
    targets: &TargetList,
) -> Vec<BucketStat> {
    let rank_of = |site: &str, interval: Interval| -> Option<u32> {
        targets.sites.get(site).and_then(|s| s.rank_at(interval))
    };

    let mut snapshots = [0u64; 5];
    for record in records {
        let bucket = RankBucket::of(rank_of(&record.site, record.interval));
        snapshots[bucket as usize] += 1;
    }
    let mut policy_counts = [0u64; 5];
    for policy in policies {
        let bucket = RankBucket::of(rank_of(&policy.site, policy.interval));
        policy_counts[bucket as usize] += 1;
    }

    RankBucket::ALL
        .iter()
        .map(|&bucket| {
            let i = bucket as usize;
            let percent = if snapshots[i] == 0 {
                0.0
            } else {
                100.0 * policy_counts[i] as f64 / snapshots[i] as f64
            };
            BucketStat {
                bucket,
                homepage_snapshots: snapshots[i],
                policies: policy_counts[i],
                percent,
            }
        })
        .collect()
}
