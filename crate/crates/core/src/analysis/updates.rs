//! Update detection between consecutive interval snapshots of one site, and
//! the line-level length of an update.

use std::collections::BTreeMap;

use super::similarity::similarity_ratio;
use crate::corpus::Interval;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpdateStatus {
    /// Similarity to the previous interval's text is at or below the
    /// threshold.
    Updated,
    /// A previous-interval text exists and similarity exceeds the threshold.
    Unchanged,
    /// The immediately preceding interval has no document (gap or first
    /// snapshot), so no comparison is possible.
    Skipped,
}

/// Classify every interval of one site's interval-ordered documents.
/// `threshold` is the largest similarity ratio still counted as an update
/// (95 means "ratio ≤ 95 → updated").
pub fn detect_updates(
    docs: &BTreeMap<Interval, String>,
    threshold: u32,
) -> BTreeMap<Interval, UpdateStatus> {
    let mut out = BTreeMap::new();
    for (&interval, text) in docs {
        let status = match docs.get(&interval.prev()) {
            None => UpdateStatus::Skipped,
            Some(prev_text) => {
                if similarity_ratio(prev_text, text) <= threshold {
                    UpdateStatus::Updated
                } else {
                    UpdateStatus::Unchanged
                }
            }
        };
        out.insert(interval, status);
    }
    out
}

/// Added lines minus deleted lines under a longest-common-subsequence line
/// diff of the two texts. Negative when the document shrank.
pub fn update_length(prev: &str, cur: &str) -> i64 {
    let a: Vec<&str> = prev.lines().collect();
    let b: Vec<&str> = cur.lines().collect();
    let common = lcs_len(&a, &b) as i64;
    let additions = b.len() as i64 - common;
    let deletions = a.len() as i64 - common;
    additions - deletions
}

/// Longest common subsequence length, O(n·m) time, two-row memory.
fn lcs_len(a: &[&str], b: &[&str]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for i in 0..a.len() {
        for j in 0..b.len() {
            cur[j + 1] = if a[i] == b[j] {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(s: &str) -> Interval {
        s.parse().unwrap()
    }

    #[test]
    fn identical_texts_are_unchanged() {
        let mut docs = BTreeMap::new();
        docs.insert(iv("2017A"), "same text".to_string());
        docs.insert(iv("2017B"), "same text".to_string());
        let st = detect_updates(&docs, 95);
        assert_eq!(st[&iv("2017A")], UpdateStatus::Skipped);
        assert_eq!(st[&iv("2017B")], UpdateStatus::Unchanged);
    }

    #[test]
    fn threshold_is_inclusive() {
        // craft ratio exactly 95: M=19, lengths 20+20 → 2·19/40 = 0.95
        let a = "aaaaaaaaaaaaaaaaaaab";
        let b = "aaaaaaaaaaaaaaaaaaac";
        assert_eq!(similarity_ratio(a, b), 95);
        let mut docs = BTreeMap::new();
        docs.insert(iv("2018A"), a.to_string());
        docs.insert(iv("2018B"), b.to_string());
        assert_eq!(detect_updates(&docs, 95)[&iv("2018B")], UpdateStatus::Updated);
    }

    #[test]
    fn gap_skips_the_following_interval() {
        let mut docs = BTreeMap::new();
        docs.insert(iv("2016B"), "x".to_string());
        // 2017A missing
        docs.insert(iv("2017B"), "y".to_string());
        let st = detect_updates(&docs, 95);
        assert_eq!(st[&iv("2017B")], UpdateStatus::Skipped);
    }

    #[test]
    fn rewrite_detected_as_update() {
        let mut docs = BTreeMap::new();
        docs.insert(iv("2018A"), "We collect nothing at all.".to_string());
        docs.insert(
            iv("2018B"),
            "Under the new regulation we process personal data lawfully.".to_string(),
        );
        assert_eq!(detect_updates(&docs, 95)[&iv("2018B")], UpdateStatus::Updated);
    }

    #[test]
    fn update_length_examples() {
        assert_eq!(update_length("a\nb", "a\nb"), 0);
        assert_eq!(update_length("a\nb", "a\nb\nc\nd\ne"), 3);
        assert_eq!(update_length("a\nb\nc", "a"), -2);
        // replacement keeps the count balanced
        assert_eq!(update_length("a\nold\nb", "a\nnew\nb"), 0);
    }

    #[test]
    fn update_length_antisymmetric() {
        let a = "one\ntwo\nthree\nfour";
        let b = "one\nthree\nextra\nmore";
        assert_eq!(update_length(a, b), -update_length(b, a));
    }

    #[test]
    fn update_length_equals_line_count_delta() {
        // the LCS terms cancel, so the diff length is the line-count change
        let a = "p\nq\nr";
        let b = "x\ny";
        assert_eq!(update_length(a, b), b.lines().count() as i64 - a.lines().count() as i64);
    }
}
