//! Core record types shared across the pipeline.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::interval::{interval_of_timestamp14, Interval};
use super::CorpusError;

/// One site in the target list, with its rank per interval where a rank
/// list was ingested. Missing rank means "unranked" (the >1M bucket), never
/// rank zero.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SiteRecord {
    pub domain: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub ranks: BTreeMap<Interval, u32>,
    /// Site-level language from the discover precheck, when enabled.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
}

impl SiteRecord {
    pub fn new(domain: impl Into<String>) -> Self {
        SiteRecord {
            domain: domain.into(),
            ranks: BTreeMap::new(),
            language: None,
        }
    }

    pub fn rank_at(&self, interval: Interval) -> Option<u32> {
        self.ranks.get(&interval).copied()
    }
}

/// One archived capture of a URL.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotRef {
    pub original_url: String,
    /// 14-digit archive timestamp, `YYYYMMDDhhmmss`.
    pub timestamp: String,
    pub status: u16,
    pub mime: String,
    pub digest: String,
}

impl SnapshotRef {
    /// Validates the timestamp and status-range invariants.
    pub fn validate(&self) -> Result<(), CorpusError> {
        super::interval::parse_timestamp14(&self.timestamp)?;
        if !(100..=599).contains(&self.status) {
            return Err(CorpusError::BadStatus(self.status));
        }
        Ok(())
    }

    pub fn interval(&self) -> Result<Interval, CorpusError> {
        interval_of_timestamp14(&self.timestamp)
    }
}

/// An extracted policy for one `(site, interval)` cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyDocument {
    pub site: String,
    pub interval: Interval,
    pub homepage_snapshot: SnapshotRef,
    pub policy_url: String,
    pub policy_timestamp: String,
    /// May be empty when the page had no `<title>`.
    pub title: String,
    pub markdown: String,
    pub link_text: String,
    pub language: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classifier_score: Option<f64>,
}

impl PolicyDocument {
    /// The stored-document invariants: the policy timestamp falls in the
    /// document's interval and the markdown is non-empty.
    pub fn validate(&self) -> Result<(), CorpusError> {
        let iv = interval_of_timestamp14(&self.policy_timestamp)?;
        if iv != self.interval {
            return Err(CorpusError::IntervalMismatch {
                expected: self.interval,
                actual: iv,
            });
        }
        if self.markdown.is_empty() {
            return Err(CorpusError::EmptyDocument {
                site: self.site.clone(),
                interval: self.interval,
            });
        }
        Ok(())
    }
}

/// Why a homepage snapshot attempt did not produce a stored policy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FailureCause {
    NoPolicyLinkFound,
    BlankHomepage,
    NonEnglishHomepage,
    PolicyNotArchivedInInterval,
    OutOfIntervalRedirect,
    FetchError,
    NonEnglishPolicy,
    ClassifiedNegative,
}

impl FailureCause {
    pub const ALL: [FailureCause; 8] = [
        FailureCause::NoPolicyLinkFound,
        FailureCause::BlankHomepage,
        FailureCause::NonEnglishHomepage,
        FailureCause::PolicyNotArchivedInInterval,
        FailureCause::OutOfIntervalRedirect,
        FailureCause::FetchError,
        FailureCause::NonEnglishPolicy,
        FailureCause::ClassifiedNegative,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FailureCause::NoPolicyLinkFound => "NoPolicyLinkFound",
            FailureCause::BlankHomepage => "BlankHomepage",
            FailureCause::NonEnglishHomepage => "NonEnglishHomepage",
            FailureCause::PolicyNotArchivedInInterval => "PolicyNotArchivedInInterval",
            FailureCause::OutOfIntervalRedirect => "OutOfIntervalRedirect",
            FailureCause::FetchError => "FetchError",
            FailureCause::NonEnglishPolicy => "NonEnglishPolicy",
            FailureCause::ClassifiedNegative => "ClassifiedNegative",
        }
    }
}

impl fmt::Display for FailureCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Final disposition of one homepage snapshot attempt.
///
/// `PdfCandidate` marks attempts where the chosen policy link pointed at a
/// PDF; those are recorded but not parsed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Success,
    PdfCandidate,
    Failure(FailureCause),
}

impl Outcome {
    pub fn is_success(&self) -> bool {
        matches!(self, Outcome::Success)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Success => f.write_str("success"),
            Outcome::PdfCandidate => f.write_str("pdf_candidate"),
            Outcome::Failure(c) => f.write_str(c.as_str()),
        }
    }
}

impl FromStr for Outcome {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "success" {
            return Ok(Outcome::Success);
        }
        if s == "pdf_candidate" {
            return Ok(Outcome::PdfCandidate);
        }
        for cause in FailureCause::ALL {
            if cause.as_str() == s {
                return Ok(Outcome::Failure(cause));
            }
        }
        Err(CorpusError::BadOutcome(s.to_string()))
    }
}

impl Serialize for Outcome {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Outcome {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One line of `corpus/metadata.jsonl`: the outcome of one homepage
/// snapshot attempt, self-describing key/value record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetadataRecord {
    pub site: String,
    pub interval: Interval,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy_url: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy_timestamp: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classifier_score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homepage_timestamp: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homepage_final_url: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link_pattern: Option<String>,
    /// Free-form context for unusual failures.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl MetadataRecord {
    pub fn attempt(site: impl Into<String>, interval: Interval, outcome: Outcome) -> Self {
        MetadataRecord {
            site: site.into(),
            interval,
            outcome,
            policy_url: None,
            policy_timestamp: None,
            link_text: None,
            language: None,
            classifier_score: None,
            homepage_timestamp: None,
            homepage_final_url: None,
            link_pattern: None,
            detail: None,
        }
    }
}
