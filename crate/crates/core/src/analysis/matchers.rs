//! Term matchers: named bundles of regular expressions that hit either the
//! document text or the targets of its outbound links.

use std::collections::BTreeMap;

use regex::Regex;

use super::text::{extract_links, strip_markup};
use super::{AnalysisDoc, AnalysisError};
use crate::corpus::Interval;
use crate::parallel::par_map;

#[derive(Clone, Debug)]
pub struct Matcher {
    pub name: String,
    pub name_patterns: Vec<Regex>,
    pub link_patterns: Vec<Regex>,
}

impl Matcher {
    /// A document matches when any name pattern hits its plain text or any
    /// link pattern hits any outbound link target.
    pub fn matches(&self, plain_text: &str, hrefs: &[String]) -> bool {
        self.name_patterns.iter().any(|re| re.is_match(plain_text))
            || self
                .link_patterns
                .iter()
                .any(|re| hrefs.iter().any(|h| re.is_match(h)))
    }
}

/// Parse a matcher pack:
///
/// ```text
/// [matcher cookies]
/// name: (?i)\bcookies?\b
/// link: (?i)aboutcookies\.org
/// ```
pub fn parse_matcher_pack(text: &str) -> Result<Vec<Matcher>, AnalysisError> {
    let mut out: Vec<Matcher> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(inner) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = inner
                .strip_prefix("matcher")
                .map(str::trim)
                .filter(|n| !n.is_empty())
                .ok_or_else(|| {
                    AnalysisError::BadMatcherPack(format!(
                        "line {}: expected [matcher <id>]",
                        idx + 1
                    ))
                })?;
            if out.iter().any(|m| m.name == name) {
                return Err(AnalysisError::BadMatcherPack(format!(
                    "line {}: duplicate matcher {name:?}",
                    idx + 1
                )));
            }
            out.push(Matcher {
                name: name.to_string(),
                name_patterns: Vec::new(),
                link_patterns: Vec::new(),
            });
            continue;
        }
        let Some((kind, pattern)) = line.split_once(':') else {
            return Err(AnalysisError::BadMatcherPack(format!(
                "line {}: expected `name:` or `link:` pattern",
                idx + 1
            )));
        };
        let Some(current) = out.last_mut() else {
            return Err(AnalysisError::BadMatcherPack(format!(
                "line {}: pattern before any [matcher …] header",
                idx + 1
            )));
        };
        let re = Regex::new(pattern.trim()).map_err(|e| {
            AnalysisError::BadMatcherPack(format!("line {}: bad regex: {e}", idx + 1))
        })?;
        match kind.trim() {
            "name" => current.name_patterns.push(re),
            "link" => current.link_patterns.push(re),
            other => {
                return Err(AnalysisError::BadMatcherPack(format!(
                    "line {}: unknown pattern kind {other:?}",
                    idx + 1
                )))
            }
        }
    }
    for m in &out {
        if m.name_patterns.is_empty() && m.link_patterns.is_empty() {
            return Err(AnalysisError::BadMatcherPack(format!(
                "matcher {:?} has no patterns",
                m.name
            )));
        }
    }
    Ok(out)
}

/// Fraction of documents matching each matcher, per interval. Intervals
/// without documents are absent, never 0.
pub fn match_terms(
    docs: &[AnalysisDoc],
    matchers: &[Matcher],
) -> BTreeMap<String, BTreeMap<Interval, f64>> {
    let mut interval_totals: BTreeMap<Interval, usize> = BTreeMap::new();
    for doc in docs {
        *interval_totals.entry(doc.interval).or_insert(0) += 1;
    }

    let hits: Vec<(Interval, Vec<bool>)> = par_map(docs.iter().collect(), |doc| {
        let plain = strip_markup(&doc.markdown);
        let hrefs: Vec<String> = extract_links(&doc.markdown)
            .into_iter()
            .map(|(_, href)| href)
            .collect();
        let row = matchers.iter().map(|m| m.matches(&plain, &hrefs)).collect();
        (doc.interval, row)
    });

    let mut counts: Vec<BTreeMap<Interval, usize>> = vec![BTreeMap::new(); matchers.len()];
    for (interval, row) in hits {
        for (i, hit) in row.into_iter().enumerate() {
            if hit {
                *counts[i].entry(interval).or_insert(0) += 1;
            }
        }
    }

    let mut out = BTreeMap::new();
    for (matcher, matched) in matchers.iter().zip(counts) {
        let mut fractions = BTreeMap::new();
        for (&interval, &total) in &interval_totals {
            let k = matched.get(&interval).copied().unwrap_or(0);
            fractions.insert(interval, k as f64 / total as f64);
        }
        out.insert(matcher.name.clone(), fractions);
    }
    out
}
