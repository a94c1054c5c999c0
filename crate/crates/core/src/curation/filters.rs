//! The curation filters: parked-domain removal, cross-origin homepage
//! redirection (COHR) removal, and policy-URL deduplication. Pipeline order
//! is fixed: parked, then COHR, then dedup.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{Interval, PolicyDocument};

use super::domain::{registrable_domain, registrable_of_url};

/// One parking-provider registrable domain per line; `#` comments and blank
/// lines skipped.
pub fn parse_parking_list(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.to_lowercase())
        .collect()
}

/// Dedup key: lowercase host, no scheme, no trailing slash, no fragment,
/// query kept.
pub fn normalize_policy_url(url: &str) -> String {
    if let Ok(parsed) = url::Url::parse(url) {
        if let Some(host) = parsed.host_str() {
            let mut out = host.to_lowercase();
            if let Some(port) = parsed.port() {
                out.push_str(&format!(":{port}"));
            }
            out.push_str(parsed.path().trim_end_matches('/'));
            if let Some(query) = parsed.query() {
                out.push('?');
                out.push_str(query);
            }
            return out;
        }
    }
    // tolerate unparseable input: manual scheme/fragment handling
    let rest = url
        .strip_prefix("https://")
        .or_else(|| url.strip_prefix("http://"))
        .unwrap_or(url);
    let rest = rest.split('#').next().unwrap_or("");
    let (pre_query, query) = match rest.split_once('?') {
        Some((p, q)) => (p, Some(q)),
        None => (rest, None),
    };
    let pre_query = pre_query.trim_end_matches('/');
    let (host, path) = match pre_query.split_once('/') {
        Some((h, p)) => (h, format!("/{p}")),
        None => (pre_query, String::new()),
    };
    let mut out = host.to_lowercase();
    out.push_str(&path);
    if let Some(q) = query {
        out.push('?');
        out.push_str(q);
    }
    out
}

/// Remove policies hosted on a listed parking provider, unless the site
/// itself is that provider (a provider's own policy is legitimate).
pub fn filter_parked(
    policies: Vec<PolicyDocument>,
    parking: &HashSet<String>,
) -> (Vec<PolicyDocument>, Vec<PolicyDocument>) {
    policies.into_iter().partition(|doc| {
        let Some((policy_dom, _)) = registrable_of_url(&doc.policy_url) else {
            return true;
        };
        let (site_dom, _) = registrable_domain(&doc.site);
        !(parking.contains(&policy_dom) && !parking.contains(&site_dom))
    })
}

/// Remove policies whose homepage fetch ended on a different registrable
/// domain, unless the two domains share their leftmost label (same-owner
/// country variants stay).
pub fn filter_cohr(
    policies: Vec<PolicyDocument>,
    final_urls: &BTreeMap<(String, Interval), String>,
) -> (Vec<PolicyDocument>, Vec<PolicyDocument>) {
    policies.into_iter().partition(|doc| {
        let Some(final_url) = final_urls.get(&(doc.site.clone(), doc.interval)) else {
            return true;
        };
        let Some((final_dom, final_label)) = registrable_of_url(final_url) else {
            return true;
        };
        let (site_dom, site_label) = registrable_domain(&doc.site);
        final_dom == site_dom || final_label == site_label
    })
}

/// Keep one policy per (normalized policy URL, interval): prefer the site
/// whose own registrable domain hosts the policy, then the lexicographically
/// smallest site.
pub fn dedup_by_policy_url(
    policies: Vec<PolicyDocument>,
) -> (Vec<PolicyDocument>, Vec<PolicyDocument>) {
    let mut groups: BTreeMap<(String, Interval), Vec<usize>> = BTreeMap::new();
    for (idx, doc) in policies.iter().enumerate() {
        let key = (normalize_policy_url(&doc.policy_url), doc.interval);
        groups.entry(key).or_default().push(idx);
    }

    let mut keep = vec![true; policies.len()];
    for indices in groups.values() {
        if indices.len() < 2 {
            continue;
        }
        let winner = indices
            .iter()
            .copied()
            .min_by_key(|&i| {
                let doc = &policies[i];
                let (site_dom, _) = registrable_domain(&doc.site);
                let matches_host = registrable_of_url(&doc.policy_url)
                    .map(|(policy_dom, _)| policy_dom == site_dom)
                    .unwrap_or(false);
                (!matches_host, doc.site.clone())
            })
            .expect("group is non-empty");
        for &i in indices {
            keep[i] = i == winner;
        }
    }

    let mut kept = Vec::new();
    let mut removed = Vec::new();
    for (idx, doc) in policies.into_iter().enumerate() {
        if keep[idx] {
            kept.push(doc);
        } else {
            removed.push(doc);
        }
    }
    (kept, removed)
}

/// Per-stage removal accounting, one row per filter in pipeline order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCount {
    pub stage: String,
    pub removed_count: usize,
    pub kept_count: usize,
}

/// Run the fixed filter pipeline and report per-stage counts.
pub fn curate(
    policies: Vec<PolicyDocument>,
    parking: &HashSet<String>,
    final_urls: &BTreeMap<(String, Interval), String>,
) -> (Vec<PolicyDocument>, Vec<StageCount>) {
    let mut stages = Vec::new();

    let (kept, removed) = filter_parked(policies, parking);
    stages.push(StageCount {
        stage: "parked".to_string(),
        removed_count: removed.len(),
        kept_count: kept.len(),
    });

    let (kept, removed) = filter_cohr(kept, final_urls);
    stages.push(StageCount {
        stage: "cohr".to_string(),
        removed_count: removed.len(),
        kept_count: kept.len(),
    });

    let (kept, removed) = dedup_by_policy_url(kept);
    stages.push(StageCount {
        stage: "dedup".to_string(),
        removed_count: removed.len(),
        kept_count: kept.len(),
    });

    (kept, stages)
}
