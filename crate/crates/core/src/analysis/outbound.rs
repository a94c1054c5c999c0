//! Outbound policy links: which sites' policies link to other
//! organizations' policies, and which target policies collect the most
//! distinct linking sites.

use std::collections::{BTreeMap, BTreeSet};

use crate::curation::{normalize_policy_url, registrable_domain, registrable_of_url};
use crate::extract::PatternTable;
use crate::parallel::par_map;

use super::text::extract_links;
use super::AnalysisDoc;

/// One linked-to policy URL and how many distinct sites link to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkedPolicy {
    pub url: String,
    pub distinct_linking_sites: u64,
}

/// Per-site flags plus the cross-site link ranking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutboundLinks {
    /// True when any of the site's policies links to a policy on a
    /// different registrable domain.
    pub flagged_sites: BTreeMap<String, bool>,
    /// Targets ranked by distinct linking sites (descending, then URL).
    pub ranking: Vec<LinkedPolicy>,
}

/// URL path keywords that mark a link target as a policy page even when the
/// anchor text matches no pattern.
const PATH_KEYWORDS: &[&str] = &["privacy", "policy"];

/// Scan every document's links; a link is a policy link iff its anchor text
/// matches the pattern table or its URL path contains a policy keyword.
/// Only links to a different registrable domain flag a site or enter the
/// ranking (relative targets are same-site by construction).
pub fn outbound_policy_links(docs: &[AnalysisDoc], table: &PatternTable) -> OutboundLinks {
    let per_doc: Vec<(String, Vec<String>)> = par_map(docs.to_vec(), |doc| {
        let (site_dom, _) = registrable_domain(&doc.site);
        let mut targets = Vec::new();
        for (text, href) in extract_links(&doc.markdown) {
            if !is_policy_link(&text, &href, table) {
                continue;
            }
            let Some((target_dom, _)) = registrable_of_url(&href) else {
                continue;
            };
            if target_dom != site_dom {
                targets.push(normalize_policy_url(&href));
            }
        }
        (doc.site.clone(), targets)
    });

    let mut flagged_sites: BTreeMap<String, bool> = BTreeMap::new();
    let mut linking_sites: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (site, targets) in per_doc {
        let flag = flagged_sites.entry(site.clone()).or_insert(false);
        *flag |= !targets.is_empty();
        for target in targets {
            linking_sites.entry(target).or_default().insert(site.clone());
        }
    }

    let mut ranking: Vec<LinkedPolicy> = linking_sites
        .into_iter()
        .map(|(url, sites)| LinkedPolicy {
            url,
            distinct_linking_sites: sites.len() as u64,
        })
        .collect();
    ranking.sort_by(|a, b| {
        b.distinct_linking_sites
            .cmp(&a.distinct_linking_sites)
            .then_with(|| a.url.cmp(&b.url))
    });

    OutboundLinks { flagged_sites, ranking }
}

fn is_policy_link(anchor_text: &str, href: &str, table: &PatternTable) -> bool {
    if table.match_text(anchor_text).is_some() {
        return true;
    }
    let path = match url::Url::parse(href) {
        Ok(u) => u.path().to_lowercase(),
        Err(_) => href
            .split(['?', '#'])
            .next()
            .unwrap_or("")
            .to_lowercase(),
    };
    PATH_KEYWORDS.iter().any(|k| path.contains(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Interval;

    fn doc(site: &str, interval: &str, markdown: &str) -> AnalysisDoc {
        AnalysisDoc {
            site: site.to_string(),
            interval: interval.parse::<Interval>().unwrap(),
            markdown: markdown.to_string(),
        }
    }

    fn table() -> PatternTable {
        PatternTable::default()
    }

    #[test]
    fn cross_domain_policy_link_flags_site() {
        let docs = vec![doc(
            "a.com",
            "2015A",
            "See [Privacy Policy](https://other.com/terms).",
        )];
        let out = outbound_policy_links(&docs, &table());
        assert_eq!(out.flagged_sites.get("a.com"), Some(&true));
        assert_eq!(out.ranking.len(), 1);
        assert_eq!(out.ranking[0].url, "other.com/terms");
        assert_eq!(out.ranking[0].distinct_linking_sites, 1);
    }

    #[test]
    fn self_links_do_not_flag() {
        let docs = vec![doc(
            "a.com",
            "2015A",
            "Our [Privacy Policy](/privacy) and [mirror](https://www.a.com/privacy).",
        )];
        let out = outbound_policy_links(&docs, &table());
        assert_eq!(out.flagged_sites.get("a.com"), Some(&false));
        assert!(out.ranking.is_empty());
    }

    #[test]
    fn path_keyword_counts_with_unrelated_anchor() {
        let docs = vec![doc(
            "a.com",
            "2015A",
            "[Ad choices](https://adnet.com/privacy_ads.html) and [Careers](https://adnet.com/jobs).",
        )];
        let out = outbound_policy_links(&docs, &table());
        assert_eq!(out.flagged_sites.get("a.com"), Some(&true));
        assert_eq!(out.ranking.len(), 1);
        assert_eq!(out.ranking[0].url, "adnet.com/privacy_ads.html");
    }

    #[test]
    fn ranking_counts_distinct_sites_not_links() {
        let docs = vec![
            doc("a.com", "2015A", "[Privacy Policy](https://hub.org/privacy)"),
            doc("a.com", "2015B", "[Privacy Policy](https://hub.org/privacy)"),
            doc("b.com", "2015A", "[Privacy Policy](https://hub.org/privacy)"),
            doc("c.com", "2015A", "[Privacy Policy](http://hub.org/privacy/)"),
            doc("d.com", "2015A", "[Privacy Policy](https://solo.net/privacy)"),
        ];
        let out = outbound_policy_links(&docs, &table());
        assert_eq!(
            out.ranking,
            vec![
                LinkedPolicy { url: "hub.org/privacy".into(), distinct_linking_sites: 3 },
                LinkedPolicy { url: "solo.net/privacy".into(), distinct_linking_sites: 1 },
            ]
        );
    }

    #[test]
    fn flag_aggregates_across_intervals() {
        let docs = vec![
            doc("a.com", "2015A", "No links here."),
            doc("a.com", "2015B", "[Privacy Policy](https://other.com/privacy)"),
        ];
        let out = outbound_policy_links(&docs, &table());
        assert_eq!(out.flagged_sites.get("a.com"), Some(&true));
    }

    #[test]
    fn equal_counts_order_by_url() {
        let docs = vec![
            doc("a.com", "2015A", "[Privacy Policy](https://zeta.com/privacy)"),
            doc("b.com", "2015A", "[Privacy Policy](https://alpha.com/privacy)"),
        ];
        let out = outbound_policy_links(&docs, &table());
        assert_eq!(out.ranking[0].url, "alpha.com/privacy");
        assert_eq!(out.ranking[1].url, "zeta.com/privacy");
    }
}
