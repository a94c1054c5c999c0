//! Registrable-domain splitting over a bundled public-suffix table.

use std::collections::HashSet;
use std::sync::OnceLock;

/// Bundled suffix subset: common generic TLDs, the country codes seen in
/// rank lists, and the multi-label suffixes under them. Config-overridable
/// via [`SuffixTable::parse`].
const BUNDLED_SUFFIXES: &[&str] = &[
    // generic
    "com", "org", "net", "edu", "gov", "mil", "int", "info", "biz", "name", "pro", "io",
    "co", "me", "tv", "cc", "ws", "mobi", "app", "dev", "xyz", "site", "online", "shop",
    "blog", "news",
    // country codes
    "ac", "ae", "ar", "at", "au", "be", "bg", "br", "ca", "ch", "cl", "cn", "cz", "de",
    "dk", "ee", "es", "eu", "fi", "fr", "gr", "hk", "hr", "hu", "id", "ie", "il", "in",
    "ir", "is", "it", "jp", "kr", "lt", "lu", "lv", "mx", "my", "nl", "no", "nz", "ph",
    "pk", "pl", "pt", "ro", "rs", "ru", "se", "sg", "si", "sk", "th", "tr", "tw", "ua",
    "uk", "us", "vn", "za",
    // multi-label suffixes
    "co.uk", "org.uk", "net.uk", "ac.uk", "gov.uk", "me.uk", "ltd.uk", "plc.uk",
    "com.au", "net.au", "org.au", "edu.au", "gov.au",
    "co.nz", "net.nz", "org.nz",
    "co.jp", "ne.jp", "or.jp", "ac.jp", "go.jp",
    "com.br", "net.br", "org.br", "gov.br",
    "com.cn", "net.cn", "org.cn", "gov.cn",
    "co.in", "net.in", "org.in", "firm.in", "gen.in",
    "com.mx", "org.mx", "gob.mx",
    "com.ar", "com.tr", "com.sg", "com.hk", "com.tw", "com.my", "com.ph", "com.vn",
    "co.za", "org.za", "co.kr", "or.kr", "co.il", "org.il", "com.ua", "in.ua",
    "com.pl", "net.pl", "org.pl", "com.ru", "org.ru", "net.ru", "spb.ru", "msk.ru",
];

/// A set of public suffixes; the longest suffix match (by label count)
/// decides where the registrable domain starts.
#[derive(Debug, Clone)]
pub struct SuffixTable {
    suffixes: HashSet<String>,
}

impl SuffixTable {
    /// One suffix per line; `#` comments and blank lines skipped.
    pub fn parse(text: &str) -> SuffixTable {
        let suffixes = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.trim_start_matches('.').to_lowercase())
            .collect();
        SuffixTable { suffixes }
    }

    pub fn bundled() -> &'static SuffixTable {
        static TABLE: OnceLock<SuffixTable> = OnceLock::new();
        TABLE.get_or_init(|| SuffixTable {
            suffixes: BUNDLED_SUFFIXES.iter().map(|s| s.to_string()).collect(),
        })
    }

    /// Split a host into its registrable domain and that domain's leftmost
    /// label. Hosts at or below suffix size return themselves.
    pub fn registrable_domain(&self, host: &str) -> (String, String) {
        let host = host.trim().trim_end_matches('.').to_lowercase();
        let labels: Vec<&str> = host.split('.').filter(|l| !l.is_empty()).collect();
        if labels.len() <= 1 {
            return (host.clone(), host);
        }

        // longest known suffix strictly shorter than the whole host;
        // unknown TLDs fall back to the last label
        let mut suffix_len = 1;
        for take in (1..labels.len()).rev() {
            let candidate = labels[labels.len() - take..].join(".");
            if self.suffixes.contains(&candidate) {
                suffix_len = take;
                break;
            }
        }

        let start = labels.len() - suffix_len - 1;
        let registrable = labels[start..].join(".");
        (registrable, labels[start].to_string())
    }
}

/// Registrable domain of `host` under the bundled suffix table.
pub fn registrable_domain(host: &str) -> (String, String) {
    SuffixTable::bundled().registrable_domain(host)
}

/// Registrable domain of a URL's host, when the URL parses and has one.
pub fn registrable_of_url(url: &str) -> Option<(String, String)> {
    let parsed = url::Url::parse(url).ok()?;
    let host = parsed.host_str()?;
    Some(registrable_domain(host))
}
