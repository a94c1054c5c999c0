//! Candidate policy-link discovery: anchors whose text matches a fixed,
//! ordered table of link-text patterns.

use url::Url;

use super::html::Element;
use super::ExtractError;

/// One link-text pattern. `All` requires every word as a substring,
/// `Contains` a phrase substring, `Exact` the whole normalized text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternRule {
    All(Vec<String>),
    Contains(String),
    Exact(String),
}

impl PatternRule {
    /// Stable identifier: `all` joins words with `+`, phrases hyphenate.
    pub fn id(&self) -> String {
        match self {
            PatternRule::All(words) => words.join("+"),
            PatternRule::Contains(phrase) | PatternRule::Exact(phrase) => {
                phrase.replace(' ', "-")
            }
        }
    }

    fn matches(&self, normalized: &str) -> bool {
        match self {
            PatternRule::All(words) => words.iter().all(|w| normalized.contains(w.as_str())),
            PatternRule::Contains(phrase) => normalized.contains(phrase.as_str()),
            PatternRule::Exact(phrase) => normalized == phrase,
        }
    }
}

/// Ordered pattern table; the first matching rule claims the link.
#[derive(Debug, Clone)]
pub struct PatternTable {
    rules: Vec<PatternRule>,
}

impl Default for PatternTable {
    fn default() -> Self {
        PatternTable {
            rules: vec![
                PatternRule::All(vec!["privacy".into(), "policy".into()]),
                PatternRule::Contains("privacy notice".into()),
                PatternRule::Contains("privacy statement".into()),
                PatternRule::Contains("data protection".into()),
                PatternRule::Contains("data policy".into()),
                PatternRule::Exact("privacy".into()),
                PatternRule::Contains("privacy practices".into()),
            ],
        }
    }
}

impl PatternTable {
    /// Parse a table from config text: one rule per line, `all:<w1>,<w2>`,
    /// `contains:<phrase>`, or `exact:<phrase>`; `#` comments and blank
    /// lines skipped.
    pub fn parse(text: &str) -> Result<PatternTable, ExtractError> {
        let mut rules = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((kind, rest)) = line.split_once(':') else {
                return Err(ExtractError::BadPattern(format!(
                    "line {}: expected kind:value, got {line:?}",
                    lineno + 1
                )));
            };
            let rest = rest.trim().to_lowercase();
            if rest.is_empty() {
                return Err(ExtractError::BadPattern(format!(
                    "line {}: empty pattern",
                    lineno + 1
                )));
            }
            let rule = match kind.trim() {
                "all" => {
                    let words: Vec<String> = rest
                        .split(',')
                        .map(|w| w.trim().to_string())
                        .filter(|w| !w.is_empty())
                        .collect();
                    if words.is_empty() {
                        return Err(ExtractError::BadPattern(format!(
                            "line {}: all: needs at least one word",
                            lineno + 1
                        )));
                    }
                    PatternRule::All(words)
                }
                "contains" => PatternRule::Contains(rest),
                "exact" => PatternRule::Exact(rest),
                other => {
                    return Err(ExtractError::BadPattern(format!(
                        "line {}: unknown pattern kind {other:?}",
                        lineno + 1
                    )));
                }
            };
            rules.push(rule);
        }
        if rules.is_empty() {
            return Err(ExtractError::BadPattern("no patterns defined".to_string()));
        }
        Ok(PatternTable { rules })
    }

    /// Rule ids in table order, highest priority first.
    pub fn rule_ids(&self) -> Vec<String> {
        self.rules.iter().map(PatternRule::id).collect()
    }

    /// First matching rule's id for a raw anchor text, if any.
    pub fn match_text(&self, link_text: &str) -> Option<String> {
        let normalized = normalize_link_text(link_text);
        if normalized.is_empty() {
            return None;
        }
        self.rules
            .iter()
            .find(|r| r.matches(&normalized))
            .map(PatternRule::id)
    }
}

fn normalize_link_text(text: &str) -> String {
    text.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// An anchor that matched a pattern, with its resolved absolute target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateLink {
    pub href: String,
    pub link_text: String,
    pub pattern: String,
}

/// All pattern-matching anchors in document order, hrefs resolved against
/// `base_url`, non-http(s) targets dropped, duplicates by resolved href
/// removed (first kept).
pub fn find_policy_links(
    root: &Element,
    base_url: &str,
    table: &PatternTable,
) -> Vec<CandidateLink> {
    let Ok(base) = Url::parse(base_url) else {
        return Vec::new();
    };
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    root.walk(&mut |el| {
        if el.tag != "a" {
            return;
        }
        let Some(href) = el.attr("href") else { return };
        let link_text = el.text_content();
        let Some(pattern) = table.match_text(&link_text) else {
            return;
        };
        let Ok(resolved) = base.join(href.trim()) else {
            return;
        };
        if resolved.scheme() != "http" && resolved.scheme() != "https" {
            return;
        }
        let href = resolved.to_string();
        if seen.insert(href.clone()) {
            out.push(CandidateLink { href, link_text, pattern });
        }
    });
    out
}

/// True when the URL path ends in `.pdf` (query and fragment ignored).
pub fn is_pdf_link(href: &str) -> bool {
    let path = match Url::parse(href) {
        Ok(url) => url.path().to_string(),
        Err(_) => {
            let no_fragment = href.split('#').next().unwrap_or("");
            no_fragment.split('?').next().unwrap_or("").to_string()
        }
    };
    path.to_lowercase().ends_with(".pdf")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::html::parse;

    #[test]
    fn default_table_examples() {
        let table = PatternTable::default();
        assert_eq!(table.match_text("Privacy Policy"), Some("privacy+policy".into()));
        assert_eq!(table.match_text("Terms of Service"), None);
        assert_eq!(table.match_text("Your Privacy Notice"), Some("privacy-notice".into()));
        assert_eq!(table.match_text("Privacy"), Some("privacy".into()));
        assert_eq!(table.match_text("  privacy "), Some("privacy".into()));
        assert_eq!(table.match_text("privacy settings"), None);
        assert_eq!(
            table.match_text("Data Protection Statement"),
            Some("data-protection".into())
        );
        assert_eq!(
            table.match_text("Our Privacy Practices"),
            Some("privacy-practices".into())
        );
    }

    #[test]
    fn first_match_in_fixed_order_wins() {
        let table = PatternTable::default();
        // contains both the all-rule words and the statement phrase
        assert_eq!(
            table.match_text("Privacy Policy Statement"),
            Some("privacy+policy".into())
        );
    }

    #[test]
    fn all_rule_words_match_anywhere() {
        let table = PatternTable::default();
        assert_eq!(
            table.match_text("Policy on Privacy"),
            Some("privacy+policy".into())
        );
    }

    #[test]
    fn parse_roundtrips_and_rejects_bad_lines() {
        let text = "# comment\nall:privacy,policy\ncontains:privacy notice\nexact:privacy\n";
        let table = PatternTable::parse(text).unwrap();
        assert_eq!(table.match_text("privacy policy"), Some("privacy+policy".into()));
        assert_eq!(table.match_text("privacy"), Some("privacy".into()));

        assert!(PatternTable::parse("startswith:privacy").is_err());
        assert!(PatternTable::parse("no separator here").is_err());
        assert!(PatternTable::parse("contains:").is_err());
        assert!(PatternTable::parse("# only a comment\n").is_err());
    }

    #[test]
    fn links_resolved_deduped_and_filtered() {
        let html = r#"
            <body>
              <a href="/privacy">Privacy Policy</a>
              <a href="https://example.com/privacy">Privacy Policy</a>
              <a href="notice.html">Privacy Notice</a>
              <a href="mailto:dpo@example.com">Privacy Policy</a>
              <a href="/terms">Terms of Service</a>
              <a>Privacy Policy</a>
            </body>"#;
        let root = parse(html);
        let table = PatternTable::default();
        let links = find_policy_links(&root, "https://example.com/about/", &table);
        let hrefs: Vec<&str> = links.iter().map(|l| l.href.as_str()).collect();
        assert_eq!(
            hrefs,
            vec![
                "https://example.com/privacy",
                "https://example.com/about/notice.html",
            ]
        );
        assert_eq!(links[0].pattern, "privacy+policy");
        assert_eq!(links[0].link_text, "Privacy Policy");
        assert_eq!(links[1].pattern, "privacy-notice");
    }

    #[test]
    fn nested_anchor_markup_still_matches() {
        let html = r#"<a href="/p"><span>Privacy</span> <b>Policy</b></a>"#;
        let links = find_policy_links(&parse(html), "https://e.com/", &PatternTable::default());
        assert_eq!(links.len(), 1);
        assert_eq!(links[0].link_text, "Privacy Policy");
    }

    #[test]
    fn pdf_detection_ignores_query_and_case() {
        assert!(is_pdf_link("https://x.com/policy.pdf"));
        assert!(is_pdf_link("https://x.com/Policy.PDF?v=2"));
        assert!(is_pdf_link("https://x.com/doc.pdf#page=2"));
        assert!(!is_pdf_link("https://x.com/policy.pdf/archive"));
        assert!(!is_pdf_link("https://x.com/policy.html"));
        assert!(is_pdf_link("/relative/policy.pdf"));
    }
}
