//! Placeholder normalization for trend analysis: URLs, email addresses,
//! numbers, and heuristically detected named entities collapse to fixed
//! markers so texts differing only in those specifics align.

use regex::Regex;
use std::sync::OnceLock;

pub const URL_MARK: &str = "⟨URL⟩";
pub const EMAIL_MARK: &str = "⟨EMAIL⟩";
pub const NUM_MARK: &str = "⟨NUM⟩";
pub const ENT_MARK: &str = "⟨ENT⟩";

/// The normalized text plus the original strings each marker replaced, in
/// order of appearance.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NormalizedText {
    pub text: String,
    pub urls: Vec<String>,
    pub emails: Vec<String>,
    pub numbers: Vec<String>,
    pub entities: Vec<String>,
}

fn url_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    // stop before closing punctuation that usually ends a sentence, not a URL
    RE.get_or_init(|| Regex::new(r"(?i)\b(?:https?://|www\.)[^\s⟨⟩]*[^\s⟨⟩.,;:!?)]").unwrap())
}

fn email_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}").unwrap())
}

fn num_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\b\d+(?:[.,]\d+)*\b").unwrap())
}

fn entity_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    // two or more capitalized words separated by single spaces
    RE.get_or_init(|| Regex::new(r"[A-Z][a-z]+(?: [A-Z][a-z]+)+").unwrap())
}

/// Replace URLs, then emails, then numbers, then capitalized multi-word
/// entities (unless the sequence opens a sentence) with their markers.
pub fn normalize_placeholders(text: &str) -> NormalizedText {
    let mut out = NormalizedText::default();

    let step1 = replace_collecting(text, url_re(), URL_MARK, &mut out.urls);
    let step2 = replace_collecting(&step1, email_re(), EMAIL_MARK, &mut out.emails);
    let step3 = replace_collecting(&step2, num_re(), NUM_MARK, &mut out.numbers);

    // entities: skip matches that start a sentence
    let mut result = String::with_capacity(step3.len());
    let mut last = 0;
    for m in entity_re().find_iter(&step3) {
        result.push_str(&step3[last..m.start()]);
        if at_sentence_start(&step3, m.start()) {
            result.push_str(m.as_str());
        } else {
            out.entities.push(m.as_str().to_string());
            result.push_str(ENT_MARK);
        }
        last = m.end();
    }
    result.push_str(&step3[last..]);
    out.text = result;
    out
}

fn replace_collecting(
    text: &str,
    re: &Regex,
    marker: &str,
    originals: &mut Vec<String>,
) -> String {
    let mut result = String::with_capacity(text.len());
    let mut last = 0;
    for m in re.find_iter(text) {
        result.push_str(&text[last..m.start()]);
        originals.push(m.as_str().to_string());
        result.push_str(marker);
        last = m.end();
    }
    result.push_str(&text[last..]);
    result
}

/// True when only whitespace, or a sentence terminator followed by
/// whitespace, precedes `pos`.
fn at_sentence_start(text: &str, pos: usize) -> bool {
    match text[..pos].trim_end().chars().last() {
        None => true,
        Some(c) => matches!(c, '.' | '!' | '?' | '\n'),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn emails_and_urls_replaced() {
        let n = normalize_placeholders("contact us at a@b.com");
        assert_eq!(n.text, "contact us at ⟨EMAIL⟩");
        assert_eq!(n.emails, vec!["a@b.com"]);

        let n = normalize_placeholders("visit http://x.com/p for details");
        assert_eq!(n.text, "visit ⟨URL⟩ for details");
        assert_eq!(n.urls, vec!["http://x.com/p"]);
    }

    #[test]
    fn url_keeps_trailing_period_in_text() {
        let n = normalize_placeholders("See www.example.com/privacy.");
        assert_eq!(n.text, "See ⟨URL⟩.");
        assert_eq!(n.urls, vec!["www.example.com/privacy"]);
    }

    #[test]
    fn numbers_replaced() {
        let n = normalize_placeholders("retained for 30 days or 1,000.5 hours");
        assert_eq!(n.text, "retained for ⟨NUM⟩ days or ⟨NUM⟩ hours");
        assert_eq!(n.numbers, vec!["30", "1,000.5"]);
    }

    #[test]
    fn mid_sentence_entity_replaced() {
        let n = normalize_placeholders("we share with Acme Analytics today");
        assert_eq!(n.text, "we share with ⟨ENT⟩ today");
        assert_eq!(n.entities, vec!["Acme Analytics"]);
    }

    #[test]
    fn sentence_initial_entity_kept() {
        let n = normalize_placeholders("Acme Analytics collects data. More soon.");
        assert_eq!(n.text, "Acme Analytics collects data. More soon.");
        assert!(n.entities.is_empty());

        let n = normalize_placeholders("We stop. United Kingdom applies.");
        assert!(n.entities.is_empty());
    }

    #[test]
    fn single_capitalized_word_is_not_an_entity() {
        let n = normalize_placeholders("we follow Google everywhere");
        assert_eq!(n.text, "we follow Google everywhere");
    }

    #[test]
    fn order_url_before_email_before_number() {
        let n = normalize_placeholders("mail a@b.com or see https://c.d/e?page=2 within 7 days");
        assert_eq!(n.text, "mail ⟨EMAIL⟩ or see ⟨URL⟩ within ⟨NUM⟩ days");
        assert_eq!(n.urls, vec!["https://c.d/e?page=2"]);
        assert_eq!(n.numbers, vec!["7"]);
    }

    #[test]
    fn acronyms_survive_for_ngram_analysis() {
        let n = normalize_placeholders("we comply with GDPR rules");
        assert_eq!(n.text, "we comply with GDPR rules");
    }
}
