//! Markdown-to-token preprocessing for classification.

use std::collections::HashSet;

use crate::analysis::text::{strip_markup, tokenize};

use super::stopwords::bundled_stop_words;

/// Strip markdown markup, lowercase, tokenize, and drop stop words. Header
/// and list text is kept; link URLs are not.
pub fn preprocess(markdown: &str) -> Vec<String> {
    preprocess_with(markdown, None)
}

/// `preprocess` with an overriding stop-word list.
pub fn preprocess_with(markdown: &str, stop_words: Option<&HashSet<String>>) -> Vec<String> {
    let text = strip_markup(markdown);
    tokenize(&text)
        .into_iter()
        .filter(|tok| match stop_words {
            Some(set) => !set.contains(tok),
            None => !bundled_stop_words().contains(tok.as_str()),
        })
        .collect()
}

/// The document title used for title features: the text of the first
/// markdown heading, empty when the document has none. Keeps training
/// documents and crawled documents on the same footing (both are plain
/// markdown files).
pub fn title_of(markdown: &str) -> String {
    markdown
        .lines()
        .map(str::trim_start)
        .find(|line| line.starts_with('#'))
        .map(|line| line.trim_start_matches('#').trim().to_string())
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_text_kept_stop_words_dropped() {
        assert_eq!(preprocess("## We Collect Data!"), vec!["collect", "data"]);
    }

    #[test]
    fn empty_input() {
        assert_eq!(preprocess(""), Vec::<String>::new());
    }

    #[test]
    fn link_anchor_kept_url_dropped() {
        assert_eq!(preprocess("[privacy](http://x)"), vec!["privacy"]);
    }

    #[test]
    fn custom_stop_words_override_bundled() {
        let mine: HashSet<String> = ["data".to_string()].into_iter().collect();
        assert_eq!(
            preprocess_with("we collect data", Some(&mine)),
            vec!["we", "collect"]
        );
    }

    #[test]
    fn lowercases_and_strips_symbols() {
        assert_eq!(
            preprocess("Your PRIVACY matters; read §4 carefully."),
            vec!["privacy", "matters", "read", "4", "carefully"]
        );
    }

    #[test]
    fn title_is_first_heading() {
        assert_eq!(title_of("intro\n\n## Privacy Policy\n\n# Later"), "Privacy Policy");
        assert_eq!(title_of("no headings here"), "");
        assert_eq!(title_of("  ### Indented Heading"), "Indented Heading");
    }
}
