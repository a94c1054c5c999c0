//! Shared text utilities for the analysis metrics: markdown markup removal,
//! link extraction, sentence splitting, and tokenization.

use regex::Regex;
use std::sync::OnceLock;

fn link_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"!?\[([^\]]*)\]\(([^)\s]*)(?:\s[^)]*)?\)").unwrap())
}

/// Remove markdown markup, keeping all visible text. Headers and list items
/// keep their text; links keep anchor text and drop the target; table pipes
/// become spaces.
pub fn strip_markup(markdown: &str) -> String {
    let mut out = String::with_capacity(markdown.len());
    for line in markdown.lines() {
        let trimmed = line.trim_start();
        let body = if let Some(rest) = strip_header_marker(trimmed) {
            rest
        } else if let Some(rest) = strip_list_marker(trimmed) {
            rest
        } else {
            trimmed
        };
        let body = body.replace('|', " ");
        let body = link_re().replace_all(&body, "$1");
        let body = body.trim();
        // drop pure-markup lines such as table separator rows
        if body.chars().any(|c| c.is_alphanumeric()) {
            if !out.is_empty() {
                out.push('\n');
            }
            out.push_str(body);
        }
    }
    out
}

fn strip_header_marker(line: &str) -> Option<&str> {
    let hashes = line.bytes().take_while(|&b| b == b'#').count();
    if hashes == 0 || hashes > 6 {
        return None;
    }
    let rest = &line[hashes..];
    rest.strip_prefix(' ').or(Some(rest.trim_start()))
}

fn strip_list_marker(line: &str) -> Option<&str> {
    if let Some(rest) = line.strip_prefix("- ").or_else(|| line.strip_prefix("* ")) {
        return Some(rest);
    }
    // numbered items: "3. text"
    let digits = line.bytes().take_while(|b| b.is_ascii_digit()).count();
    if digits > 0 {
        if let Some(rest) = line[digits..].strip_prefix(". ") {
            return Some(rest);
        }
    }
    None
}

/// All `[text](href)` links in a markdown document, in order.
pub fn extract_links(markdown: &str) -> Vec<(String, String)> {
    link_re()
        .captures_iter(markdown)
        .map(|c| (c[1].to_string(), c[2].to_string()))
        .collect()
}

/// Split text into sentences on runs of `.`, `!`, `?` followed by whitespace
/// or end of text. A trailing fragment without a terminator counts as a
/// sentence. Chunks without any alphanumeric character are dropped.
pub fn split_sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        cur.push(c);
        if matches!(c, '.' | '!' | '?') {
            while let Some(&n) = chars.peek() {
                if matches!(n, '.' | '!' | '?') {
                    cur.push(n);
                    chars.next();
                } else {
                    break;
                }
            }
            let boundary = match chars.peek() {
                None => true,
                Some(&n) => n.is_whitespace(),
            };
            if boundary {
                flush_sentence(&mut out, &mut cur);
            }
        }
    }
    flush_sentence(&mut out, &mut cur);
    out
}

fn flush_sentence(out: &mut Vec<String>, cur: &mut String) {
    let s = cur.trim();
    if s.chars().any(|c| c.is_alphanumeric()) {
        out.push(s.to_string());
    }
    cur.clear();
}

/// Whitespace token count of the markup-stripped text.
pub fn word_count(markdown: &str) -> usize {
    strip_markup(markdown).split_whitespace().count()
}

/// Lowercase alphanumeric tokens. Placeholder markers like `⟨url⟩` survive
/// as single tokens so normalized text stays n-gram addressable.
pub fn tokenize(text: &str) -> Vec<String> {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = RE.get_or_init(|| Regex::new(r"⟨[a-z]+⟩|[a-z0-9]+").unwrap());
    let lower = text.to_lowercase();
    re.find_iter(&lower).map(|m| m.as_str().to_string()).collect()
}

/// All n-grams of `tokens` joined by single spaces.
pub fn ngrams(tokens: &[String], n: usize) -> Vec<String> {
    if n == 0 || tokens.len() < n {
        return Vec::new();
    }
    tokens.windows(n).map(|w| w.join(" ")).collect()
}
