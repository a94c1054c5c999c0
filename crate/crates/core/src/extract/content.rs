//! Main-content selection: score candidate blocks by text mass, link
//! density, and semantic hints, and pick the best subtree.

use super::html::{collapse_ws, Element, Node};

/// Tags that can anchor the main content.
const CANDIDATE_TAGS: &[&str] = &["article", "main", "div", "section", "td", "body"];

/// Chrome containers; both the elements themselves and hint words in
/// id/class attributes.
const NEGATIVE_HINTS: &[&str] = &[
    "nav", "footer", "header", "sidebar", "aside", "menu", "banner", "comment", "advert",
    "cookiebar", "breadcrumb",
];

const POSITIVE_HINTS: &[&str] = &[
    "content", "main", "article", "policy", "privacy", "text", "body", "page",
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockScore {
    pub text_len: usize,
    pub link_text_len: usize,
    pub score: f64,
}

/// The chosen content subtree. `low_content` marks pages whose best block
/// carries almost no non-link text (nav-only pages, frames, empty shells).
#[derive(Debug)]
pub struct MainContent<'a> {
    pub element: &'a Element,
    pub low_content: bool,
}

/// Pick the subtree that most likely holds the document body. Worst case
/// (no scoring candidate beats zero) returns `body` or the root itself.
pub fn extract_main_content(root: &Element) -> MainContent<'_> {
    let fallback = root.find("body").unwrap_or(root);

    let mut best: Option<(&Element, f64)> = None;
    root.walk(&mut |el| {
        if !CANDIDATE_TAGS.contains(&el.tag.as_str()) {
            return;
        }
        let score = score_block(el).score;
        // strictly-greater keeps the first block in document order on ties
        if score > 0.0 && best.map_or(true, |(_, b)| score > b) {
            best = Some((el, score));
        }
    });

    match best {
        Some((el, _)) => {
            let s = score_block(el);
            let effective = s.text_len.saturating_sub(s.link_text_len);
            MainContent {
                element: el,
                low_content: effective < 50,
            }
        }
        None => MainContent {
            element: fallback,
            low_content: true,
        },
    }
}

/// text length × (1 − link density), scaled by tag and attribute hints.
pub fn score_block(el: &Element) -> BlockScore {
    let text_len = el.text_content().len();
    let link_text_len = link_text_length(el);
    let link_density = if text_len == 0 {
        1.0
    } else {
        link_text_len as f64 / text_len as f64
    };
    let tag_factor = match el.tag.as_str() {
        "article" | "main" => 1.5,
        "section" => 1.2,
        "td" => 0.9,
        "body" => 0.6,
        _ => 1.0,
    };
    let attr_factor = attr_hint_factor(el);
    let score = text_len as f64 * (1.0 - link_density) * tag_factor * attr_factor;
    BlockScore {
        text_len,
        link_text_len,
        score,
    }
}

fn attr_hint_factor(el: &Element) -> f64 {
    let mut hint = String::new();
    if let Some(id) = el.attr("id") {
        hint.push_str(&id.to_ascii_lowercase());
        hint.push(' ');
    }
    if let Some(class) = el.attr("class") {
        hint.push_str(&class.to_ascii_lowercase());
    }
    if NEGATIVE_HINTS.iter().any(|w| hint.contains(w)) {
        return 0.3;
    }
    if POSITIVE_HINTS.iter().any(|w| hint.contains(w)) {
        return 1.3;
    }
    1.0
}

/// Total visible text inside anchor descendants, by collapsed length.
fn link_text_length(el: &Element) -> usize {
    if matches!(el.tag.as_str(), "script" | "style" | "noscript" | "template") {
        return 0;
    }
    if el.tag == "a" {
        return el.text_content().len();
    }
    el.children
        .iter()
        .map(|c| match c {
            Node::Element(e) => link_text_length(e),
            Node::Text(_) => 0,
        })
        .sum()
}

/// Page title: the `<title>` text, else the first `<h1>`, else empty.
pub fn page_title(root: &Element) -> String {
    for tag in ["title", "h1"] {
        if let Some(el) = root.find(tag) {
            let t = collapse_ws(&el.text_content());
            if !t.is_empty() {
                return t;
            }
        }
    }
    String::new()
}

/// A document is blank when its visible text (whitespace collapsed) is
/// shorter than `min_chars`.
pub fn is_blank(markdown: &str, min_chars: usize) -> bool {
    visible_len(markdown) < min_chars
}

fn visible_len(markdown: &str) -> usize {
    let plain = crate::analysis::text::strip_markup(markdown);
    collapse_ws(&plain).chars().count()
}
