//! HTML-to-markdown conversion preserving links and document structure, and
//! the reverse direction used by the analyses: stripping markdown down to
//! sentence text.
//!
//! The converter's output is a fixed point: parsing the markdown again (it
//! contains no tags, so it parses as bare text) and re-rendering reproduces
//! the same string. That holds because every emitted line is right-trimmed,
//! interior spacing is single, blank-line runs never exceed one, and bare
//! text re-renders with its line structure preserved.

use super::html::{Element, Node};

const INLINE_TAGS: &[&str] = &[
    "a", "abbr", "b", "big", "cite", "code", "em", "font", "i", "kbd", "label", "mark", "q",
    "s", "samp", "small", "span", "strike", "strong", "sub", "sup", "time", "tt", "u", "var",
];

const DROP_TAGS: &[&str] = &[
    "script", "style", "noscript", "template", "head", "iframe", "img", "svg", "object",
    "form", "input", "button", "select", "textarea",
];

/// Containers whose bare text keeps its line structure; everywhere else
/// whitespace collapses like HTML rendering.
const BARE_CONTAINERS: &[&str] = &["#root", "html", "body"];

/// Render a content subtree as markdown: `#`-prefixed headers, `- ` list
/// items, `[text](href)` links, `| … |` table rows, blocks separated by one
/// blank line, single trailing newline.
pub fn to_markdown(el: &Element) -> String {
    let mut blocks: Vec<String> = Vec::new();
    render_children(el, 0, &mut blocks);
    let mut doc = blocks.join("\n\n");
    doc = normalize_document(&doc);
    if doc.is_empty() {
        doc
    } else {
        doc.push('\n');
        doc
    }
}

fn render_children(el: &Element, list_depth: usize, blocks: &mut Vec<String>) {
    let preserve_lines = BARE_CONTAINERS.contains(&el.tag.as_str());
    let mut inline_run = String::new();

    for child in &el.children {
        match child {
            Node::Text(t) => {
                if preserve_lines {
                    inline_run.push_str(t);
                } else {
                    push_collapsed(&mut inline_run, t);
                }
            }
            Node::Element(e) if is_inline(e) => render_inline(e, &mut inline_run),
            Node::Element(e) => {
                flush_run(&mut inline_run, preserve_lines, blocks);
                render_block(e, list_depth, blocks);
            }
        }
    }
    flush_run(&mut inline_run, preserve_lines, blocks);
}

fn render_block(el: &Element, list_depth: usize, blocks: &mut Vec<String>) {
    let tag = el.tag.as_str();
    if DROP_TAGS.contains(&tag) {
        return;
    }
    match tag {
        "h1" | "h2" | "h3" | "h4" | "h5" | "h6" => {
            let level = tag.as_bytes()[1] - b'0';
            let text = inline_text(el);
            if !text.is_empty() {
                blocks.push(format!("{} {}", "#".repeat(level as usize), text));
            }
        }
        "ul" | "ol" => {
            let mut lines = Vec::new();
            render_list_items(el, list_depth, &mut lines);
            if !lines.is_empty() {
                blocks.push(lines.join("\n"));
            }
        }
        "table" => {
            let mut rows = Vec::new();
            collect_table_rows(el, &mut rows);
            if !rows.is_empty() {
                blocks.push(rows.join("\n"));
            }
        }
        "br" => {}
        "hr" => blocks.push("---".to_string()),
        "pre" => {
            let text = raw_text(el);
            let lines: Vec<&str> = text.lines().map(str::trim_end).collect();
            let block = lines.join("\n");
            if block.chars().any(|c| !c.is_whitespace()) {
                blocks.push(block.trim_matches('\n').to_string());
            }
        }
        "p" | "blockquote" | "center" | "li" | "dd" | "dt" | "figcaption" | "caption"
        | "address" | "summary" | "details" => {
            let text = inline_text(el);
            if !text.is_empty() {
                blocks.push(text);
            }
            // block children nested inside a paragraph-like element
            for child in &el.children {
                if let Node::Element(e) = child {
                    if !is_inline(e) && !DROP_TAGS.contains(&e.tag.as_str()) {
                        render_block(e, list_depth, blocks);
                    }
                }
            }
        }
        // structural containers recurse
        _ => render_children(el, list_depth, blocks),
    }
}

/// `- ` items, two extra spaces of indent per nesting level.
fn render_list_items(list: &Element, depth: usize, lines: &mut Vec<String>) {
    for child in &list.children {
        let Node::Element(item) = child else { continue };
        match item.tag.as_str() {
            "li" => {
                let text = inline_text_shallow(item);
                let indent = "  ".repeat(depth);
                if !text.is_empty() {
                    lines.push(format!("{indent}- {text}"));
                }
                for sub in &item.children {
                    if let Node::Element(e) = sub {
                        if matches!(e.tag.as_str(), "ul" | "ol") {
                            render_list_items(e, depth + 1, lines);
                        }
                    }
                }
            }
            "ul" | "ol" => render_list_items(item, depth + 1, lines),
            _ => {}
        }
    }
}

fn collect_table_rows(el: &Element, rows: &mut Vec<String>) {
    for child in &el.children {
        let Node::Element(e) = child else { continue };
        match e.tag.as_str() {
            "tr" => {
                let cells: Vec<String> = e
                    .children
                    .iter()
                    .filter_map(|c| match c {
                        Node::Element(cell) if matches!(cell.tag.as_str(), "td" | "th") => {
                            Some(inline_text(cell))
                        }
                        _ => None,
                    })
                    .collect();
                if cells.iter().any(|c| !c.is_empty()) {
                    rows.push(format!("| {} |", cells.join(" | ")));
                }
            }
            "thead" | "tbody" | "tfoot" | "table" => collect_table_rows(e, rows),
            _ => {}
        }
    }
}

/// Inline rendering of an element's whole subtree (blocks inside flow as
/// inline text too), whitespace collapsed.
fn inline_text(el: &Element) -> String {
    let mut out = String::new();
    for child in &el.children {
        render_inline_node(child, &mut out, true);
    }
    finish_inline(out)
}

/// Inline rendering skipping nested block children (lists render their
/// sublists separately).
fn inline_text_shallow(el: &Element) -> String {
    let mut out = String::new();
    for child in &el.children {
        match child {
            Node::Element(e) if matches!(e.tag.as_str(), "ul" | "ol") => {}
            other => render_inline_node(other, &mut out, true),
        }
    }
    finish_inline(out)
}

fn finish_inline(out: String) -> String {
    // right-trim each line but keep hard breaks from <br>
    let lines: Vec<&str> = out.lines().map(str::trim_end).collect();
    lines.join("\n").trim().to_string()
}

fn render_inline_node(node: &Node, out: &mut String, descend_blocks: bool) {
    match node {
        Node::Text(t) => push_collapsed(out, t),
        Node::Element(e) => {
            if DROP_TAGS.contains(&e.tag.as_str()) {
                return;
            }
            match e.tag.as_str() {
                "a" => render_anchor(e, out),
                "br" => out.push('\n'),
                _ => {
                    if !is_inline(e) && !descend_blocks {
                        return;
                    }
                    if !is_inline(e) && !out.ends_with(' ') && !out.is_empty() {
                        out.push(' ');
                    }
                    for child in &e.children {
                        render_inline_node(child, out, descend_blocks);
                    }
                    if !is_inline(e) && !out.ends_with(' ') && !out.is_empty() {
                        out.push(' ');
                    }
                }
            }
        }
    }
}

fn render_inline(el: &Element, out: &mut String) {
    render_inline_node(&Node::Element(el.clone()), out, true);
}

/// `[text](href)`; anchors without text or target degrade to plain text.
fn render_anchor(el: &Element, out: &mut String) {
    let mut text = String::new();
    for child in &el.children {
        render_inline_node(child, &mut text, true);
    }
    let text = text.trim();
    let href = el.attr("href").unwrap_or("").trim();
    if text.is_empty() {
        return;
    }
    if href.is_empty() || href.starts_with('#') || href.starts_with("javascript:") {
        push_collapsed(out, text);
        return;
    }
    let safe_href: String = href
        .chars()
        .map(|c| match c {
            ' ' => "%20".to_string(),
            '(' => "%28".to_string(),
            ')' => "%29".to_string(),
            _ => c.to_string(),
        })
        .collect();
    out.push_str(&format!("[{text}]({safe_href})"));
}

/// Append text with every whitespace run (including newlines) as one space.
fn push_collapsed(out: &mut String, text: &str) {
    for c in text.chars() {
        if c.is_whitespace() {
            if !out.ends_with(' ') && !out.ends_with('\n') && !out.is_empty() {
                out.push(' ');
            }
        } else {
            out.push(c);
        }
    }
}

fn raw_text(el: &Element) -> String {
    let mut out = String::new();
    fn go(el: &Element, out: &mut String) {
        for child in &el.children {
            match child {
                Node::Text(t) => out.push_str(t),
                Node::Element(e) => go(e, out),
            }
        }
    }
    go(el, &mut out);
    out
}

fn is_inline(el: &Element) -> bool {
    INLINE_TAGS.contains(&el.tag.as_str())
}

/// Bare text blocks: split at blank lines, normalize each line (right-trim,
/// collapse interior runs, keep leading indent).
fn flush_run(run: &mut String, preserve_lines: bool, blocks: &mut Vec<String>) {
    if run.chars().all(|c| c.is_whitespace()) {
        run.clear();
        return;
    }
    let text = std::mem::take(run);
    if preserve_lines {
        for block in split_blank_lines(&text) {
            blocks.push(block);
        }
    } else {
        let lines: Vec<&str> = text.lines().map(str::trim_end).collect();
        let joined = lines.join("\n").trim().to_string();
        if !joined.is_empty() {
            blocks.push(joined);
        }
    }
}

fn split_blank_lines(text: &str) -> Vec<String> {
    let mut blocks = Vec::new();
    let mut cur: Vec<String> = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            if !cur.is_empty() {
                blocks.push(cur.join("\n"));
                cur.clear();
            }
        } else {
            cur.push(normalize_line(line));
        }
    }
    if !cur.is_empty() {
        blocks.push(cur.join("\n"));
    }
    blocks
}

/// Keep leading whitespace, collapse interior space/tab runs, right-trim.
fn normalize_line(line: &str) -> String {
    let indent_len = line.len() - line.trim_start().len();
    let (indent, rest) = line.split_at(indent_len);
    let mut out = String::with_capacity(line.len());
    out.push_str(indent);
    let mut in_ws = false;
    for c in rest.chars() {
        if c == ' ' || c == '\t' {
            in_ws = true;
        } else {
            if in_ws {
                out.push(' ');
            }
            in_ws = false;
            out.push(c);
        }
    }
    out
}

/// Collapse blank-line runs, right-trim lines, drop edge blanks.
fn normalize_document(doc: &str) -> String {
    let mut lines: Vec<&str> = Vec::new();
    let mut blank_pending = false;
    for line in doc.lines() {
        let line = line.trim_end();
        if line.is_empty() {
            blank_pending = !lines.is_empty();
        } else {
            if blank_pending {
                lines.push("");
            }
            blank_pending = false;
            lines.push(line);
        }
    }
    lines.join("\n")
}

/// Drop non-sentence text (headers, list items, tables, horizontal rules),
/// keep paragraph text with link anchors in place of `[text](href)` pairs.
pub fn strip_to_sentences(markdown: &str) -> String {
    let mut paragraphs: Vec<String> = Vec::new();
    let mut cur: Vec<String> = Vec::new();
    for line in markdown.lines() {
        let t = line.trim_start();
        let is_markup = t.starts_with('#')
            || t.starts_with("- ")
            || t.starts_with("* ")
            || t.starts_with('|')
            || is_numbered_item(t)
            || (!t.is_empty() && t.chars().all(|c| c == '-' || c == '='));
        if t.is_empty() || is_markup {
            if !cur.is_empty() {
                paragraphs.push(cur.join(" "));
                cur.clear();
            }
            continue;
        }
        cur.push(strip_links(t));
    }
    if !cur.is_empty() {
        paragraphs.push(cur.join(" "));
    }
    paragraphs.join("\n\n")
}

fn is_numbered_item(line: &str) -> bool {
    let digits = line.bytes().take_while(|b| b.is_ascii_digit()).count();
    digits > 0 && line[digits..].starts_with(". ")
}

/// `[text](href)` → `text`.
fn strip_links(line: &str) -> String {
    let mut out = String::with_capacity(line.len());
    let mut rest = line;
    while let Some(start) = rest.find('[') {
        let Some(mid) = rest[start..].find("](") else {
            break;
        };
        let Some(close) = rest[start + mid..].find(')') else {
            break;
        };
        out.push_str(&rest[..start]);
        out.push_str(&rest[start + 1..start + mid]);
        rest = &rest[start + mid + close + 1..];
    }
    out.push_str(rest);
    out
}
