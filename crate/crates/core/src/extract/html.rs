//! A tolerant HTML parser: tokenizer plus tree builder. Malformed markup
//! never fails; unknown constructs degrade to text or get skipped. The
//! output tree is enough for text extraction, not a DOM.

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Element(Element),
    Text(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    /// Lowercase tag name.
    pub tag: String,
    /// Attributes in source order, names lowercased, values entity-decoded.
    pub attrs: Vec<(String, String)>,
    pub children: Vec<Node>,
}

impl Element {
    pub fn new(tag: &str) -> Self {
        Element {
            tag: tag.to_string(),
            attrs: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }

    /// Depth-first walk over descendant elements, self included.
    pub fn walk<'a>(&'a self, visit: &mut dyn FnMut(&'a Element)) {
        visit(self);
        for child in &self.children {
            if let Node::Element(el) = child {
                el.walk(visit);
            }
        }
    }

    /// Concatenated text content, whitespace collapsed to single spaces.
    /// Script and style text never counts.
    pub fn text_content(&self) -> String {
        let mut raw = String::new();
        collect_text(self, &mut raw);
        collapse_ws(&raw)
    }

    /// First descendant (or self) with the given tag, depth first.
    pub fn find(&self, tag: &str) -> Option<&Element> {
        if self.tag == tag {
            return Some(self);
        }
        for child in &self.children {
            if let Node::Element(el) = child {
                if let Some(found) = el.find(tag) {
                    return Some(found);
                }
            }
        }
        None
    }
}

fn collect_text(el: &Element, out: &mut String) {
    if matches!(el.tag.as_str(), "script" | "style" | "noscript" | "template") {
        return;
    }
    for child in &el.children {
        match child {
            Node::Text(t) => {
                out.push(' ');
                out.push_str(t);
            }
            Node::Element(e) => collect_text(e, out),
        }
    }
}

pub fn collapse_ws(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut in_ws = true;
    for c in s.chars() {
        if c.is_whitespace() {
            if !in_ws {
                out.push(' ');
            }
            in_ws = true;
        } else {
            out.push(c);
            in_ws = false;
        }
    }
    while out.ends_with(' ') {
        out.pop();
    }
    out
}

/// Elements that never have children.
const VOID_TAGS: &[&str] = &[
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param",
    "source", "track", "wbr",
];

/// Opening one of these closes a previous unclosed sibling of the same tag.
const SELF_NESTING: &[&str] = &["li", "p", "td", "th", "tr", "option", "dd", "dt"];

/// Raw-text elements: content runs to the matching close tag, unparsed.
const RAW_TEXT: &[&str] = &["script", "style"];

/// Parse HTML into a tree under a synthetic `#root` element. Never fails.
pub fn parse(html: &str) -> Element {
    let bytes = html.as_bytes();
    let mut pos = 0;
    // stack[0] is the synthetic root; elements above it are open tags
    let mut stack: Vec<Element> = vec![Element::new("#root")];

    while pos < bytes.len() {
        if bytes[pos] == b'<' {
            if let Some(consumed) = try_markup(html, pos, &mut stack) {
                pos += consumed;
                continue;
            }
            // stray '<': treat as text
            push_text(&mut stack, "<");
            pos += 1;
        } else {
            let end = html[pos..]
                .find('<')
                .map(|i| pos + i)
                .unwrap_or(bytes.len());
            push_text(&mut stack, &decode_entities(&html[pos..end]));
            pos = end;
        }
    }

    // unclosed elements attach to their parents at end of input
    while stack.len() > 1 {
        let el = stack.pop().unwrap();
        stack.last_mut().unwrap().children.push(Node::Element(el));
    }
    stack.pop().unwrap()
}

fn push_text(stack: &mut [Element], text: &str) {
    let parent = stack.last_mut().unwrap();
    if let Some(Node::Text(prev)) = parent.children.last_mut() {
        prev.push_str(text);
    } else {
        parent.children.push(Node::Text(text.to_string()));
    }
}

/// Try to consume markup starting at `pos` (which holds '<'). Returns the
/// number of bytes consumed, or None if this '<' does not open markup.
fn try_markup(html: &str, pos: usize, stack: &mut Vec<Element>) -> Option<usize> {
    let rest = &html[pos..];

    if let Some(after) = rest.strip_prefix("<!--") {
        let end = after.find("-->").map(|i| i + 3).unwrap_or(after.len());
        return Some(4 + end);
    }
    if rest.starts_with("<!") || rest.starts_with("<?") {
        let end = rest.find('>').map(|i| i + 1).unwrap_or(rest.len());
        return Some(end);
    }
    if let Some(after) = rest.strip_prefix("</") {
        let end = after.find('>')?;
        let name = after[..end]
            .trim()
            .trim_end_matches('/')
            .to_ascii_lowercase();
        close_tag(stack, &name);
        return Some(2 + end + 1);
    }

    // open tag: '<' then a letter
    let mut chars = rest.char_indices().skip(1);
    let (_, first) = chars.next()?;
    if !first.is_ascii_alphabetic() {
        return None;
    }
    let end = find_tag_end(rest)?;
    let inner = &rest[1..end];
    let self_closing = inner.ends_with('/');
    let inner = inner.trim_end_matches('/');

    let name_len = inner
        .find(|c: char| c.is_whitespace())
        .unwrap_or(inner.len());
    let tag = inner[..name_len].to_ascii_lowercase();
    let mut element = Element::new(&tag);
    parse_attrs(&inner[name_len..], &mut element.attrs);

    let mut consumed = end + 1;

    if RAW_TEXT.contains(&tag.as_str()) && !self_closing {
        // swallow everything to the matching close tag
        let after = &rest[consumed..];
        let lower = after.to_ascii_lowercase();
        let close = format!("</{tag}");
        if let Some(idx) = lower.find(&close) {
            let content = &after[..idx];
            if !content.is_empty() {
                element.children.push(Node::Text(content.to_string()));
            }
            let close_end = after[idx..].find('>').map(|i| idx + i + 1).unwrap_or(after.len());
            consumed += close_end;
        } else {
            element.children.push(Node::Text(after.to_string()));
            consumed = rest.len();
        }
        stack.last_mut().unwrap().children.push(Node::Element(element));
        return Some(consumed);
    }

    if SELF_NESTING.contains(&tag.as_str()) {
        if let Some(top) = stack.last() {
            if top.tag == tag {
                close_tag(stack, &tag);
            }
        }
    }

    if VOID_TAGS.contains(&tag.as_str()) || self_closing {
        stack.last_mut().unwrap().children.push(Node::Element(element));
    } else {
        stack.push(element);
    }
    Some(consumed)
}

/// Position of the tag-closing '>', skipping quoted attribute values.
fn find_tag_end(rest: &str) -> Option<usize> {
    let mut quote: Option<u8> = None;
    for (i, b) in rest.bytes().enumerate() {
        match quote {
            Some(q) => {
                if b == q {
                    quote = None;
                }
            }
            None => match b {
                b'"' | b'\'' => quote = Some(b),
                b'>' => return Some(i),
                _ => {}
            },
        }
    }
    None
}

/// Close the nearest open element with this tag, attaching everything above
/// it to its parent in turn. Unmatched close tags are ignored.
fn close_tag(stack: &mut Vec<Element>, name: &str) {
    let Some(open_idx) = stack.iter().rposition(|el| el.tag == name) else {
        return;
    };
    if open_idx == 0 {
        return; // never close the synthetic root
    }
    while stack.len() > open_idx {
        let el = stack.pop().unwrap();
        stack.last_mut().unwrap().children.push(Node::Element(el));
    }
}

fn parse_attrs(mut rest: &str, attrs: &mut Vec<(String, String)>) {
    loop {
        rest = rest.trim_start();
        if rest.is_empty() {
            return;
        }
        let name_end = rest
            .find(|c: char| c.is_whitespace() || c == '=')
            .unwrap_or(rest.len());
        if name_end == 0 {
            // stray '=' or quote: skip one char
            rest = &rest[rest.chars().next().map(char::len_utf8).unwrap_or(1)..];
            continue;
        }
        let name = rest[..name_end].to_ascii_lowercase();
        rest = rest[name_end..].trim_start();
        let value = if let Some(after_eq) = rest.strip_prefix('=') {
            let after_eq = after_eq.trim_start();
            if let Some(q) = after_eq.strip_prefix('"') {
                let end = q.find('"').unwrap_or(q.len());
                rest = &q[(end + 1).min(q.len())..];
                q[..end].to_string()
            } else if let Some(q) = after_eq.strip_prefix('\'') {
                let end = q.find('\'').unwrap_or(q.len());
                rest = &q[(end + 1).min(q.len())..];
                q[..end].to_string()
            } else {
                let end = after_eq
                    .find(|c: char| c.is_whitespace())
                    .unwrap_or(after_eq.len());
                rest = &after_eq[end..];
                after_eq[..end].to_string()
            }
        } else {
            String::new()
        };
        attrs.push((name, decode_entities(&value)));
    }
}

/// Decode the common named entities plus numeric character references.
pub fn decode_entities(text: &str) -> String {
    if !text.contains('&') {
        return text.to_string();
    }
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        let entity = &rest[amp..];
        let semi = entity[..entity.len().min(12)].find(';');
        let Some(semi) = semi else {
            out.push('&');
            rest = &entity[1..];
            continue;
        };
        let name = &entity[1..semi];
        let decoded: Option<String> = match name {
            "amp" => Some("&".into()),
            "lt" => Some("<".into()),
            "gt" => Some(">".into()),
            "quot" => Some("\"".into()),
            "apos" => Some("'".into()),
            "nbsp" => Some(" ".into()),
            "copy" => Some("©".into()),
            "reg" => Some("®".into()),
            "mdash" => Some("—".into()),
            "ndash" => Some("–".into()),
            "rsquo" => Some("’".into()),
            "lsquo" => Some("‘".into()),
            "ldquo" => Some("“".into()),
            "rdquo" => Some("”".into()),
            _ => {
                if let Some(num) = name.strip_prefix("#x").or_else(|| name.strip_prefix("#X")) {
                    u32::from_str_radix(num, 16)
                        .ok()
                        .and_then(char::from_u32)
                        .map(String::from)
                } else if let Some(num) = name.strip_prefix('#') {
                    num.parse::<u32>()
                        .ok()
                        .and_then(char::from_u32)
                        .map(String::from)
                } else {
                    None
                }
            }
        };
        match decoded {
            Some(s) => {
                out.push_str(&s);
                rest = &entity[semi + 1..];
            }
            None => {
                out.push('&');
                rest = &entity[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn well_formed_tree() {
        let root = parse("<html><body><p>Hello <b>world</b></p></body></html>");
        let p = root.find("p").unwrap();
        assert_eq!(p.text_content(), "Hello world");
        assert_eq!(root.find("b").unwrap().text_content(), "world");
    }

    #[test]
    fn attributes_parse_in_all_quote_styles() {
        let root = parse(r#"<a href="/p" class='x y' data-k=v disabled>go</a>"#);
        let a = root.find("a").unwrap();
        assert_eq!(a.attr("href"), Some("/p"));
        assert_eq!(a.attr("class"), Some("x y"));
        assert_eq!(a.attr("data-k"), Some("v"));
        assert_eq!(a.attr("disabled"), Some(""));
        assert_eq!(a.attr("missing"), None);
    }

    #[test]
    fn unclosed_tags_recover() {
        let root = parse("<div><p>one<p>two<div>three");
        // both paragraphs end up in the outer div; nothing is lost
        let text = root.text_content();
        assert_eq!(text, "one two three");
    }

    #[test]
    fn mismatched_close_ignored() {
        let root = parse("<div>hello</span></div>");
        assert_eq!(root.text_content(), "hello");
        assert!(root.find("span").is_none());
    }

    #[test]
    fn li_auto_closes() {
        let root = parse("<ul><li>a<li>b<li>c</ul>");
        let ul = root.find("ul").unwrap();
        let lis: Vec<_> = ul
            .children
            .iter()
            .filter_map(|n| match n {
                Node::Element(e) if e.tag == "li" => Some(e.text_content()),
                _ => None,
            })
            .collect();
        assert_eq!(lis, vec!["a", "b", "c"]);
    }

    #[test]
    fn script_and_style_content_is_not_text() {
        let html = "<body><script>var x = '<p>not text</p>';</script><style>p{}</style>real</body>";
        let root = parse(html);
        assert_eq!(root.text_content(), "real");
        assert!(root.find("p").is_none());
    }

    #[test]
    fn comments_and_doctype_skipped() {
        let root = parse("<!DOCTYPE html><!-- note --><p>kept</p>");
        assert_eq!(root.text_content(), "kept");
    }

    #[test]
    fn entities_decoded() {
        let root = parse("<p>a &amp; b &lt;c&gt; &#65; &#x42; &nbsp;d &unknown; e</p>");
        assert_eq!(root.text_content(), "a & b <c> A B d &unknown; e");
    }

    #[test]
    fn void_elements_take_no_children() {
        let root = parse("<p>line<br>next<img src=x>end</p>");
        assert_eq!(root.find("p").unwrap().text_content(), "line next end");
        assert!(root.find("br").unwrap().children.is_empty());
    }

    #[test]
    fn stray_angle_bracket_is_text() {
        let root = parse("<p>5 < 6 and 7 > 2</p>");
        assert_eq!(root.text_content(), "5 < 6 and 7 > 2");
    }

    #[test]
    fn quoted_angle_bracket_in_attribute() {
        let root = parse(r#"<a title="a>b" href="/x">go</a>"#);
        let a = root.find("a").unwrap();
        assert_eq!(a.attr("title"), Some("a>b"));
        assert_eq!(a.attr("href"), Some("/x"));
        assert_eq!(a.text_content(), "go");
    }

    #[test]
    fn plain_text_survives_whole() {
        let md = "# Title\n\nWe collect data.\n";
        let root = parse(md);
        assert_eq!(root.children.len(), 1);
        match &root.children[0] {
            Node::Text(t) => assert_eq!(t, md),
            other => panic!("expected text, got {other:?}"),
        }
    }
}
