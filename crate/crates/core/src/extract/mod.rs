//! Page extraction: tolerant HTML parsing, main-content selection,
//! markdown conversion, language identification, and policy-link discovery.
//!
//! Everything here is pure and deterministic; callers may fan out over
//! documents freely.

pub mod content;
pub mod html;
pub mod language;
pub mod links;
pub mod markdown;

pub use content::{extract_main_content, is_blank, page_title, MainContent};
pub use html::{parse, Element, Node};
pub use language::{detect_language, is_english};
pub use links::{find_policy_links, is_pdf_link, CandidateLink, PatternRule, PatternTable};
pub use markdown::{strip_to_sentences, to_markdown};

#[derive(Debug, thiserror::Error)]
pub enum ExtractError {
    #[error("bad link pattern: {0}")]
    BadPattern(String),
}
