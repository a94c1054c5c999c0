//! Web-archive access: CDX snapshot discovery, raw capture fetching with
//! host pinning and redirect policing, a shared rate-limit gate, and a
//! bounded worker pool. A mock archive backs offline runs and tests.

pub mod cdx;
pub mod client;
pub mod gate;
pub mod mock;
pub mod pool;

pub use cdx::{cdx_query_url, parse_cdx_response, select_snapshot};
pub use client::ArchiveClient;
pub use gate::Gate;
pub use mock::{load_captures_jsonl, MockArchive, MockCapture, MockOptions, RecordedRequest};
pub use pool::run_pool;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ArchiveError {
    #[error("rate limited by archive")]
    RateLimited,
    #[error("page not archived")]
    NotArchived,
    #[error("redirected to capture {timestamp} outside interval {interval}")]
    OutOfIntervalRedirect { timestamp: String, interval: String },
    #[error("refusing to contact non-archive host: {0}")]
    NonArchiveHost(String),
    #[error("too many redirects")]
    TooManyRedirects,
    #[error("fetch failed with status {status}")]
    FetchError { status: u16 },
    #[error("transport error: {0}")]
    Transport(String),
    #[error("bad archive response: {0}")]
    BadResponse(String),
}

/// A capture as actually served, after any archive-side redirects.
/// `final_url` and `final_timestamp` come from the landing capture path,
/// which is what redirect policing and homepage-evidence checks need.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArchivedPage {
    pub final_url: String,
    pub final_timestamp: String,
    pub body: Vec<u8>,
    pub content_type: String,
}

impl ArchivedPage {
    pub fn body_text(&self) -> String {
        String::from_utf8_lossy(&self.body).into_owned()
    }
}
