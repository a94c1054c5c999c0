//! HTTP client for one archive endpoint. Every request goes through the
//! shared politeness gate, redirects are followed manually so each hop can
//! be checked against the archive host, and raw (`id_`) captures are
//! requested so bodies arrive without replay rewriting.

use std::sync::Arc;
use std::time::Duration;

use url::Url;

use crate::corpus::{interval_of_timestamp14, Interval, SnapshotRef};

use super::cdx::{cdx_query_url, parse_cdx_response};
use super::gate::Gate;
use super::{ArchiveError, ArchivedPage};

const MAX_HOPS: usize = 10;

pub struct ArchiveClient {
    endpoint: Url,
    http: reqwest::blocking::Client,
    gate: Arc<Gate>,
    retries: u32,
}

impl ArchiveClient {
    pub fn new(endpoint: &str, gate: Arc<Gate>, retries: u32) -> Result<Self, ArchiveError> {
        let endpoint = Url::parse(endpoint)
            .map_err(|e| ArchiveError::BadResponse(format!("endpoint {endpoint:?}: {e}")))?;
        if endpoint.host_str().is_none() {
            return Err(ArchiveError::BadResponse(format!(
                "endpoint {endpoint} has no host"
            )));
        }
        let http = reqwest::blocking::Client::builder()
            .redirect(reqwest::redirect::Policy::none())
            .timeout(Duration::from_secs(60))
            .build()
            .map_err(|e| ArchiveError::Transport(e.to_string()))?;
        Ok(ArchiveClient { endpoint, http, gate, retries })
    }

    pub fn endpoint(&self) -> &Url {
        &self.endpoint
    }

    pub fn gate(&self) -> &Arc<Gate> {
        &self.gate
    }

    /// All captures of `page_url` known to the CDX index, sorted by timestamp.
    pub fn list_snapshots(&self, page_url: &str) -> Result<Vec<SnapshotRef>, ArchiveError> {
        let query = cdx_query_url(&self.endpoint, page_url)?;
        self.with_retries(|| {
            let response = self.get_checked(&query)?;
            let status = response.status().as_u16();
            match status {
                200 => {
                    self.gate.reset();
                    let body = response
                        .text()
                        .map_err(|e| ArchiveError::Transport(e.to_string()))?;
                    parse_cdx_response(&body)
                }
                429 | 503 => {
                    self.gate.trip();
                    Err(ArchiveError::RateLimited)
                }
                404 => Err(ArchiveError::NotArchived),
                s => Err(ArchiveError::FetchError { status: s }),
            }
        })
    }

    /// Fetch a capture and require that, after any archive-side redirects,
    /// the page actually served still falls inside `interval`.
    pub fn fetch_snapshot(
        &self,
        snapshot: &SnapshotRef,
        interval: Interval,
    ) -> Result<ArchivedPage, ArchiveError> {
        let page = self.fetch_capture(snapshot)?;
        let landed = interval_of_timestamp14(&page.final_timestamp)
            .map_err(|e| ArchiveError::BadResponse(format!("final timestamp: {e}")))?;
        if landed != interval {
            return Err(ArchiveError::OutOfIntervalRedirect {
                timestamp: page.final_timestamp,
                interval: interval.to_string(),
            });
        }
        Ok(page)
    }

    /// Fetch a capture with no interval constraint.
    pub fn fetch_capture(&self, snapshot: &SnapshotRef) -> Result<ArchivedPage, ArchiveError> {
        let start = self.capture_url(&snapshot.timestamp, &snapshot.original_url)?;
        self.with_retries(|| self.follow_hops(start.clone()))
    }

    fn capture_url(&self, timestamp: &str, original_url: &str) -> Result<Url, ArchiveError> {
        let path = format!("/web/{timestamp}id_/{original_url}");
        self.endpoint
            .join(&path)
            .map_err(|e| ArchiveError::BadResponse(format!("capture url: {e}")))
    }

    fn follow_hops(&self, start: Url) -> Result<ArchivedPage, ArchiveError> {
        let mut current = start;
        for _ in 0..MAX_HOPS {
            let response = self.get_checked(&current)?;
            let status = response.status().as_u16();
            match status {
                200 => {
                    self.gate.reset();
                    let (final_timestamp, final_url) = parse_capture_path(&current)
                        .ok_or_else(|| {
                            ArchiveError::BadResponse(format!(
                                "capture path {:?} not /web/<ts>/<url>",
                                current.path()
                            ))
                        })?;
                    let content_type = response
                        .headers()
                        .get(reqwest::header::CONTENT_TYPE)
                        .and_then(|v| v.to_str().ok())
                        .unwrap_or("")
                        .to_string();
                    let body = response
                        .bytes()
                        .map_err(|e| ArchiveError::Transport(e.to_string()))?
                        .to_vec();
                    return Ok(ArchivedPage { final_url, final_timestamp, body, content_type });
                }
                301 | 302 | 303 | 307 | 308 => {
                    let location = response
                        .headers()
                        .get(reqwest::header::LOCATION)
                        .and_then(|v| v.to_str().ok())
                        .ok_or_else(|| {
                            ArchiveError::BadResponse(format!("{status} without location"))
                        })?;
                    current = current
                        .join(location)
                        .map_err(|e| ArchiveError::BadResponse(format!("location: {e}")))?;
                }
                429 | 503 => {
                    self.gate.trip();
                    return Err(ArchiveError::RateLimited);
                }
                404 => return Err(ArchiveError::NotArchived),
                s => return Err(ArchiveError::FetchError { status: s }),
            }
        }
        Err(ArchiveError::TooManyRedirects)
    }

    /// Refuses to request any URL off the archive origin; this check runs
    /// before the request, so a stray absolute redirect is never contacted.
    fn get_checked(&self, url: &Url) -> Result<reqwest::blocking::Response, ArchiveError> {
        if !same_origin(&self.endpoint, url) {
            return Err(ArchiveError::NonArchiveHost(url.to_string()));
        }
        self.gate.wait_ready();
        self.http
            .get(url.clone())
            .send()
            .map_err(|e| ArchiveError::Transport(e.to_string()))
    }

    fn with_retries<T>(
        &self,
        mut op: impl FnMut() -> Result<T, ArchiveError>,
    ) -> Result<T, ArchiveError> {
        let mut attempt = 0;
        loop {
            match op() {
                Err(e @ (ArchiveError::RateLimited | ArchiveError::Transport(_)))
                    if attempt < self.retries =>
                {
                    log::warn!("retrying after {e}");
                    attempt += 1;
                }
                other => return other,
            }
        }
    }
}

fn same_origin(endpoint: &Url, url: &Url) -> bool {
    url.scheme() == endpoint.scheme()
        && url.host_str() == endpoint.host_str()
        && url.port_or_known_default() == endpoint.port_or_known_default()
}

/// Extract `(timestamp, original_url)` from a `/web/<ts>[id_]/<url>` path.
/// The query string, if any, belongs to the original URL.
fn parse_capture_path(url: &Url) -> Option<(String, String)> {
    let rest = url.path().strip_prefix("/web/")?;
    let (ts_token, target) = rest.split_once('/')?;
    let timestamp = ts_token.strip_suffix("id_").unwrap_or(ts_token);
    if timestamp.len() != 14 || !timestamp.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut original = target.to_string();
    if let Some(query) = url.query() {
        original.push('?');
        original.push_str(query);
    }
    Some((timestamp.to_string(), original))
}

#[cfg(test)]
mod tests {
    use super::super::mock::{MockArchive, MockCapture, MockOptions};
    use super::*;
    use crate::corpus::interval_of_timestamp14;

    fn capture(url: &str, ts: &str, body: &str) -> MockCapture {
        MockCapture {
            url: url.into(),
            timestamp: ts.into(),
            status: 200,
            mime: "text/html".into(),
            digest: String::new(),
            body: body.into(),
            redirect_timestamp: None,
            redirect_url: None,
        }
    }

    fn redirect(url: &str, ts: &str, to_ts: &str, to_url: &str) -> MockCapture {
        MockCapture {
            status: 302,
            redirect_timestamp: Some(to_ts.into()),
            redirect_url: Some(to_url.into()),
            ..capture(url, ts, "")
        }
    }

    fn snap(url: &str, ts: &str) -> SnapshotRef {
        SnapshotRef {
            original_url: url.into(),
            timestamp: ts.into(),
            status: 200,
            mime: "text/html".into(),
            digest: String::new(),
        }
    }

    fn client(mock: &MockArchive) -> ArchiveClient {
        let gate = Arc::new(Gate::from_secs(0, 0));
        ArchiveClient::new(&mock.endpoint(), gate, 1).unwrap()
    }

    #[test]
    fn lists_snapshots_from_cdx() {
        let mock = MockArchive::start(
            vec![
                capture("http://example.com/", "20160320000000", "a"),
                capture("http://example.com/", "20150320000000", "b"),
            ],
            MockOptions::default(),
        )
        .unwrap();
        let snapshots = client(&mock).list_snapshots("http://example.com/").unwrap();
        assert_eq!(snapshots.len(), 2);
        assert_eq!(snapshots[0].timestamp, "20150320000000");
        assert_eq!(snapshots[1].timestamp, "20160320000000");
    }

    #[test]
    fn fetches_capture_body() {
        let mock = MockArchive::start(
            vec![capture("http://example.com/", "20150320000000", "<html>hi</html>")],
            MockOptions::default(),
        )
        .unwrap();
        let interval = interval_of_timestamp14("20150320000000").unwrap();
        let page = client(&mock)
            .fetch_snapshot(&snap("http://example.com/", "20150320000000"), interval)
            .unwrap();
        assert_eq!(page.body, b"<html>hi</html>");
        assert_eq!(page.final_timestamp, "20150320000000");
        assert_eq!(page.final_url, "http://example.com/");
        assert_eq!(page.content_type, "text/html");
    }

    #[test]
    fn follows_redirect_within_interval() {
        let mock = MockArchive::start(
            vec![
                redirect("http://example.com/", "20150320000000", "20150322000000", "http://example.com/home"),
                capture("http://example.com/home", "20150322000000", "landed"),
            ],
            MockOptions::default(),
        )
        .unwrap();
        let interval = interval_of_timestamp14("20150320000000").unwrap();
        let page = client(&mock)
            .fetch_snapshot(&snap("http://example.com/", "20150320000000"), interval)
            .unwrap();
        assert_eq!(page.final_url, "http://example.com/home");
        assert_eq!(page.final_timestamp, "20150322000000");
        assert_eq!(page.body, b"landed");
    }

    #[test]
    fn rejects_redirect_landing_outside_interval() {
        let mock = MockArchive::start(
            vec![
                redirect("http://example.com/", "20150320000000", "20170801000000", "http://example.com/"),
                capture("http://example.com/", "20170801000000", "future"),
            ],
            MockOptions::default(),
        )
        .unwrap();
        let interval = interval_of_timestamp14("20150320000000").unwrap();
        let err = client(&mock)
            .fetch_snapshot(&snap("http://example.com/", "20150320000000"), interval)
            .unwrap_err();
        match err {
            ArchiveError::OutOfIntervalRedirect { timestamp, .. } => {
                assert_eq!(timestamp, "20170801000000");
            }
            other => panic!("expected OutOfIntervalRedirect, got {other:?}"),
        }
    }

    #[test]
    fn missing_capture_is_not_archived() {
        let mock = MockArchive::start(vec![], MockOptions::default()).unwrap();
        let interval = interval_of_timestamp14("20150320000000").unwrap();
        let err = client(&mock)
            .fetch_snapshot(&snap("http://example.com/", "20150320000000"), interval)
            .unwrap_err();
        assert!(matches!(err, ArchiveError::NotArchived));
    }

    #[test]
    fn server_error_maps_to_fetch_error() {
        let mut broken = capture("http://example.com/", "20150320000000", "boom");
        broken.status = 500;
        let mock = MockArchive::start(vec![broken], MockOptions::default()).unwrap();
        let interval = interval_of_timestamp14("20150320000000").unwrap();
        let err = client(&mock)
            .fetch_snapshot(&snap("http://example.com/", "20150320000000"), interval)
            .unwrap_err();
        assert!(matches!(err, ArchiveError::FetchError { status: 500 }));
    }

    #[test]
    fn rate_limited_then_retried_after_gate_pause() {
        let mock = MockArchive::start(
            vec![capture("http://example.com/", "20150320000000", "ok")],
            MockOptions { rate_limit_first_hits: 1, ..Default::default() },
        )
        .unwrap();
        let gate = Arc::new(Gate::new(
            Duration::from_millis(30),
            Duration::from_millis(200),
        ));
        let client = ArchiveClient::new(&mock.endpoint(), Arc::clone(&gate), 1).unwrap();
        let interval = interval_of_timestamp14("20150320000000").unwrap();
        let started = std::time::Instant::now();
        let page = client
            .fetch_snapshot(&snap("http://example.com/", "20150320000000"), interval)
            .unwrap();
        assert_eq!(page.body, b"ok");
        // the retry had to sit out the 30ms pause the 429 tripped
        assert!(started.elapsed() >= Duration::from_millis(30));
        assert_eq!(mock.request_count(), 2);
    }

    #[test]
    fn rate_limit_exhausts_retries() {
        let mock = MockArchive::start(
            vec![capture("http://example.com/", "20150320000000", "ok")],
            MockOptions { rate_limit_first_hits: 5, ..Default::default() },
        )
        .unwrap();
        let gate = Arc::new(Gate::from_secs(0, 0));
        let client = ArchiveClient::new(&mock.endpoint(), gate, 1).unwrap();
        let interval = interval_of_timestamp14("20150320000000").unwrap();
        let err = client
            .fetch_snapshot(&snap("http://example.com/", "20150320000000"), interval)
            .unwrap_err();
        assert!(matches!(err, ArchiveError::RateLimited));
        assert_eq!(mock.request_count(), 2); // initial try + one retry
    }

    #[test]
    fn never_requests_other_hosts_even_when_redirected_there() {
        let mut escape = capture("http://example.com/", "20150320000000", "");
        escape.status = 302;
        escape.redirect_timestamp = None;
        escape.redirect_url = None;
        let mock = MockArchive::start(vec![escape], MockOptions::default()).unwrap();
        // mock answers 500 for a redirect capture without a target, so build
        // the escape hop by hand: a Location pointing off-archive must be
        // refused before any connection is attempted.
        let client = client(&mock);
        let off_archive = Url::parse("http://elsewhere.test/page").unwrap();
        let err = client.get_checked(&off_archive).unwrap_err();
        assert!(matches!(err, ArchiveError::NonArchiveHost(_)));
        for request in mock.requests() {
            assert_eq!(request.host, mock.authority());
        }
    }

    #[test]
    fn redirect_cycle_stops_with_too_many_redirects() {
        let mock = MockArchive::start(
            vec![redirect("http://example.com/", "20150320000000", "20150320000000", "http://example.com/")],
            MockOptions::default(),
        )
        .unwrap();
        let interval = interval_of_timestamp14("20150320000000").unwrap();
        let err = client(&mock)
            .fetch_snapshot(&snap("http://example.com/", "20150320000000"), interval)
            .unwrap_err();
        assert!(matches!(err, ArchiveError::TooManyRedirects));
    }

    #[test]
    fn capture_path_parse_handles_query_and_modifier() {
        let url = Url::parse("http://a.test/web/20150320000000id_/http://e.com/p?x=1").unwrap();
        let (ts, original) = parse_capture_path(&url).unwrap();
        assert_eq!(ts, "20150320000000");
        assert_eq!(original, "http://e.com/p?x=1");

        let plain = Url::parse("http://a.test/web/20150320000000/http://e.com/").unwrap();
        assert_eq!(
            parse_capture_path(&plain).unwrap().1,
            "http://e.com/"
        );
        let bad = Url::parse("http://a.test/web/2015id_/http://e.com/").unwrap();
        assert!(parse_capture_path(&bad).is_none());
    }
}
