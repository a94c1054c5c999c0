//! An in-process archive replaying fixture captures over real HTTP, for
//! offline end-to-end runs and politeness tests. It records every request
//! (host header, path, peak concurrency) so tests can assert the client
//! never talks to any other host and respects worker bounds.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::ArchiveError;

fn default_status() -> u16 {
    200
}

fn default_mime() -> String {
    "text/html".to_string()
}

/// One archived capture the mock can serve. Redirect captures (3xx status)
/// point at another capture via `redirect_timestamp`/`redirect_url`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MockCapture {
    pub url: String,
    pub timestamp: String,
    #[serde(default = "default_status")]
    pub status: u16,
    #[serde(default = "default_mime")]
    pub mime: String,
    #[serde(default)]
    pub digest: String,
    #[serde(default)]
    pub body: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub redirect_timestamp: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub redirect_url: Option<String>,
}

/// One capture per line as JSON; blank lines skipped.
pub fn load_captures_jsonl(text: &str) -> Result<Vec<MockCapture>, ArchiveError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let capture: MockCapture = serde_json::from_str(line)
            .map_err(|e| ArchiveError::BadResponse(format!("captures line {}: {e}", i + 1)))?;
        out.push(capture);
    }
    Ok(out)
}

#[derive(Clone, Debug, Default)]
pub struct MockOptions {
    /// The first N `/web/` requests answer 429 before normal service.
    pub rate_limit_first_hits: usize,
    /// Artificial per-request delay, for concurrency assertions.
    pub delay: Option<Duration>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordedRequest {
    pub host: String,
    pub path: String,
    /// When the request line was read; lets tests check pause windows.
    pub at: Instant,
}

struct MockState {
    captures: Vec<MockCapture>,
    options: MockOptions,
    remaining_429: AtomicUsize,
    requests: Mutex<Vec<RecordedRequest>>,
    in_flight: AtomicUsize,
    peak_in_flight: AtomicUsize,
    shutdown: AtomicBool,
}

pub struct MockArchive {
    state: Arc<MockState>,
    addr: SocketAddr,
    accept_handle: Option<JoinHandle<()>>,
}

impl MockArchive {
    pub fn start(
        captures: Vec<MockCapture>,
        options: MockOptions,
    ) -> std::io::Result<MockArchive> {
        MockArchive::bind("127.0.0.1:0", captures, options)
    }

    pub fn bind(
        addr: &str,
        captures: Vec<MockCapture>,
        options: MockOptions,
    ) -> std::io::Result<MockArchive> {
        let listener = TcpListener::bind(addr)?;
        let addr = listener.local_addr()?;
        let state = Arc::new(MockState {
            remaining_429: AtomicUsize::new(options.rate_limit_first_hits),
            captures,
            options,
            requests: Mutex::new(Vec::new()),
            in_flight: AtomicUsize::new(0),
            peak_in_flight: AtomicUsize::new(0),
            shutdown: AtomicBool::new(false),
        });
        let accept_state = Arc::clone(&state);
        let accept_handle = std::thread::spawn(move || {
            for stream in listener.incoming() {
                if accept_state.shutdown.load(Ordering::SeqCst) {
                    break;
                }
                let Ok(stream) = stream else { continue };
                let conn_state = Arc::clone(&accept_state);
                std::thread::spawn(move || handle_connection(stream, &conn_state));
            }
        });
        Ok(MockArchive {
            state,
            addr,
            accept_handle: Some(accept_handle),
        })
    }

    pub fn endpoint(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn authority(&self) -> String {
        self.addr.to_string()
    }

    pub fn requests(&self) -> Vec<RecordedRequest> {
        self.state.requests.lock().expect("mock requests").clone()
    }

    pub fn request_count(&self) -> usize {
        self.state.requests.lock().expect("mock requests").len()
    }

    pub fn peak_in_flight(&self) -> usize {
        self.state.peak_in_flight.load(Ordering::SeqCst)
    }
}

impl Drop for MockArchive {
    fn drop(&mut self) {
        self.state.shutdown.store(true, Ordering::SeqCst);
        // wake the accept loop so it observes the flag
        let _ = TcpStream::connect(self.addr);
        if let Some(handle) = self.accept_handle.take() {
            let _ = handle.join();
        }
    }
}

fn handle_connection(stream: TcpStream, state: &MockState) {
    let now = state.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
    state.peak_in_flight.fetch_max(now, Ordering::SeqCst);
    let result = serve_one(stream, state);
    state.in_flight.fetch_sub(1, Ordering::SeqCst);
    if let Err(e) = result {
        log::debug!("mock connection error: {e}");
    }
}

fn serve_one(stream: TcpStream, state: &MockState) -> std::io::Result<()> {
    stream.set_read_timeout(Some(Duration::from_secs(5)))?;
    let mut reader = BufReader::new(stream.try_clone()?);

    let mut request_line = String::new();
    reader.read_line(&mut request_line)?;
    let mut parts = request_line.split_whitespace();
    let method = parts.next().unwrap_or("");
    let path = parts.next().unwrap_or("").to_string();

    let mut host = String::new();
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line)? == 0 || line.trim().is_empty() {
            break;
        }
        if let Some(value) = line.strip_prefix("Host:").or_else(|| line.strip_prefix("host:")) {
            host = value.trim().to_string();
        }
    }

    if method.is_empty() {
        return Ok(()); // shutdown wake-up connection
    }
    state
        .requests
        .lock()
        .expect("mock requests")
        .push(RecordedRequest { host, path: path.clone(), at: Instant::now() });
    if let Some(delay) = state.options.delay {
        std::thread::sleep(delay);
    }

    let mut stream = reader.into_inner();
    if method != "GET" {
        return write_response(&mut stream, 405, "Method Not Allowed", &[], b"");
    }
    if path.starts_with("/cdx/search/cdx") {
        return serve_cdx(&mut stream, state, &path);
    }
    if let Some(rest) = path.strip_prefix("/web/") {
        return serve_web(&mut stream, state, rest);
    }
    write_response(&mut stream, 404, "Not Found", &[], b"")
}

fn serve_cdx(stream: &mut TcpStream, state: &MockState, path: &str) -> std::io::Result<()> {
    let full = format!("http://mock{path}");
    let Ok(parsed) = url::Url::parse(&full) else {
        return write_response(stream, 400, "Bad Request", &[], b"");
    };
    let wanted = parsed
        .query_pairs()
        .find(|(k, _)| k == "url")
        .map(|(_, v)| v.to_string())
        .unwrap_or_default();

    let mut rows: Vec<&MockCapture> = state
        .captures
        .iter()
        .filter(|c| urls_equivalent(&c.url, &wanted))
        .collect();
    rows.sort_by(|a, b| a.timestamp.cmp(&b.timestamp));

    let mut table: Vec<Vec<String>> = vec![vec![
        "urlkey".into(),
        "timestamp".into(),
        "original".into(),
        "mimetype".into(),
        "statuscode".into(),
        "digest".into(),
        "length".into(),
    ]];
    for c in rows {
        table.push(vec![
            c.url.clone(),
            c.timestamp.clone(),
            c.url.clone(),
            c.mime.clone(),
            c.status.to_string(),
            c.digest.clone(),
            c.body.len().to_string(),
        ]);
    }
    let body = serde_json::to_string(&table).expect("rows serialize");
    write_response(
        stream,
        200,
        "OK",
        &[("Content-Type", "application/json")],
        body.as_bytes(),
    )
}

fn serve_web(stream: &mut TcpStream, state: &MockState, rest: &str) -> std::io::Result<()> {
    if state
        .remaining_429
        .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |n| n.checked_sub(1))
        .is_ok()
    {
        return write_response(stream, 429, "Too Many Requests", &[], b"");
    }

    let Some((ts_token, target)) = rest.split_once('/') else {
        return write_response(stream, 404, "Not Found", &[], b"");
    };
    let timestamp = ts_token.strip_suffix("id_").unwrap_or(ts_token);
    let target = percent_decode(target);

    let capture = state
        .captures
        .iter()
        .find(|c| c.timestamp == timestamp && urls_equivalent(&c.url, &target));
    let Some(capture) = capture else {
        return write_response(stream, 404, "Not Found", &[], b"");
    };

    if (300..400).contains(&capture.status) {
        let (Some(rts), Some(rurl)) = (&capture.redirect_timestamp, &capture.redirect_url)
        else {
            return write_response(stream, 500, "Internal Server Error", &[], b"");
        };
        let location = format!("/web/{rts}id_/{rurl}");
        return write_response(
            stream,
            capture.status,
            "Found",
            &[("Location", &location)],
            b"",
        );
    }
    if capture.status == 200 {
        return write_response(
            stream,
            200,
            "OK",
            &[("Content-Type", &capture.mime)],
            capture.body.as_bytes(),
        );
    }
    write_response(stream, capture.status, "Error", &[], capture.body.as_bytes())
}

fn urls_equivalent(a: &str, b: &str) -> bool {
    a == b || a.trim_end_matches('/') == b.trim_end_matches('/')
}

fn percent_decode(s: &str) -> String {
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' && i + 2 < bytes.len() {
            let hex = std::str::from_utf8(&bytes[i + 1..i + 3]).unwrap_or("");
            if let Ok(v) = u8::from_str_radix(hex, 16) {
                out.push(v);
                i += 3;
                continue;
            }
        }
        out.push(bytes[i]);
        i += 1;
    }
    String::from_utf8_lossy(&out).into_owned()
}

fn write_response(
    stream: &mut TcpStream,
    status: u16,
    reason: &str,
    headers: &[(&str, &str)],
    body: &[u8],
) -> std::io::Result<()> {
    let mut head = format!("HTTP/1.1 {status} {reason}\r\n");
    for (k, v) in headers {
        head.push_str(&format!("{k}: {v}\r\n"));
    }
    head.push_str(&format!("Content-Length: {}\r\n", body.len()));
    head.push_str("Connection: close\r\n\r\n");
    stream.write_all(head.as_bytes())?;
    stream.write_all(body)?;
    stream.flush()
}

/// Plain GET helper for tests and smoke checks.
pub fn http_get(url: &str) -> Result<(u16, Vec<u8>), ArchiveError> {
    let parsed = url::Url::parse(url).map_err(|e| ArchiveError::Transport(e.to_string()))?;
    let host = parsed.host_str().unwrap_or("127.0.0.1");
    let port = parsed.port_or_known_default().unwrap_or(80);
    let mut stream = TcpStream::connect((host, port))
        .map_err(|e| ArchiveError::Transport(e.to_string()))?;
    let path = match parsed.query() {
        Some(q) => format!("{}?{q}", parsed.path()),
        None => parsed.path().to_string(),
    };
    let request = format!("GET {path} HTTP/1.1\r\nHost: {host}:{port}\r\nConnection: close\r\n\r\n");
    stream
        .write_all(request.as_bytes())
        .map_err(|e| ArchiveError::Transport(e.to_string()))?;
    let mut raw = Vec::new();
    stream
        .read_to_end(&mut raw)
        .map_err(|e| ArchiveError::Transport(e.to_string()))?;
    let text = String::from_utf8_lossy(&raw);
    let status: u16 = text
        .split_whitespace()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| ArchiveError::BadResponse("no status line".into()))?;
    let body_start = raw
        .windows(4)
        .position(|w| w == b"\r\n\r\n")
        .map(|p| p + 4)
        .unwrap_or(raw.len());
    Ok((status, raw[body_start..].to_vec()))
}
