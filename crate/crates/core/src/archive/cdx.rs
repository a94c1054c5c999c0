//! CDX API query construction, response parsing, and midpoint-closest
//! snapshot selection.

use url::Url;

use crate::corpus::{parse_timestamp14, Interval, SnapshotRef};

use super::ArchiveError;

/// `GET <endpoint>/cdx/search/cdx?url=<url>&output=json`
pub fn cdx_query_url(endpoint: &Url, page_url: &str) -> Result<Url, ArchiveError> {
    let mut out = endpoint
        .join("/cdx/search/cdx")
        .map_err(|e| ArchiveError::BadResponse(e.to_string()))?;
    out.query_pairs_mut()
        .append_pair("url", page_url)
        .append_pair("output", "json")
        .finish();
    Ok(out)
}

/// Parse the JSON row-array response: a header row followed by
/// `[urlkey, timestamp, original, mimetype, statuscode, digest, length]`
/// rows. Malformed rows are skipped with a warning; output is sorted by
/// timestamp.
pub fn parse_cdx_response(body: &str) -> Result<Vec<SnapshotRef>, ArchiveError> {
    let rows: Vec<Vec<String>> = serde_json::from_str(body)
        .map_err(|e| ArchiveError::BadResponse(format!("cdx json: {e}")))?;
    let mut out = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if i == 0 && row.first().map(String::as_str) == Some("urlkey") {
            continue;
        }
        match parse_row(row) {
            Ok(snap) => out.push(snap),
            Err(reason) => log::warn!("skipping cdx row {i}: {reason}"),
        }
    }
    out.sort_by(|a, b| {
        a.timestamp
            .cmp(&b.timestamp)
            .then_with(|| a.original_url.cmp(&b.original_url))
    });
    Ok(out)
}

fn parse_row(row: &[String]) -> Result<SnapshotRef, String> {
    if row.len() < 7 {
        return Err(format!("{} fields, need 7", row.len()));
    }
    parse_timestamp14(&row[1]).map_err(|_| format!("bad timestamp {:?}", row[1]))?;
    let status: u16 = row[4]
        .parse()
        .map_err(|_| format!("bad status {:?}", row[4]))?;
    if !(100..=599).contains(&status) {
        return Err(format!("status {status} out of range"));
    }
    Ok(SnapshotRef {
        original_url: row[2].clone(),
        timestamp: row[1].clone(),
        status,
        mime: row[3].clone(),
        digest: row[5].clone(),
    })
}

/// The in-interval snapshot closest to the interval midpoint; equidistant
/// candidates resolve to the earlier timestamp.
pub fn select_snapshot(snapshots: &[SnapshotRef], interval: Interval) -> Option<SnapshotRef> {
    let midpoint = interval.midpoint_datetime();
    snapshots
        .iter()
        .filter_map(|snap| {
            let ts = parse_timestamp14(&snap.timestamp).ok()?;
            if !interval.contains(ts) {
                return None;
            }
            let distance = (ts - midpoint).num_seconds().abs();
            Some((distance, snap))
        })
        .min_by(|a, b| {
            a.0.cmp(&b.0)
                .then_with(|| a.1.timestamp.cmp(&b.1.timestamp))
        })
        .map(|(_, snap)| snap.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snap(ts: &str) -> SnapshotRef {
        SnapshotRef {
            original_url: "http://example.com/".into(),
            timestamp: ts.into(),
            status: 200,
            mime: "text/html".into(),
            digest: "D".into(),
        }
    }

    #[test]
    fn parses_and_sorts_rows() {
        let body = r#"[
            ["urlkey","timestamp","original","mimetype","statuscode","digest","length"],
            ["com,example)/","20150320000000","http://example.com/","text/html","200","B","100"],
            ["com,example)/","20150101000000","http://example.com/","text/html","200","A","100"],
            ["com,example)/","19961115083712","http://example.com/","text/html","200","C","90"]
        ]"#;
        let snaps = parse_cdx_response(body).unwrap();
        assert_eq!(snaps.len(), 3);
        let stamps: Vec<&str> = snaps.iter().map(|s| s.timestamp.as_str()).collect();
        assert_eq!(stamps, vec!["19961115083712", "20150101000000", "20150320000000"]);
    }

    #[test]
    fn malformed_rows_are_skipped() {
        let body = r#"[
            ["urlkey","timestamp","original","mimetype","statuscode","digest","length"],
            ["k","20150320000000","http://e.com/","text/html","200","B","100"],
            ["k","not-a-timestamp","http://e.com/","text/html","200","B","100"],
            ["k","20150321000000","http://e.com/","text/html","-","B","100"],
            ["k","20150322000000"],
            ["k","20150323000000","http://e.com/","text/html","999","B","100"]
        ]"#;
        let snaps = parse_cdx_response(body).unwrap();
        assert_eq!(snaps.len(), 1);
        assert_eq!(snaps[0].timestamp, "20150320000000");
    }

    #[test]
    fn empty_and_header_only_responses() {
        assert!(parse_cdx_response("[]").unwrap().is_empty());
        let header_only = r#"[["urlkey","timestamp","original","mimetype","statuscode","digest","length"]]"#;
        assert!(parse_cdx_response(header_only).unwrap().is_empty());
        assert!(parse_cdx_response("{not json rows").is_err());
    }

    #[test]
    fn query_url_shape() {
        let endpoint = Url::parse("http://127.0.0.1:9000").unwrap();
        let url = cdx_query_url(&endpoint, "http://example.com/").unwrap();
        assert_eq!(url.path(), "/cdx/search/cdx");
        let q = url.query().unwrap();
        assert!(q.contains("output=json"));
        assert!(q.contains("url=http%3A%2F%2Fexample.com%2F"));
    }

    #[test]
    fn closest_to_midpoint_wins() {
        let snaps = vec![snap("20150101000000"), snap("20150320000000")];
        let iv: Interval = "2015A".parse().unwrap();
        assert_eq!(
            select_snapshot(&snaps, iv).unwrap().timestamp,
            "20150320000000"
        );
    }

    #[test]
    fn empty_interval_yields_none() {
        let snaps = vec![snap("20140601000000"), snap("20141201000000")];
        let iv: Interval = "2015A".parse().unwrap();
        assert!(select_snapshot(&snaps, iv).is_none());
        assert!(select_snapshot(&[], iv).is_none());
    }

    #[test]
    fn equidistant_prefers_earlier() {
        // midpoint is March 31 00:00:00; both are exactly one day away
        let snaps = vec![snap("20150401000000"), snap("20150330000000")];
        let iv: Interval = "2015A".parse().unwrap();
        assert_eq!(
            select_snapshot(&snaps, iv).unwrap().timestamp,
            "20150330000000"
        );
    }

    #[test]
    fn stable_under_adding_worse_candidates() {
        let iv: Interval = "2015A".parse().unwrap();
        let mut snaps = vec![snap("20150320000000")];
        let best = select_snapshot(&snaps, iv).unwrap();
        snaps.push(snap("20150101000000"));
        snaps.push(snap("20150615000000"));
        snaps.push(snap("20140101000000"));
        assert_eq!(select_snapshot(&snaps, iv).unwrap(), best);
    }

    #[test]
    fn out_of_interval_timestamps_filtered_before_distance() {
        // July 1 is nearer to the A midpoint than January 2 but in 2015B
        let snaps = vec![snap("20150701000000"), snap("20150102000000")];
        let iv: Interval = "2015A".parse().unwrap();
        assert_eq!(
            select_snapshot(&snaps, iv).unwrap().timestamp,
            "20150102000000"
        );
    }
}
