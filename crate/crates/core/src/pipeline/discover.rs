//! Discover: build the target list from rank CSVs, list homepage captures
//! through the CDX index, pick the per-interval snapshot closest to the
//! midpoint, and (optionally) run the site-level language precheck.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::archive::{run_pool, ArchiveClient, Gate};
use crate::config::Config;
use crate::corpus::{build_target_list, Interval, RankList, SnapshotRef, TargetList};
use crate::extract::{detect_language, parse};

use super::manifest::{write_json, write_manifest, Manifest};
use super::{io_err, PipelineError, Stage, StageContext, StageSummary};

/// How many fallback captures the language precheck tries after the latest
/// homepage snapshot fails to load.
const PRECHECK_FALLBACKS: usize = 3;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SiteDiscovery {
    pub site: String,
    /// The selected homepage snapshot per interval; intervals with no
    /// capture are absent and produce no attempt.
    pub snapshots: BTreeMap<Interval, SnapshotRef>,
    /// Detected site language, when the precheck ran and a capture loaded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
    /// Excluded sites are skipped by every later stage.
    #[serde(default)]
    pub excluded: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiscoverOutput {
    pub intervals: Vec<Interval>,
    pub targets: TargetList,
    pub sites: Vec<SiteDiscovery>,
}

pub fn output_path(config: &Config) -> PathBuf {
    config.work_dir.join("discover.json")
}

pub(super) fn run(ctx: &StageContext) -> Result<StageSummary, PipelineError> {
    let config = &ctx.config;
    ctx.check_endpoint()?;

    let rank_dir = config.rank_lists_dir.as_ref().ok_or_else(|| {
        PipelineError::MissingInput("rank_lists_dir is not configured".into())
    })?;
    let mut rank_files: Vec<(Interval, PathBuf)> = Vec::new();
    let entries = std::fs::read_dir(rank_dir).map_err(|e| io_err(rank_dir.display(), e))?;
    for entry in entries {
        let entry = entry.map_err(|e| io_err(rank_dir.display(), e))?;
        let path = entry.path();
        if path.extension().and_then(|x| x.to_str()) != Some("csv") {
            continue;
        }
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        let interval: Interval = stem.parse().map_err(|_| {
            PipelineError::BadData(format!(
                "rank list {} must be named <interval>.csv, e.g. 2016A.csv",
                path.display()
            ))
        })?;
        rank_files.push((interval, path));
    }
    rank_files.sort();
    if rank_files.is_empty() {
        return Err(PipelineError::MissingInput(format!(
            "no <interval>.csv rank lists in {}",
            rank_dir.display()
        )));
    }

    let mut lists = Vec::with_capacity(rank_files.len());
    for (interval, path) in &rank_files {
        lists.push(RankList::from_csv_path(*interval, path)?);
    }
    let mut targets = build_target_list(&lists, config.rank_cutoff);

    let intervals = match config.interval_range() {
        Some(range) => range,
        None => {
            let first = lists.first().expect("nonempty").interval;
            let last = lists.last().expect("nonempty").interval;
            let mut range = Vec::new();
            let mut cur = first;
            while cur <= last {
                range.push(cur);
                cur = cur.next();
            }
            range
        }
    };

    let gate = Arc::new(Gate::from_secs(
        config.backoff_initial_secs,
        config.backoff_cap_secs,
    ));
    let client = ArchiveClient::new(&config.archive_endpoint, gate, config.fetch_retries)?;

    let sites: Vec<String> = targets.domains().map(str::to_string).collect();
    let discoveries: Vec<SiteDiscovery> = run_pool(sites, config.workers, |site| {
        discover_site(&client, &site, &intervals, config)
    });

    for discovery in &discoveries {
        if let (Some(lang), Some(record)) =
            (&discovery.language, targets.sites.get_mut(&discovery.site))
        {
            record.language = Some(lang.clone());
        }
    }

    let excluded = discoveries.iter().filter(|d| d.excluded).count() as u64;
    let selected: u64 = discoveries.iter().map(|d| d.snapshots.len() as u64).sum();

    let output = DiscoverOutput {
        intervals,
        targets,
        sites: discoveries,
    };
    let out_path = output_path(config);
    write_json(&out_path, &output)?;

    let mut manifest = Manifest::new(Stage::Discover, config);
    for (_, path) in &rank_files {
        manifest.record_input(config, path)?;
    }
    manifest.record_output(config, &out_path)?;
    manifest.set_count("sites", output.targets.len() as u64);
    manifest.set_count("rank_lists", rank_files.len() as u64);
    manifest.set_count("intervals", output.intervals.len() as u64);
    manifest.set_count("selected_snapshots", selected);
    manifest.set_count("excluded_sites", excluded);
    write_manifest(&config.work_dir, &manifest)?;

    let mut summary = StageSummary::new(Stage::Discover);
    summary.counts = manifest.counts.clone();
    Ok(summary)
}

fn discover_site(
    client: &ArchiveClient,
    site: &str,
    intervals: &[Interval],
    config: &Config,
) -> SiteDiscovery {
    let homepage_url = format!("http://{site}/");
    let all = match client.list_snapshots(&homepage_url) {
        Ok(snaps) => snaps,
        Err(e) => {
            log::warn!("{site}: cdx listing failed, site skipped: {e}");
            Vec::new()
        }
    };

    let mut snapshots = BTreeMap::new();
    for &interval in intervals {
        if let Some(snap) = crate::archive::select_snapshot(&all, interval) {
            snapshots.insert(interval, snap);
        }
    }

    let language = if config.site_language_check && !all.is_empty() {
        precheck_language(client, site, &all, config.seed)
    } else {
        None
    };
    let excluded = language.as_deref().is_some_and(|code| code != "en");
    if excluded {
        log::info!("{site}: precheck language {:?}, excluded", language.as_deref());
    }

    SiteDiscovery {
        site: site.to_string(),
        snapshots,
        language,
        excluded,
    }
}

/// Detect the site's language from its most recent homepage capture,
/// falling back to up to three random other captures when it fails to
/// load. `None` when nothing loaded (the site stays in).
fn precheck_language(
    client: &ArchiveClient,
    site: &str,
    snapshots: &[SnapshotRef],
    seed: u64,
) -> Option<String> {
    let latest = snapshots.len() - 1; // list is timestamp-sorted
    let mut order = vec![latest];

    let mut rest: Vec<usize> = (0..snapshots.len() - 1).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ site_salt(site));
    rest.shuffle(&mut rng);
    order.extend(rest.into_iter().take(PRECHECK_FALLBACKS));

    for idx in order {
        match client.fetch_capture(&snapshots[idx]) {
            Ok(page) => {
                let root = parse(&page.body_text());
                let text = crate::extract::html::collapse_ws(&root.text_content());
                let (code, _) = detect_language(&text);
                return Some(code.to_string());
            }
            Err(e) => log::debug!("{site}: precheck capture {idx} failed: {e}"),
        }
    }
    None
}

/// Stable per-site salt so the fallback sampling never depends on process
/// hash seeds or site iteration order.
fn site_salt(site: &str) -> u64 {
    let digest = super::manifest::digest_bytes(site.as_bytes());
    u64::from_str_radix(&digest[..16], 16).expect("hex digest")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::archive::{MockArchive, MockCapture, MockOptions};

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

    fn context(base: &std::path::Path, endpoint: &str) -> StageContext {
        let mut config = Config::default();
        config.archive_endpoint = endpoint.trim_end_matches('/').to_string();
        config.work_dir = base.join("work");
        config.corpus_dir = base.join("corpus");
        config.reports_dir = base.join("reports");
        config.rank_lists_dir = Some(base.join("ranks"));
        config.workers = 2;
        StageContext::new(config)
    }

    const ENGLISH: &str = "<html><body><p>We collect information about the pages you \
        visit and the services you use so that we can improve this website over \
        time for every visitor.</p></body></html>";
    const GERMAN: &str = "<html><body><p>Wir sammeln Informationen über die Seiten, \
        die Sie besuchen, und über die Dienste, die Sie verwenden, damit wir diese \
        Webseite für alle Besucher verbessern können.</p></body></html>";

    #[test]
    fn discovers_sites_and_writes_manifest() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir_all(dir.path().join("ranks")).unwrap();
        std::fs::write(
            dir.path().join("ranks/2016A.csv"),
            "1,alpha.com\n2,beta.com\n",
        )
        .unwrap();
        std::fs::write(dir.path().join("ranks/2016B.csv"), "1,alpha.com\n").unwrap();

        let mock = MockArchive::start(
            vec![
                capture("http://alpha.com/", "20160320000000", ENGLISH),
                capture("http://alpha.com/", "20161001000000", ENGLISH),
                capture("http://beta.com/", "20160102000000", GERMAN),
            ],
            MockOptions::default(),
        )
        .unwrap();
        let ctx = context(dir.path(), &mock.endpoint());

        let summary = run(&ctx).unwrap();
        assert_eq!(summary.counts["sites"], 2);
        assert_eq!(summary.counts["selected_snapshots"], 3);
        assert_eq!(summary.counts["excluded_sites"], 1);

        let output: DiscoverOutput =
            super::super::manifest::read_json(&output_path(&ctx.config)).unwrap();
        let names: Vec<String> = output.intervals.iter().map(|i| i.to_string()).collect();
        assert_eq!(names, vec!["2016A", "2016B"]);

        let alpha = &output.sites[0];
        assert_eq!(alpha.site, "alpha.com");
        assert_eq!(alpha.snapshots.len(), 2);
        assert_eq!(alpha.language.as_deref(), Some("en"));
        assert!(!alpha.excluded);

        let beta = &output.sites[1];
        assert!(beta.excluded);
        assert_eq!(beta.language.as_deref(), Some("de"));

        // ranks carried into the serialized target list
        assert_eq!(
            output.targets.sites["beta.com"].ranks[&"2016A".parse().unwrap()],
            2
        );
        assert_eq!(output.targets.sites["beta.com"].language.as_deref(), Some("de"));
    }

    #[test]
    fn rerun_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir_all(dir.path().join("ranks")).unwrap();
        std::fs::write(dir.path().join("ranks/2016A.csv"), "1,alpha.com\n").unwrap();
        let mock = MockArchive::start(
            vec![capture("http://alpha.com/", "20160320000000", ENGLISH)],
            MockOptions::default(),
        )
        .unwrap();
        let ctx = context(dir.path(), &mock.endpoint());

        run(&ctx).unwrap();
        let first = std::fs::read(output_path(&ctx.config)).unwrap();
        run(&ctx).unwrap();
        let second = std::fs::read(output_path(&ctx.config)).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn missing_rank_dir_is_a_descriptive_error() {
        let dir = tempfile::tempdir().unwrap();
        let mut ctx = context(dir.path(), "http://127.0.0.1:1");
        ctx.config.rank_lists_dir = None;
        let err = run(&ctx).unwrap_err();
        assert!(err.to_string().contains("rank_lists_dir"));
    }

    #[test]
    fn live_endpoint_refused_without_flag() {
        let dir = tempfile::tempdir().unwrap();
        let mut ctx = context(dir.path(), "http://127.0.0.1:1");
        ctx.config.archive_endpoint = "https://archive.example.org".into();
        assert!(matches!(
            run(&ctx),
            Err(PipelineError::LiveDisabled(_))
        ));
    }
}
