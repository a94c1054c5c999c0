//! Fetch: for every selected homepage snapshot, download the capture, find
//! the policy link, and download the policy capture from the same interval.
//! Every attempt ends as exactly one metadata record; raw bodies land under
//! `work/raw/` for the extract stage.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::archive::{run_pool, ArchiveClient, ArchiveError, Gate};
use crate::config::Config;
use crate::corpus::{
    write_metadata_log, FailureCause, Interval, MetadataRecord, Outcome, SnapshotRef,
};
use crate::extract::{
    find_policy_links, is_blank, is_pdf_link, parse, to_markdown, CandidateLink, PatternTable,
};

use super::discover::{output_path as discover_path, DiscoverOutput};
use super::manifest::{read_json, write_manifest, Manifest};
use super::{io_err, PipelineError, Stage, StageContext, StageSummary};

pub fn log_path(config: &Config) -> PathBuf {
    config.work_dir.join("fetch_log.jsonl")
}

pub fn raw_dir(config: &Config) -> PathBuf {
    config.work_dir.join("raw")
}

pub fn raw_homepage_path(config: &Config, site: &str, interval: Interval) -> PathBuf {
    raw_dir(config).join(site).join(interval.to_string()).join("homepage.html")
}

pub fn raw_policy_path(config: &Config, site: &str, interval: Interval) -> PathBuf {
    raw_dir(config).join(site).join(interval.to_string()).join("policy.html")
}

struct FetchTask {
    site: String,
    interval: Interval,
    snapshot: SnapshotRef,
}

pub(super) fn run(ctx: &StageContext) -> Result<StageSummary, PipelineError> {
    let config = &ctx.config;
    ctx.check_endpoint()?;

    let discover_file = discover_path(config);
    let discovered: DiscoverOutput = read_json(&discover_file)?;

    let table = load_pattern_table(config)?;

    let mut tasks = Vec::new();
    for site in &discovered.sites {
        if site.excluded {
            continue;
        }
        for (&interval, snapshot) in &site.snapshots {
            tasks.push(FetchTask {
                site: site.site.clone(),
                interval,
                snapshot: snapshot.clone(),
            });
        }
    }

    // fresh raw tree so leftovers from earlier runs cannot leak into manifests
    let raw = raw_dir(config);
    if raw.exists() {
        std::fs::remove_dir_all(&raw).map_err(|e| io_err(raw.display(), e))?;
    }

    let gate = Arc::new(Gate::from_secs(
        config.backoff_initial_secs,
        config.backoff_cap_secs,
    ));
    let client = ArchiveClient::new(&config.archive_endpoint, gate, config.fetch_retries)?;

    let records: Vec<MetadataRecord> = run_pool(tasks, config.workers, |task| {
        fetch_one(&client, &table, config, &task)
    });

    let log = log_path(config);
    if let Some(parent) = log.parent() {
        std::fs::create_dir_all(parent).map_err(|e| io_err(parent.display(), e))?;
    }
    write_metadata_log(&log, &records)?;

    let mut manifest = Manifest::new(Stage::Fetch, config);
    manifest.record_input(config, &discover_file)?;
    if let Some(patterns) = &config.link_patterns {
        manifest.record_input(config, patterns)?;
    }
    manifest.record_output(config, &log)?;
    for record in &records {
        if record.homepage_timestamp.is_some() {
            let path = raw_homepage_path(config, &record.site, record.interval);
            manifest.record_output(config, &path)?;
        }
        if record.outcome.is_success() {
            let path = raw_policy_path(config, &record.site, record.interval);
            manifest.record_output(config, &path)?;
        }
    }
    count_outcomes(&mut manifest, &records);
    write_manifest(&config.work_dir, &manifest)?;

    let mut summary = StageSummary::new(Stage::Fetch);
    summary.counts = manifest.counts.clone();
    Ok(summary)
}

pub(super) fn load_pattern_table(config: &Config) -> Result<PatternTable, PipelineError> {
    match &config.link_patterns {
        None => Ok(PatternTable::default()),
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| io_err(path.display(), e))?;
            Ok(PatternTable::parse(&text)?)
        }
    }
}

fn count_outcomes(manifest: &mut Manifest, records: &[MetadataRecord]) {
    manifest.set_count("attempts", records.len() as u64);
    let fetched = records.iter().filter(|r| r.outcome.is_success()).count();
    manifest.set_count("policies_fetched", fetched as u64);
    let pdf = records
        .iter()
        .filter(|r| r.outcome == Outcome::PdfCandidate)
        .count();
    manifest.set_count("pdf_candidates", pdf as u64);
    manifest.set_count("failures", (records.len() - fetched - pdf) as u64);
}

fn fetch_one(
    client: &ArchiveClient,
    table: &PatternTable,
    config: &Config,
    task: &FetchTask,
) -> MetadataRecord {
    let mut rec = MetadataRecord::attempt(&task.site, task.interval, Outcome::Success);

    let homepage = match client.fetch_snapshot(&task.snapshot, task.interval) {
        Ok(page) => page,
        Err(e) => {
            let (cause, detail) = map_fetch_error(e, "homepage");
            rec.outcome = Outcome::Failure(cause);
            rec.detail = Some(detail);
            return rec;
        }
    };
    rec.homepage_timestamp = Some(homepage.final_timestamp.clone());
    rec.homepage_final_url = Some(homepage.final_url.clone());

    let homepage_path = raw_homepage_path(config, &task.site, task.interval);
    if let Err(e) = write_raw(&homepage_path, &homepage.body) {
        rec.outcome = Outcome::Failure(FailureCause::FetchError);
        rec.detail = Some(format!("writing homepage body: {e}"));
        return rec;
    }

    let root = parse(&homepage.body_text());
    let markdown = to_markdown(&root);
    if is_blank(&markdown, config.blank_min_chars) {
        rec.outcome = Outcome::Failure(FailureCause::BlankHomepage);
        return rec;
    }

    let text = crate::extract::html::collapse_ws(&root.text_content());
    let (code, _) = crate::extract::detect_language(&text);
    if code != "en" {
        rec.language = Some(code);
        rec.outcome = Outcome::Failure(FailureCause::NonEnglishHomepage);
        return rec;
    }

    let links = find_policy_links(&root, &homepage.final_url, table);
    let Some(link) = choose_candidate(&links, table) else {
        rec.outcome = Outcome::Failure(FailureCause::NoPolicyLinkFound);
        return rec;
    };
    rec.link_text = Some(link.link_text.clone());
    rec.link_pattern = Some(link.pattern.clone());
    rec.policy_url = Some(link.href.clone());

    if is_pdf_link(&link.href) {
        rec.outcome = Outcome::PdfCandidate;
        return rec;
    }

    let snapshots = match client.list_snapshots(&link.href) {
        Ok(snaps) => snaps,
        Err(e) => {
            rec.outcome = Outcome::Failure(FailureCause::FetchError);
            rec.detail = Some(format!("policy cdx query: {e}"));
            return rec;
        }
    };
    let Some(policy_snap) = crate::archive::select_snapshot(&snapshots, task.interval) else {
        rec.outcome = Outcome::Failure(FailureCause::PolicyNotArchivedInInterval);
        return rec;
    };

    let policy = match client.fetch_snapshot(&policy_snap, task.interval) {
        Ok(page) => page,
        Err(e) => {
            let (cause, detail) = map_fetch_error(e, "policy");
            rec.outcome = Outcome::Failure(cause);
            rec.detail = Some(detail);
            return rec;
        }
    };

    let policy_path = raw_policy_path(config, &task.site, task.interval);
    if let Err(e) = write_raw(&policy_path, &policy.body) {
        rec.outcome = Outcome::Failure(FailureCause::FetchError);
        rec.detail = Some(format!("writing policy body: {e}"));
        return rec;
    }

    // the landed capture is the policy's identity after archive redirects
    rec.policy_url = Some(policy.final_url);
    rec.policy_timestamp = Some(policy.final_timestamp);
    rec.outcome = Outcome::Success;
    rec
}

/// Patterns are listed most-specific first, so candidates compete first on
/// the pattern's table position and then on document order.
fn choose_candidate<'a>(
    links: &'a [CandidateLink],
    table: &PatternTable,
) -> Option<&'a CandidateLink> {
    for id in table.rule_ids() {
        if let Some(link) = links.iter().find(|l| l.pattern == id) {
            return Some(link);
        }
    }
    None
}

fn map_fetch_error(e: ArchiveError, page: &str) -> (FailureCause, String) {
    match e {
        ArchiveError::OutOfIntervalRedirect { timestamp, .. } => (
            FailureCause::OutOfIntervalRedirect,
            format!("{page} redirected to capture {timestamp}"),
        ),
        ArchiveError::NotArchived => {
            (FailureCause::FetchError, format!("{page} capture returned 404"))
        }
        other => (FailureCause::FetchError, format!("{page}: {other}")),
    }
}

fn write_raw(path: &Path, body: &[u8]) -> Result<(), PipelineError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| io_err(parent.display(), e))?;
    }
    std::fs::write(path, body).map_err(|e| io_err(path.display(), e))
}
