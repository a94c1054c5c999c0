//! Extract: turn fetched policy HTML into markdown documents under the
//! corpus root. Fetch failures pass through unchanged; a policy whose main
//! content is not English becomes a `NonEnglishPolicy` failure here.

use std::path::PathBuf;

use crate::config::Config;
use crate::corpus::{
    read_metadata_log, write_metadata_log, CorpusStore, FailureCause, Outcome,
};
use crate::extract::{detect_language, extract_main_content, html, parse, to_markdown};

use super::fetch::{log_path as fetch_log_path, raw_policy_path};
use super::manifest::{write_manifest, Manifest};
use super::{io_err, PipelineError, Stage, StageContext, StageSummary};

pub fn log_path(config: &Config) -> PathBuf {
    config.work_dir.join("extract_log.jsonl")
}

pub(super) fn run(ctx: &StageContext) -> Result<StageSummary, PipelineError> {
    let config = &ctx.config;
    let fetch_log = fetch_log_path(config);
    let records = read_metadata_log(&fetch_log)?;

    let store = CorpusStore::new(&config.corpus_dir);
    clean_documents(&store)?;

    let mut manifest = Manifest::new(Stage::Extract, config);
    manifest.record_input(config, &fetch_log)?;

    let mut out = Vec::with_capacity(records.len());
    let mut extracted = 0u64;
    let mut non_english = 0u64;
    for mut rec in records {
        if !rec.outcome.is_success() {
            out.push(rec);
            continue;
        }
        let raw_path = raw_policy_path(config, &rec.site, rec.interval);
        manifest.record_input(config, &raw_path)?;
        let body =
            std::fs::read_to_string(&raw_path).map_err(|e| io_err(raw_path.display(), e))?;

        let root = parse(&body);
        let main = extract_main_content(&root);
        let text = html::collapse_ws(&main.element.text_content());
        let (code, _) = detect_language(&text);
        if code != "en" {
            rec.language = Some(code);
            rec.outcome = Outcome::Failure(FailureCause::NonEnglishPolicy);
            non_english += 1;
            out.push(rec);
            continue;
        }

        let markdown = to_markdown(main.element);
        store.write_document(&rec.site, rec.interval, &markdown)?;
        manifest.record_output(config, &store.document_path(&rec.site, rec.interval))?;
        rec.language = Some(code);
        if main.low_content {
            rec.detail = Some("low-content extraction".into());
        }
        extracted += 1;
        out.push(rec);
    }

    let log = log_path(config);
    write_metadata_log(&log, &out)?;
    manifest.record_output(config, &log)?;
    manifest.set_count("records", out.len() as u64);
    manifest.set_count("documents", extracted);
    manifest.set_count("non_english_policies", non_english);
    write_manifest(&config.work_dir, &manifest)?;

    let mut summary = StageSummary::new(Stage::Extract);
    summary.counts = manifest.counts.clone();
    Ok(summary)
}

/// Remove previously extracted document trees but never the metadata log;
/// classify owns that file.
fn clean_documents(store: &CorpusStore) -> Result<(), PipelineError> {
    let root = store.root();
    if !root.exists() {
        return Ok(());
    }
    let entries = std::fs::read_dir(root).map_err(|e| io_err(root.display(), e))?;
    for entry in entries {
        let entry = entry.map_err(|e| io_err(root.display(), e))?;
        let path = entry.path();
        if path.is_dir() {
            std::fs::remove_dir_all(&path).map_err(|e| io_err(path.display(), e))?;
        }
    }
    Ok(())
}
