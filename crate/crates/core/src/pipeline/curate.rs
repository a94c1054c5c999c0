//! Curate: rebuild policy documents from the classified metadata, run the
//! parked / cross-origin-redirect / duplicate filters, and persist the kept
//! set plus removal accounting for the analysis stage.

use std::collections::{BTreeMap, HashSet};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::classifier::title_of;
use crate::config::Config;
use crate::corpus::{
    CorpusStore, Interval, MetadataRecord, PolicyDocument, SnapshotRef,
};
use crate::curation::{curate, failure_stats, parse_parking_list, FailureStat, StageCount};

use super::manifest::{write_json, write_manifest, Manifest};
use super::{io_err, PipelineError, Stage, StageContext, StageSummary};

pub fn output_path(config: &Config) -> PathBuf {
    config.work_dir.join("curation.json")
}

/// Identifies one kept document; the markdown lives in the corpus store.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KeptKey {
    pub site: String,
    pub interval: Interval,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurationOutput {
    pub stages: Vec<StageCount>,
    pub failures: Vec<FailureStat>,
    pub kept: Vec<KeptKey>,
}

pub(super) fn run(ctx: &StageContext) -> Result<StageSummary, PipelineError> {
    let config = &ctx.config;
    let store = CorpusStore::new(&config.corpus_dir);
    let records = store.read_metadata()?;

    let mut manifest = Manifest::new(Stage::Curate, config);
    manifest.record_input(config, &store.metadata_path())?;

    let parking = match &config.parking_list {
        None => HashSet::new(),
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| io_err(path.display(), e))?;
            manifest.record_input(config, path)?;
            parse_parking_list(&text)
        }
    };

    let final_urls = final_urls_of(&records);
    let documents = documents_from_metadata(config, &records)?;
    for doc in &documents {
        manifest.record_input(config, &store.document_path(&doc.site, doc.interval))?;
    }
    let input_count = documents.len();

    let (kept_docs, stages) = curate(documents, &parking, &final_urls);
    let failures = failure_stats(&records);

    let output = CurationOutput {
        stages: stages.clone(),
        failures,
        kept: kept_docs
            .iter()
            .map(|d| KeptKey { site: d.site.clone(), interval: d.interval })
            .collect(),
    };
    let out_file = output_path(config);
    write_json(&out_file, &output)?;

    manifest.record_output(config, &out_file)?;
    manifest.set_count("input_policies", input_count as u64);
    manifest.set_count("kept", kept_docs.len() as u64);
    for stage in &stages {
        manifest.set_count(&format!("removed_{}", stage.stage), stage.removed_count as u64);
    }
    write_manifest(&config.work_dir, &manifest)?;

    let mut summary = StageSummary::new(Stage::Curate);
    summary.counts = manifest.counts.clone();
    Ok(summary)
}

/// Homepage landing URLs for every attempt that got that far, indexed by
/// `(site, interval)`; the cross-origin filter consumes this map.
pub(super) fn final_urls_of(
    records: &[MetadataRecord],
) -> BTreeMap<(String, Interval), String> {
    let mut map = BTreeMap::new();
    for rec in records {
        if let Some(url) = &rec.homepage_final_url {
            map.insert((rec.site.clone(), rec.interval), url.clone());
        }
    }
    map
}

/// Rebuild in-memory policy documents for every confirmed success, pulling
/// markdown back from the corpus store.
pub(super) fn documents_from_metadata(
    config: &Config,
    records: &[MetadataRecord],
) -> Result<Vec<PolicyDocument>, PipelineError> {
    let store = CorpusStore::new(&config.corpus_dir);
    let mut docs = Vec::new();
    for rec in records {
        if !rec.outcome.is_success() {
            continue;
        }
        let markdown = store.read_document(&rec.site, rec.interval)?;
        let policy_url = rec.policy_url.clone().ok_or_else(|| {
            PipelineError::BadData(format!(
                "{} {}: success record without policy_url",
                rec.site, rec.interval
            ))
        })?;
        let policy_timestamp = rec.policy_timestamp.clone().ok_or_else(|| {
            PipelineError::BadData(format!(
                "{} {}: success record without policy_timestamp",
                rec.site, rec.interval
            ))
        })?;
        let doc = PolicyDocument {
            site: rec.site.clone(),
            interval: rec.interval,
            homepage_snapshot: SnapshotRef {
                original_url: rec
                    .homepage_final_url
                    .clone()
                    .unwrap_or_else(|| format!("http://{}/", rec.site)),
                timestamp: rec
                    .homepage_timestamp
                    .clone()
                    .unwrap_or_else(|| policy_timestamp.clone()),
                status: 200,
                mime: "text/html".into(),
                digest: String::new(),
            },
            policy_url,
            policy_timestamp,
            title: title_of(&markdown),
            markdown,
            link_text: rec.link_text.clone().unwrap_or_default(),
            language: rec.language.clone().unwrap_or_else(|| "en".into()),
            classifier_score: rec.classifier_score,
        };
        doc.validate()?;
        docs.push(doc);
    }
    Ok(docs)
}
