//! Report: verify the whole manifest chain, then render the analysis and
//! curation outputs as CSV tables under the reports directory.

use std::path::{Path, PathBuf};

use crate::config::Config;

use super::analyze::{output_path as analysis_path, AnalysisOutput};
use super::curate::{output_path as curation_path, CurationOutput};
use super::manifest::{read_json, verify_chain, write_manifest, Manifest};
use super::{io_err, PipelineError, Stage, StageContext, StageSummary};

pub fn report_file(config: &Config, name: &str) -> PathBuf {
    config.reports_dir.join(name)
}

pub(super) fn run(ctx: &StageContext) -> Result<StageSummary, PipelineError> {
    let config = &ctx.config;
    verify_chain(config, &Stage::ALL)?;

    let analysis: AnalysisOutput = read_json(&analysis_path(config))?;
    let curation: CurationOutput = read_json(&curation_path(config))?;

    let reports = &config.reports_dir;
    if reports.exists() {
        std::fs::remove_dir_all(reports).map_err(|e| io_err(reports.display(), e))?;
    }
    std::fs::create_dir_all(reports).map_err(|e| io_err(reports.display(), e))?;

    let mut manifest = Manifest::new(Stage::Report, config);
    manifest.record_input(config, &analysis_path(config))?;
    manifest.record_input(config, &curation_path(config))?;

    let mut written = 0u64;
    let mut emit = |name: &str, rows: Vec<Vec<String>>| -> Result<(), PipelineError> {
        let path = report_file(config, name);
        write_csv(&path, rows)?;
        manifest.record_output(config, &path)?;
        written += 1;
        Ok(())
    };

    let mut lengths = vec![header(&["interval", "median_word_count", "p5", "p95"])];
    for (interval, row) in &analysis.lengths {
        lengths.push(vec![
            interval.to_string(),
            format!("{:.1}", row.median_word_count),
            format!("{:.1}", row.p5),
            format!("{:.1}", row.p95),
        ]);
    }
    emit("lengths.csv", lengths)?;

    let mut readability = vec![header(&["interval", "median_fkgl"])];
    for (interval, grade) in &analysis.readability {
        readability.push(vec![interval.to_string(), format!("{grade:.2}")]);
    }
    emit("readability.csv", readability)?;

    let mut updates = vec![header(&["interval", "pct_updated"])];
    for (interval, row) in &analysis.updates {
        updates.push(vec![interval.to_string(), format!("{:.1}", row.pct_updated)]);
    }
    emit("updates.csv", updates)?;

    let mut changepoints = vec![header(&["interval", "n", "changepoint_count"])];
    for row in &analysis.changepoints {
        changepoints.push(vec![
            row.interval.to_string(),
            row.n.to_string(),
            row.changepoint_count.to_string(),
        ]);
    }
    emit("changepoints.csv", changepoints)?;

    let mut matchers = vec![header(&["matcher", "interval", "fraction"])];
    for (name, series) in &analysis.matchers {
        for (interval, fraction) in series {
            matchers.push(vec![
                name.clone(),
                interval.to_string(),
                format!("{fraction:.4}"),
            ]);
        }
    }
    emit("matchers.csv", matchers)?;

    let mut outbound = vec![header(&["url", "distinct_linking_sites"])];
    for row in &analysis.outbound.ranking {
        outbound.push(vec![row.url.clone(), row.distinct_linking_sites.to_string()]);
    }
    emit("outbound_links.csv", outbound)?;

    let mut curation_rows = vec![header(&["stage", "removed_count", "kept_count"])];
    for stage in &curation.stages {
        curation_rows.push(vec![
            stage.stage.clone(),
            stage.removed_count.to_string(),
            stage.kept_count.to_string(),
        ]);
    }
    emit("curation.csv", curation_rows)?;

    let mut failures = vec![header(&["cause", "count", "percent"])];
    for stat in &curation.failures {
        failures.push(vec![
            stat.cause.to_string(),
            stat.count.to_string(),
            format!("{:.1}", stat.percent),
        ]);
    }
    emit("failures.csv", failures)?;

    let mut buckets = vec![header(&["bucket", "homepage_snapshots", "policies", "percent"])];
    for row in &analysis.buckets {
        buckets.push(vec![
            row.bucket.clone(),
            row.homepage_snapshots.to_string(),
            row.policies.to_string(),
            format!("{:.1}", row.percent),
        ]);
    }
    emit("rank_buckets.csv", buckets)?;

    let mut trends = vec![header(&["kind", "scorer", "rank", "term", "score"])];
    for row in &analysis.trends {
        trends.push(vec![
            row.kind.clone(),
            row.scorer.clone(),
            row.rank.to_string(),
            row.term.clone(),
            format!("{:.4}", row.score),
        ]);
    }
    emit("trends.csv", trends)?;

    let mut gdpr = vec![header(&["group", "updates", "median_added_lines", "mean_added_lines"])];
    for (label, group) in [
        ("mentioning", &analysis.phrase_updates.mentioning),
        ("other", &analysis.phrase_updates.other),
    ] {
        gdpr.push(vec![
            label.to_string(),
            group.updates.to_string(),
            format!("{:.1}", group.median_added_lines),
            format!("{:.1}", group.mean_added_lines),
        ]);
    }
    emit("gdpr_updates.csv", gdpr)?;

    manifest.set_count("reports", written);
    write_manifest(&config.work_dir, &manifest)?;

    let mut summary = StageSummary::new(Stage::Report);
    summary.counts = manifest.counts.clone();
    Ok(summary)
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn write_csv(path: &Path, rows: Vec<Vec<String>>) -> Result<(), PipelineError> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| PipelineError::BadData(format!("{}: {e}", path.display())))?;
    for row in rows {
        writer
            .write_record(&row)
            .map_err(|e| PipelineError::BadData(format!("{}: {e}", path.display())))?;
    }
    writer
        .flush()
        .map_err(|e| io_err(path.display(), e))?;
    Ok(())
}
