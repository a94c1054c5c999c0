//! Classify: score every extracted document with the trained model and
//! write the canonical `corpus/metadata.jsonl`. Documents scored below the
//! threshold become `ClassifiedNegative`; their markdown stays on disk, the
//! metadata record is the source of truth.

use std::path::PathBuf;

use crate::classifier::Model;
use crate::config::Config;
use crate::corpus::{read_metadata_log, CorpusStore, FailureCause, Outcome};

use super::extract::log_path as extract_log_path;
use super::manifest::{write_manifest, Manifest};
use super::train::{features_for_document, model_path};
use super::{PipelineError, Stage, StageContext, StageSummary};

pub fn metadata_path(config: &Config) -> PathBuf {
    CorpusStore::new(&config.corpus_dir).metadata_path()
}

pub(super) fn run(ctx: &StageContext) -> Result<StageSummary, PipelineError> {
    let config = &ctx.config;
    let extract_log = extract_log_path(config);
    let records = read_metadata_log(&extract_log)?;

    let model_file = model_path(config);
    let model = Model::load(&model_file)?;

    let store = CorpusStore::new(&config.corpus_dir);
    let mut manifest = Manifest::new(Stage::Classify, config);
    manifest.record_input(config, &extract_log)?;
    manifest.record_input(config, &model_file)?;

    let mut out = Vec::with_capacity(records.len());
    let mut positives = 0u64;
    let mut negatives = 0u64;
    for mut rec in records {
        if rec.outcome.is_success() {
            manifest.record_input(config, &store.document_path(&rec.site, rec.interval))?;
            let markdown = store.read_document(&rec.site, rec.interval)?;
            let features = features_for_document(&markdown, &model.vocabulary);
            let (score, positive) = model.classify(&features);
            rec.classifier_score = Some(score);
            if positive {
                positives += 1;
            } else {
                rec.outcome = Outcome::Failure(FailureCause::ClassifiedNegative);
                negatives += 1;
            }
        }
        out.push(rec);
    }

    store.write_metadata(&out)?;
    manifest.record_output(config, &store.metadata_path())?;
    manifest.set_count("records", out.len() as u64);
    manifest.set_count("confirmed_policies", positives);
    manifest.set_count("classified_negative", negatives);
    write_manifest(&config.work_dir, &manifest)?;

    let mut summary = StageSummary::new(Stage::Classify);
    summary.counts = manifest.counts.clone();
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{write_metadata_log, Interval, MetadataRecord};
    use crate::pipeline::train::{self, report_path};
    use std::path::Path;

    const POLICY_MD: &str = "# Privacy Policy\n\nWe collect personal information such as \
your email address and usage logs. We share data with service providers and \
use cookies for analytics. You may request deletion at any time.\n";
    const RECIPE_MD: &str = "# Sourdough Notes\n\nMix the flour with water and let the \
dough rest overnight. Bake at high heat until the crust browns.\n";

    fn write_training_set(dir: &Path) -> PathBuf {
        let mut rows = vec!["path,label".to_string()];
        for i in 0..12 {
            let name = format!("pos_{i}.md");
            std::fs::write(dir.join(&name), POLICY_MD.replace("Policy", &format!("Policy {i}")))
                .unwrap();
            rows.push(format!("{name},1"));
        }
        for i in 0..12 {
            let name = format!("neg_{i}.md");
            std::fs::write(dir.join(&name), RECIPE_MD.replace("Notes", &format!("Notes {i}")))
                .unwrap();
            rows.push(format!("{name},0"));
        }
        let labels = dir.join("labels.csv");
        std::fs::write(&labels, rows.join("\n") + "\n").unwrap();
        labels
    }

    fn context(base: &Path) -> StageContext {
        let mut config = Config::default();
        config.work_dir = base.join("work");
        config.corpus_dir = base.join("corpus");
        config.reports_dir = base.join("reports");
        config.labels_csv = Some(write_training_set(base));
        config.cv_folds = 4;
        config.df_floor = 0.25;
        config.grid_trees = vec![25];
        config.grid_depth = vec![None];
        config.grid_min_leaf = vec![1];
        config.grid_l2 = vec![1.0];
        StageContext::new(config)
    }

    fn success(site: &str) -> MetadataRecord {
        let interval: Interval = "2016A".parse().unwrap();
        let mut rec = MetadataRecord::attempt(site, interval, Outcome::Success);
        rec.policy_url = Some(format!("http://{site}/privacy"));
        rec.policy_timestamp = Some("20160315000000".into());
        rec.language = Some("en".into());
        rec
    }

    #[test]
    fn scores_documents_and_rewrites_metadata() {
        let dir = tempfile::tempdir().unwrap();
        let ctx = context(dir.path());
        train::run(&ctx).unwrap();

        let interval: Interval = "2016A".parse().unwrap();
        let store = CorpusStore::new(&ctx.config.corpus_dir);
        store.write_document("alpha.com", interval, POLICY_MD).unwrap();
        store.write_document("recipes.com", interval, RECIPE_MD).unwrap();
        let failure = MetadataRecord::attempt(
            "gone.com",
            interval,
            Outcome::Failure(FailureCause::BlankHomepage),
        );
        std::fs::create_dir_all(&ctx.config.work_dir).unwrap();
        write_metadata_log(
            &extract_log_path(&ctx.config),
            &[success("alpha.com"), success("recipes.com"), failure.clone()],
        )
        .unwrap();

        let summary = run(&ctx).unwrap();
        assert_eq!(summary.counts["confirmed_policies"], 1);
        assert_eq!(summary.counts["classified_negative"], 1);

        let metadata = store.read_metadata().unwrap();
        assert_eq!(metadata.len(), 3);
        let by_site = |site: &str| metadata.iter().find(|r| r.site == site).unwrap();
        assert_eq!(by_site("alpha.com").outcome, Outcome::Success);
        assert!(by_site("alpha.com").classifier_score.is_some());
        assert_eq!(
            by_site("recipes.com").outcome,
            Outcome::Failure(FailureCause::ClassifiedNegative)
        );
        // rejected markdown stays on disk; metadata carries the verdict
        assert!(store.document_exists("recipes.com", interval));
        assert_eq!(by_site("gone.com"), &failure);

        // idempotence: rerunning classify reproduces metadata bytes
        let first = std::fs::read(store.metadata_path()).unwrap();
        run(&ctx).unwrap();
        assert_eq!(std::fs::read(store.metadata_path()).unwrap(), first);
        let _ = std::fs::read(report_path(&ctx.config)).unwrap();
    }
}
