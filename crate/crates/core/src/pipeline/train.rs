//! Train: fit the policy classifier on a labeled markdown corpus, pick
//! hyperparameters by cross-validated AUC, and pick the decision threshold
//! from out-of-fold scores at the configured precision floor.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classifier::{
    build_grid, build_vocabulary, cross_validate, featurize, preprocess, select_threshold,
    stratified_folds, title_of, train, ClassifierError, Hyperparameters, Model, ModelKind,
    Vocabulary,
};
use crate::config::Config;

use super::manifest::{digest_bytes, write_json, write_manifest, Manifest};
use super::{io_err, PipelineError, Stage, StageContext, StageSummary};

pub fn model_path(config: &Config) -> PathBuf {
    config.work_dir.join("model.json")
}

pub fn report_path(config: &Config) -> PathBuf {
    config.work_dir.join("train_report.json")
}

/// Selection summary persisted next to the model.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainReport {
    pub examples: usize,
    pub positives: usize,
    pub vocabulary_dimension: usize,
    pub kind: ModelKind,
    pub hyperparameters: Hyperparameters,
    pub cv_auc: f64,
    pub threshold: f64,
    pub validation_precision: f64,
    pub validation_recall: f64,
}

pub(super) fn run(ctx: &StageContext) -> Result<StageSummary, PipelineError> {
    let config = &ctx.config;
    let labels_csv = config.labels_csv.as_ref().ok_or_else(|| {
        PipelineError::MissingInput("labels_csv is not configured".to_string())
    })?;
    let labels_text =
        std::fs::read_to_string(labels_csv).map_err(|e| io_err(labels_csv.display(), e))?;
    let labeled = crate::classifier::parse_label_file(&labels_text)?;
    if labeled.is_empty() {
        return Err(PipelineError::MissingInput(format!(
            "{} lists no training documents",
            labels_csv.display()
        )));
    }

    let base = labels_csv.parent().unwrap_or_else(|| Path::new("."));
    let mut manifest = Manifest::new(Stage::Train, config);
    manifest.record_input(config, labels_csv)?;

    let mut tokenized: Vec<(Vec<String>, Vec<String>)> = Vec::with_capacity(labeled.len());
    let mut ys: Vec<bool> = Vec::with_capacity(labeled.len());
    let mut digest_acc = digest_bytes(labels_text.as_bytes());
    for (rel, label) in &labeled {
        let path = base.join(rel);
        let markdown =
            std::fs::read_to_string(&path).map_err(|e| io_err(path.display(), e))?;
        manifest.record_input(config, &path)?;
        digest_acc.push_str(&digest_bytes(markdown.as_bytes()));
        tokenized.push((preprocess(&markdown), preprocess(&title_of(&markdown))));
        ys.push(*label);
    }
    let training_digest = digest_bytes(digest_acc.as_bytes());

    let vocabulary = build_vocabulary(&tokenized, config.df_floor);
    let xs: Vec<Vec<f64>> = tokenized
        .iter()
        .map(|(body, title)| featurize(body, title, &vocabulary))
        .collect();

    let grid = build_grid(
        &config.grid_trees,
        &config.grid_depth,
        &config.grid_min_leaf,
        &config.grid_l2,
    );
    let (best, cv_auc) = cross_validate(&xs, &ys, &grid, config.cv_folds, config.seed)?;

    let (scores, labels) = out_of_fold_scores(&xs, &ys, &best, config.cv_folds, config.seed)?;
    let threshold = select_threshold(&scores, &labels, config.min_precision);
    let (precision, recall) = precision_recall(&scores, &labels, threshold);

    let params = train(&xs, &ys, &best, config.seed)?;
    let model = Model {
        kind: best.kind(),
        vocabulary: vocabulary.clone(),
        params,
        threshold,
        seed: config.seed,
        training_digest,
    };
    let model_file = model_path(config);
    if let Some(parent) = model_file.parent() {
        std::fs::create_dir_all(parent).map_err(|e| io_err(parent.display(), e))?;
    }
    model.save(&model_file)?;

    let report = TrainReport {
        examples: ys.len(),
        positives: ys.iter().filter(|&&y| y).count(),
        vocabulary_dimension: vocabulary.dimension(),
        kind: best.kind(),
        hyperparameters: best,
        cv_auc,
        threshold,
        validation_precision: precision,
        validation_recall: recall,
    };
    let report_file = report_path(config);
    write_json(&report_file, &report)?;

    manifest.record_output(config, &model_file)?;
    manifest.record_output(config, &report_file)?;
    manifest.set_count("examples", ys.len() as u64);
    manifest.set_count("positives", report.positives as u64);
    manifest.set_count("grid_points", grid.len() as u64);
    manifest.set_count("vocabulary_terms", vocabulary.dimension() as u64);
    write_manifest(&config.work_dir, &manifest)?;

    let mut summary = StageSummary::new(Stage::Train);
    summary.counts = manifest.counts.clone();
    Ok(summary)
}

/// Score every example with a model trained on the other folds, using the
/// same fold assignment and per-fold seeds as the grid search. Folds whose
/// training split collapses to one class contribute nothing; if every fold
/// collapses the full-fit model scores its own training set as a last
/// resort.
fn out_of_fold_scores(
    xs: &[Vec<f64>],
    ys: &[bool],
    hp: &Hyperparameters,
    k: usize,
    seed: u64,
) -> Result<(Vec<f64>, Vec<bool>), PipelineError> {
    let folds = stratified_folds(ys, k, seed);
    let mut scores = Vec::new();
    let mut labels = Vec::new();
    for fold in 0..k {
        let mut train_x = Vec::new();
        let mut train_y = Vec::new();
        let mut test: Vec<usize> = Vec::new();
        for i in 0..xs.len() {
            if folds[i] == fold {
                test.push(i);
            } else {
                train_x.push(xs[i].clone());
                train_y.push(ys[i]);
            }
        }
        match train(&train_x, &train_y, hp, seed.wrapping_add(fold as u64)) {
            Ok(params) => {
                for i in test {
                    scores.push(params.score(&xs[i]));
                    labels.push(ys[i]);
                }
            }
            Err(ClassifierError::SingleClass) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    if scores.is_empty() {
        let params = train(xs, ys, hp, seed)?;
        scores = xs.iter().map(|x| params.score(x)).collect();
        labels = ys.to_vec();
    }
    Ok((scores, labels))
}

fn precision_recall(scores: &[f64], labels: &[bool], threshold: f64) -> (f64, f64) {
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fne = 0usize;
    for (&s, &l) in scores.iter().zip(labels) {
        match (s >= threshold, l) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fne += 1,
            (false, false) => {}
        }
    }
    let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
    let recall = if tp + fne == 0 { 0.0 } else { tp as f64 / (tp + fne) as f64 };
    (precision, recall)
}

/// Tokenize a crawled document the same way training documents are
/// tokenized, then featurize against the model vocabulary.
pub fn features_for_document(markdown: &str, vocabulary: &Vocabulary) -> Vec<f64> {
    let body = preprocess(markdown);
    let title = preprocess(&title_of(markdown));
    featurize(&body, &title, vocabulary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::manifest::read_json;
    use std::path::Path;

    fn write_training_set(dir: &Path) -> PathBuf {
        let mut rows = vec!["path,label".to_string()];
        for i in 0..12 {
            let name = format!("pos_{i}.md");
            let body = format!(
                "# Privacy Policy {i}\n\nWe collect personal information such as your \
email address and usage logs. We share data with service providers and use \
cookies for analytics. You may request deletion of your personal information \
at any time.\n"
            );
            std::fs::write(dir.join(&name), body).unwrap();
            rows.push(format!("{name},1"));
        }
        for i in 0..12 {
            let name = format!("neg_{i}.md");
            let body = format!(
                "# Sourdough Notes {i}\n\nMix the flour with water and let the dough \
rest overnight. Bake at high heat until the crust browns. Serve the bread \
warm with butter and a pinch of salt.\n"
            );
            std::fs::write(dir.join(&name), body).unwrap();
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
        // tiny corpus: a low floor would admit every one-off n-gram and
        // drown the informative terms in noise features
        config.df_floor = 0.25;
        config.grid_trees = vec![25];
        config.grid_depth = vec![None];
        config.grid_min_leaf = vec![1];
        config.grid_l2 = vec![1.0];
        StageContext::new(config)
    }

    #[test]
    fn trains_and_separates_classes() {
        let dir = tempfile::tempdir().unwrap();
        let ctx = context(dir.path());
        let summary = run(&ctx).unwrap();
        assert_eq!(summary.counts["examples"], 24);
        assert_eq!(summary.counts["positives"], 12);

        // unseen documents drawn from the same densities as the training set
        let model = Model::load(&model_path(&ctx.config)).unwrap();
        let pos = features_for_document(
            "# Privacy Policy\n\nWe collect personal information such as your \
postal address and usage logs. We share data with service providers and use \
cookies for measurement. You may request deletion of your personal \
information whenever you like.\n",
            &model.vocabulary,
        );
        let neg = features_for_document(
            "# Sourdough Notes\n\nMix the flour with water and let the dough rest \
for a day. Bake at high heat until the crust browns. Serve the bread warm \
with butter and a pinch of salt.\n",
            &model.vocabulary,
        );
        let (pos_score, pos_label) = model.classify(&pos);
        let (neg_score, neg_label) = model.classify(&neg);
        assert!(pos_label, "policy text should classify positive");
        assert!(!neg_label, "recipe text should classify negative");
        assert!(pos_score > neg_score);

        let report: TrainReport = read_json(&report_path(&ctx.config)).unwrap();
        assert!(report.cv_auc > 0.9, "cv_auc = {}", report.cv_auc);
        assert!(report.validation_precision >= 0.9);
        assert!((0.0..=1.0).contains(&report.threshold));
    }

    #[test]
    fn reruns_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let ctx = context(dir.path());
        run(&ctx).unwrap();
        let model_first = std::fs::read(model_path(&ctx.config)).unwrap();
        let report_first = std::fs::read(report_path(&ctx.config)).unwrap();
        run(&ctx).unwrap();
        assert_eq!(std::fs::read(model_path(&ctx.config)).unwrap(), model_first);
        assert_eq!(std::fs::read(report_path(&ctx.config)).unwrap(), report_first);
    }

    #[test]
    fn missing_labels_config_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let mut ctx = context(dir.path());
        ctx.config.labels_csv = None;
        let err = run(&ctx).unwrap_err();
        assert!(err.to_string().contains("labels_csv"));
    }
}
