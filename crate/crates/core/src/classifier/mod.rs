//! Apparent-privacy-policy classification: preprocessing, vocabulary,
//! features, two model families, cross-validated selection, and
//! precision-first thresholding.

pub mod auc;
pub mod features;
pub mod logistic;
pub mod model;
pub mod preprocess;
pub mod select;
pub mod stopwords;
pub mod tree;
pub mod vocab;

pub use auc::auc;
pub use features::featurize;
pub use logistic::{LogisticModel, LogisticParams};
pub use model::{build_grid, train, Hyperparameters, Model, ModelKind, ModelParams};
pub use preprocess::{preprocess, preprocess_with, title_of};
pub use select::{cross_validate, select_threshold, stratified_folds};
pub use stopwords::{bundled_stop_words, parse_stop_words};
pub use tree::{Forest, ForestParams, TreeNode};
pub use vocab::{build_vocabulary, Vocabulary};

#[derive(Debug, thiserror::Error)]
pub enum ClassifierError {
    #[error("training requires both classes")]
    SingleClass,
    #[error("hyperparameter grid is empty")]
    EmptyGrid,
    #[error("bad model file: {0}")]
    BadModel(String),
    #[error("bad label file: {0}")]
    BadLabels(String),
}

/// Parse a `path,label` CSV; labels are `0` or `1`. A `path,label` header
/// row is tolerated.
pub fn parse_label_file(text: &str) -> Result<Vec<(String, bool)>, ClassifierError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if lineno == 0 && line.eq_ignore_ascii_case("path,label") {
            continue;
        }
        let Some((path, label)) = line.rsplit_once(',') else {
            return Err(ClassifierError::BadLabels(format!(
                "line {}: expected path,label",
                lineno + 1
            )));
        };
        let label = match label.trim() {
            "0" => false,
            "1" => true,
            other => {
                return Err(ClassifierError::BadLabels(format!(
                    "line {}: label must be 0 or 1, got {other:?}",
                    lineno + 1
                )));
            }
        };
        out.push((path.trim().to_string(), label));
    }
    Ok(out)
}
