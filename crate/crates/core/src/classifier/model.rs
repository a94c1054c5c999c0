//! The persisted classifier: kind, vocabulary, parameters, threshold.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::logistic::{train_logistic, LogisticModel, LogisticParams};
use super::tree::{train_forest, Forest, ForestParams};
use super::vocab::Vocabulary;
use super::ClassifierError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    RandomForest,
    LogisticRegression,
}

/// One grid point for model selection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Hyperparameters {
    Forest(ForestParams),
    Logistic(LogisticParams),
}

impl Hyperparameters {
    pub fn kind(&self) -> ModelKind {
        match self {
            Hyperparameters::Forest(_) => ModelKind::RandomForest,
            Hyperparameters::Logistic(_) => ModelKind::LogisticRegression,
        }
    }
}

/// Every forest point first (trees × depth × min-leaf), then every
/// logistic point, in the given list orders.
pub fn build_grid(
    trees: &[usize],
    depths: &[Option<usize>],
    min_leafs: &[usize],
    l2s: &[f64],
) -> Vec<Hyperparameters> {
    let mut grid = Vec::new();
    for &t in trees {
        for &d in depths {
            for &m in min_leafs {
                grid.push(Hyperparameters::Forest(ForestParams {
                    trees: t,
                    max_depth: d,
                    min_leaf: m,
                }));
            }
        }
    }
    for &l2 in l2s {
        grid.push(Hyperparameters::Logistic(LogisticParams { l2 }));
    }
    grid
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ModelParams {
    Forest(Forest),
    Logistic(LogisticModel),
}

impl ModelParams {
    pub fn score(&self, features: &[f64]) -> f64 {
        match self {
            ModelParams::Forest(f) => f.score(features),
            ModelParams::Logistic(l) => l.score(features),
        }
    }
}

/// Train parameters for one grid point. Both classes must be present.
pub fn train(
    xs: &[Vec<f64>],
    ys: &[bool],
    hp: &Hyperparameters,
    seed: u64,
) -> Result<ModelParams, ClassifierError> {
    let pos = ys.iter().filter(|&&y| y).count();
    if xs.is_empty() || pos == 0 || pos == ys.len() {
        return Err(ClassifierError::SingleClass);
    }
    Ok(match hp {
        Hyperparameters::Forest(p) => ModelParams::Forest(train_forest(xs, ys, p, seed)),
        Hyperparameters::Logistic(p) => ModelParams::Logistic(train_logistic(xs, ys, p)),
    })
}

/// The self-describing persisted model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub kind: ModelKind,
    pub vocabulary: Vocabulary,
    pub params: ModelParams,
    pub threshold: f64,
    pub seed: u64,
    /// Digest of the training corpus the model was fit on.
    pub training_digest: String,
}

impl Model {
    pub fn score(&self, features: &[f64]) -> f64 {
        self.params.score(features)
    }

    /// Score and the thresholded decision; the boundary itself is positive.
    pub fn classify(&self, features: &[f64]) -> (f64, bool) {
        let score = self.score(features);
        (score, score >= self.threshold)
    }

    /// Single-line JSON; save → load → save is byte-identical.
    pub fn save(&self, path: &Path) -> Result<(), ClassifierError> {
        let json = serde_json::to_string(self)
            .map_err(|e| ClassifierError::BadModel(e.to_string()))?;
        std::fs::write(path, json.as_bytes())
            .map_err(|e| ClassifierError::BadModel(format!("{}: {e}", path.display())))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Model, ClassifierError> {
        let bytes = std::fs::read(path)
            .map_err(|e| ClassifierError::BadModel(format!("{}: {e}", path.display())))?;
        serde_json::from_slice(&bytes).map_err(|e| ClassifierError::BadModel(e.to_string()))
    }
}
