//! Model selection: stratified cross-validation over a hyperparameter grid
//! and precision-first threshold choice.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::auc::auc;
use super::model::{train, Hyperparameters};
use super::ClassifierError;

/// Assign each example a fold id in 0..k, stratified by class: both classes
/// spread round-robin after a seeded shuffle.
pub fn stratified_folds(labels: &[bool], k: usize, seed: u64) -> Vec<usize> {
    assert!(k >= 2, "need at least two folds");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![0usize; labels.len()];
    for class in [true, false] {
        let mut members: Vec<usize> = (0..labels.len())
            .filter(|&i| labels[i] == class)
            .collect();
        members.shuffle(&mut rng);
        for (slot, &idx) in members.iter().enumerate() {
            folds[idx] = slot % k;
        }
    }
    folds
}

/// Mean validation AUC for every grid point; returns the best point (ties
/// go to the earlier grid entry). Folds whose training split collapses to
/// one class score 0.5.
pub fn cross_validate(
    xs: &[Vec<f64>],
    ys: &[bool],
    grid: &[Hyperparameters],
    k: usize,
    seed: u64,
) -> Result<(Hyperparameters, f64), ClassifierError> {
    if grid.is_empty() {
        return Err(ClassifierError::EmptyGrid);
    }
    let folds = stratified_folds(ys, k, seed);

    let mut best: Option<(usize, f64)> = None;
    for (gi, hp) in grid.iter().enumerate() {
        let mut fold_aucs = Vec::with_capacity(k);
        for fold in 0..k {
            let mut train_x = Vec::new();
            let mut train_y = Vec::new();
            let mut test_x = Vec::new();
            let mut test_y = Vec::new();
            for i in 0..xs.len() {
                if folds[i] == fold {
                    test_x.push(xs[i].clone());
                    test_y.push(ys[i]);
                } else {
                    train_x.push(xs[i].clone());
                    train_y.push(ys[i]);
                }
            }
            let fold_auc = match train(&train_x, &train_y, hp, seed.wrapping_add(fold as u64)) {
                Ok(params) => {
                    let scores: Vec<f64> =
                        test_x.iter().map(|x| params.score(x)).collect();
                    auc(&scores, &test_y)
                }
                Err(ClassifierError::SingleClass) => 0.5,
                Err(e) => return Err(e),
            };
            fold_aucs.push(fold_auc);
        }
        let mean = fold_aucs.iter().sum::<f64>() / fold_aucs.len() as f64;
        if best.is_none() || mean > best.unwrap().1 {
            best = Some((gi, mean));
        }
    }
    let (gi, mean) = best.expect("grid is non-empty");
    Ok((grid[gi], mean))
}

/// Candidate thresholds: every observed score plus the midpoints between
/// adjacent distinct scores, ascending.
fn threshold_candidates(scores: &[f64]) -> Vec<f64> {
    let mut unique: Vec<f64> = scores.to_vec();
    unique.sort_by(f64::total_cmp);
    unique.dedup();
    let mut out = Vec::with_capacity(unique.len() * 2);
    for (i, &s) in unique.iter().enumerate() {
        out.push(s);
        if i + 1 < unique.len() {
            out.push(s + (unique[i + 1] - s) / 2.0);
        }
    }
    out.dedup();
    out
}

/// Smallest candidate threshold with validation precision at or above
/// `min_precision`; when none qualifies, the candidate maximizing precision
/// (ties prefer higher recall, then the smaller threshold). Documents
/// scoring exactly at the threshold count as positive.
pub fn select_threshold(scores: &[f64], labels: &[bool], min_precision: f64) -> f64 {
    assert_eq!(scores.len(), labels.len());
    assert!(!scores.is_empty(), "need validation scores");
    let n_pos = labels.iter().filter(|&&l| l).count();

    let mut fallback: Option<(f64, f64, f64)> = None; // (precision, recall, threshold)
    for theta in threshold_candidates(scores) {
        let mut tp = 0usize;
        let mut fp = 0usize;
        for (&s, &l) in scores.iter().zip(labels) {
            if s >= theta {
                if l {
                    tp += 1;
                } else {
                    fp += 1;
                }
            }
        }
        if tp + fp == 0 {
            continue;
        }
        let precision = tp as f64 / (tp + fp) as f64;
        let recall = if n_pos == 0 { 0.0 } else { tp as f64 / n_pos as f64 };
        if precision >= min_precision {
            return theta;
        }
        let better = match fallback {
            None => true,
            Some((bp, br, _)) => {
                precision > bp || (precision == bp && recall > br)
            }
        };
        if better {
            fallback = Some((precision, recall, theta));
        }
    }
    fallback.map(|(_, _, t)| t).unwrap_or(0.5)
}
