//! Bagged CART trees with Gini splits and per-split feature subsampling.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::parallel::par_map;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Leaf {
        positive: bool,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn predict(&self, x: &[f64]) -> bool {
        match self {
            TreeNode::Leaf { positive } => *positive,
            TreeNode::Split { feature, threshold, left, right } => {
                if x[*feature] <= *threshold {
                    left.predict(x)
                } else {
                    right.predict(x)
                }
            }
        }
    }

    fn max_feature(&self) -> Option<usize> {
        match self {
            TreeNode::Leaf { .. } => None,
            TreeNode::Split { feature, left, right, .. } => {
                let mut m = *feature;
                if let Some(l) = left.max_feature() {
                    m = m.max(l);
                }
                if let Some(r) = right.max_feature() {
                    m = m.max(r);
                }
                Some(m)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub trees: usize,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams { trees: 100, max_depth: None, min_leaf: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<TreeNode>,
}

impl Forest {
    /// Fraction of trees voting positive; tree order cannot matter.
    pub fn score(&self, x: &[f64]) -> f64 {
        if self.trees.is_empty() {
            return 0.0;
        }
        let votes = self.trees.iter().filter(|t| t.predict(x)).count();
        votes as f64 / self.trees.len() as f64
    }

    /// Every split must reference a feature below `dimension`.
    pub fn validate(&self, dimension: usize) -> bool {
        self.trees
            .iter()
            .filter_map(TreeNode::max_feature)
            .all(|m| m < dimension)
    }
}

/// Train a forest: each tree sees a bootstrap sample and, at every split,
/// a fresh ⌈√d⌉-feature subsample. Per-tree seeds derive from the master
/// seed up front, so tree construction parallelizes without changing the
/// result.
pub fn train_forest(xs: &[Vec<f64>], ys: &[bool], params: &ForestParams, seed: u64) -> Forest {
    assert!(!xs.is_empty(), "training set must be non-empty");
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let tree_seeds: Vec<u64> = (0..params.trees).map(|_| master.gen()).collect();

    let params = *params;
    let xs_owned = xs.to_vec();
    let ys_owned = ys.to_vec();
    let trees = par_map(tree_seeds, move |tree_seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(tree_seed);
        let n = xs_owned.len();
        let indices: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        build_node(&xs_owned, &ys_owned, indices, 0, &params, &mut rng)
    });
    Forest { trees }
}

fn leaf_of(ys: &[bool], indices: &[usize]) -> TreeNode {
    let pos = indices.iter().filter(|&&i| ys[i]).count();
    let neg = indices.len() - pos;
    // exact tie votes negative
    TreeNode::Leaf { positive: pos > neg }
}

fn build_node(
    xs: &[Vec<f64>],
    ys: &[bool],
    indices: Vec<usize>,
    depth: usize,
    params: &ForestParams,
    rng: &mut ChaCha8Rng,
) -> TreeNode {
    let pos = indices.iter().filter(|&&i| ys[i]).count();
    let pure = pos == 0 || pos == indices.len();
    let depth_capped = params.max_depth.is_some_and(|m| depth >= m);
    if pure || depth_capped || indices.len() < 2 * params.min_leaf {
        return leaf_of(ys, &indices);
    }

    let d = xs[0].len();
    if d == 0 {
        return leaf_of(ys, &indices);
    }
    let k = (d as f64).sqrt().ceil() as usize;
    let features = sample(rng, d, k.min(d)).into_vec();

    let mut best: Option<(f64, usize, f64)> = None; // (impurity, feature, threshold)
    for &feature in &features {
        let mut sorted = indices.clone();
        sorted.sort_by(|&a, &b| {
            xs[a][feature]
                .total_cmp(&xs[b][feature])
                .then_with(|| a.cmp(&b))
        });
        let n = sorted.len() as f64;
        // prefix positives allow O(1) impurity per cut
        let mut pos_left = 0usize;
        for cut in 1..sorted.len() {
            if ys[sorted[cut - 1]] {
                pos_left += 1;
            }
            let v_prev = xs[sorted[cut - 1]][feature];
            let v_next = xs[sorted[cut]][feature];
            if v_prev == v_next {
                continue;
            }
            if cut < params.min_leaf || sorted.len() - cut < params.min_leaf {
                continue;
            }
            let nl = cut as f64;
            let nr = n - nl;
            let pl = pos_left as f64 / nl;
            let pr = (pos - pos_left) as f64 / nr;
            let impurity = (nl * 2.0 * pl * (1.0 - pl) + nr * 2.0 * pr * (1.0 - pr)) / n;
            let threshold = v_prev + (v_next - v_prev) / 2.0;
            // strict less keeps the earliest candidate on ties
            if best.is_none() || impurity < best.unwrap().0 {
                best = Some((impurity, feature, threshold));
            }
        }
    }

    let Some((_, feature, threshold)) = best else {
        return leaf_of(ys, &indices);
    };
    let (left_idx, right_idx): (Vec<usize>, Vec<usize>) =
        indices.into_iter().partition(|&i| xs[i][feature] <= threshold);
    let left = build_node(xs, ys, left_idx, depth + 1, params, rng);
    let right = build_node(xs, ys, right_idx, depth + 1, params, rng);
    TreeNode::Split {
        feature,
        threshold,
        left: Box::new(left),
        right: Box::new(right),
    }
}
