//! Change-point detection by the PELT algorithm with the squared-error
//! (constant-mean) segment cost.
//!
//! A change point is the start index of a new segment, so the series
//! `[0,0,0,0,10,10,10,10]` has the single change point `4`. The optimizer is
//! exact: pruning never discards a candidate that could still participate in
//! an optimal segmentation, because splitting a segment never increases the
//! squared-error cost.

use super::AnalysisError;

/// Σ(x − mean)² over `x[s..t)`, from prefix sums.
#[derive(Debug)]
struct SegmentCost {
    cum: Vec<f64>,
    cum2: Vec<f64>,
}

impl SegmentCost {
    fn new(series: &[f64]) -> Self {
        let mut cum = Vec::with_capacity(series.len() + 1);
        let mut cum2 = Vec::with_capacity(series.len() + 1);
        cum.push(0.0);
        cum2.push(0.0);
        for &x in series {
            cum.push(cum.last().unwrap() + x);
            cum2.push(cum2.last().unwrap() + x * x);
        }
        SegmentCost { cum, cum2 }
    }

    fn cost(&self, s: usize, t: usize) -> f64 {
        debug_assert!(s < t);
        let n = (t - s) as f64;
        let sum = self.cum[t] - self.cum[s];
        let sum2 = self.cum2[t] - self.cum2[s];
        sum2 - sum * sum / n
    }
}

/// Default penalty: 2·ln(n)·variance of the series, floored away from zero
/// so constant series stay valid (any split then strictly loses).
pub fn default_penalty(series: &[f64]) -> f64 {
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let var = series.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (2.0 * n.ln() * var).max(1e-12)
}

/// Exact minimizer of Σ segment costs + penalty · (number of change points).
/// Returns sorted change-point indices (segment starts, never 0).
pub fn pelt_changepoints(series: &[f64], penalty: f64) -> Result<Vec<usize>, AnalysisError> {
    let n = series.len();
    if n < 2 {
        return Err(AnalysisError::SeriesTooShort(n));
    }
    let cost = SegmentCost::new(series);

    // f[t] = optimal objective for x[0..t), with f[0] = -penalty so every
    // segment closes with +penalty and the first one comes for free
    let mut f = vec![0.0f64; n + 1];
    f[0] = -penalty;
    let mut prev = vec![0usize; n + 1];
    let mut candidates: Vec<usize> = vec![0];

    for t in 1..=n {
        let mut best_s = candidates[0];
        let mut best_val = f[best_s] + cost.cost(best_s, t) + penalty;
        for &s in &candidates[1..] {
            let val = f[s] + cost.cost(s, t) + penalty;
            if val < best_val {
                best_val = val;
                best_s = s;
            }
        }
        f[t] = best_val;
        prev[t] = best_s;
        // prune candidates that can no longer start an optimal last segment
        candidates.retain(|&s| f[s] + cost.cost(s, t) <= f[t]);
        candidates.push(t);
    }

    let mut cps = Vec::new();
    let mut t = n;
    while prev[t] > 0 {
        cps.push(prev[t]);
        t = prev[t];
    }
    cps.reverse();
    Ok(cps)
}
