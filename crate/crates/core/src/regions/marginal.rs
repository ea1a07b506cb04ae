//! Joint marginals: per-horizon bootstrap intervals at multiplicity-corrected
//! levels, strung together.

use super::{ErrorMatrix, JointRegion, Method, SigmaEstimate, Sided};
use crate::error::{Error, Result};
use crate::series::empirical_quantile;

/// Coverage `1 - α/H` at every horizon.
pub fn bonferroni_levels(alpha: f64, horizon: usize) -> Vec<f64> {
    vec![1.0 - alpha / horizon as f64; horizon]
}

/// Coverage `1 - α·h/H` at horizon `h`.
pub fn bh_levels(alpha: f64, horizon: usize) -> Vec<f64> {
    (1..=horizon)
        .map(|h| 1.0 - alpha * h as f64 / horizon as f64)
        .collect()
}

/// Coverage `(1 - α)^{1/H}` at every horizon.
pub fn sidak_levels(alpha: f64, horizon: usize) -> Vec<f64> {
    vec![(1.0 - alpha).powf(1.0 / horizon as f64); horizon]
}

/// `ŷ(h) ± q_h·σ̂(h)` with `q_h` the `levels[h]` quantile of `|ŝ*(h)|`.
pub fn marginal_region(
    point: &[f64],
    sigma: &SigmaEstimate,
    s: &ErrorMatrix,
    levels: &[f64],
    method: Method,
    alpha: f64,
) -> Result<JointRegion> {
    let h = point.len();
    for got in [sigma.values().len(), s.cols(), levels.len()] {
        if got != h {
            return Err(Error::LengthMismatch { expected: h, got });
        }
    }
    let mut lower = Vec::with_capacity(h);
    let mut upper = Vec::with_capacity(h);
    for i in 0..h {
        let abs: Vec<f64> = s.column(i).iter().map(|v| v.abs()).collect();
        let q = empirical_quantile(&abs, levels[i])?;
        let half = q * sigma.values()[i];
        lower.push(point[i] - half);
        upper.push(point[i] + half);
    }
    JointRegion::new(lower, upper, point.to_vec(), method, alpha, 1, Sided::Two)
}
