//! NP heuristic: the envelope of the bootstrap path forecasts left after
//! discarding the `⌈αB⌉` farthest from the central path.

use super::{ErrorMatrix, JointRegion, Method, Sided};
use crate::error::{Error, Result};
use crate::series::ceil_rank;

/// Bootstrap paths `ŷ(h) - û*_b(h)`, one per replicate.
pub fn bootstrap_paths(point: &[f64], errors: &ErrorMatrix) -> Result<Vec<Vec<f64>>> {
    if errors.cols() != point.len() {
        return Err(Error::LengthMismatch {
            expected: point.len(),
            got: errors.cols(),
        });
    }
    Ok(errors
        .iter_rows()
        .map(|r| point.iter().zip(r).map(|(y, u)| y - u).collect())
        .collect())
}

fn discard_count(alpha: f64, b: usize) -> usize {
    if alpha * b as f64 <= 0.0 {
        0
    } else {
        ceil_rank(alpha, b)
    }
}

/// Indices of the retained paths, nearest first; equal distances keep the
/// lower index.
pub fn np_retained(center: &[f64], paths: &[Vec<f64>], alpha: f64) -> Result<Vec<usize>> {
    let b = paths.len();
    if b < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 bootstrap paths, got {b}"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::POutOfRange(alpha));
    }
    if let Some((index, p)) = paths.iter().enumerate().find(|(_, p)| p.len() != center.len()) {
        return Err(Error::HorizonMismatch {
            index,
            expected: center.len(),
            got: p.len(),
        });
    }
    let drop = discard_count(alpha, b);
    if drop >= b {
        return Err(Error::InvalidArgument(format!(
            "α = {alpha} discards all {b} paths"
        )));
    }
    let dist: Vec<f64> = paths
        .iter()
        .map(|p| {
            p.iter()
                .zip(center)
                .map(|(a, c)| (a - c) * (a - c))
                .sum::<f64>()
        })
        .collect();
    let mut order: Vec<usize> = (0..b).collect();
    order.sort_by(|&i, &j| dist[i].total_cmp(&dist[j]).then(i.cmp(&j)));
    order.truncate(b - drop);
    Ok(order)
}

/// Per-horizon min/max over the retained paths. The envelope is not forced
/// to contain the centre.
pub fn np_heuristic_region(center: &[f64], paths: &[Vec<f64>], alpha: f64) -> Result<JointRegion> {
    let keep = np_retained(center, paths, alpha)?;
    let h = center.len();
    let mut lower = vec![f64::INFINITY; h];
    let mut upper = vec![f64::NEG_INFINITY; h];
    for &i in &keep {
        for (j, v) in paths[i].iter().enumerate() {
            lower[j] = lower[j].min(*v);
            upper[j] = upper[j].max(*v);
        }
    }
    JointRegion::new(lower, upper, center.to_vec(), Method::Np, alpha, 1, Sided::Two)
}
