use crate::error::{Error, Result};

/// 1-based rank `⌈p·B⌉` clamped to `[1, B]`.
///
/// Products that land within 1e-9 of an integer are treated as that integer so
/// that e.g. `0.3 * 10` selects the third order statistic rather than the
/// fourth.
pub(crate) fn ceil_rank(p: f64, b: usize) -> usize {
    let x = p * b as f64;
    let nearest = x.round();
    let rank = if (x - nearest).abs() < 1e-9 {
        nearest
    } else {
        x.ceil()
    };
    (rank.max(1.0) as usize).min(b)
}

/// The `⌈p·B⌉`-th order statistic of `samples` (no interpolation).
pub fn empirical_quantile(samples: &[f64], p: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::POutOfRange(p));
    }
    let rank = ceil_rank(p, samples.len());
    let mut buf = samples.to_vec();
    Ok(select(&mut buf, rank - 1))
}

/// k-th largest element, `X_(H-k+1)`.
pub fn k_max(values: &[f64], k: usize) -> Result<f64> {
    let len = values.len();
    if k == 0 || k > len {
        return Err(Error::KOutOfRange { k, len });
    }
    let mut buf = values.to_vec();
    Ok(select(&mut buf, len - k))
}

/// k-th smallest element, `X_(k)`.
pub fn k_min(values: &[f64], k: usize) -> Result<f64> {
    let len = values.len();
    if k == 0 || k > len {
        return Err(Error::KOutOfRange { k, len });
    }
    let mut buf = values.to_vec();
    Ok(select(&mut buf, k - 1))
}

/// 0-based order statistic; reorders `buf`.
pub(crate) fn select(buf: &mut [f64], index: usize) -> f64 {
    *buf.select_nth_unstable_by(index, f64::total_cmp).1
}
