//! Additive seasonal-trend decomposition by centred moving averages, and
//! recomposition of a (possibly longer) remainder with extended trend and
//! seasonal components.

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Additive split `series = trend + seasonal + remainder`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub trend: Vec<f64>,
    pub seasonal: Vec<f64>,
    pub remainder: Vec<f64>,
    pub period: usize,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.trend.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trend.is_empty()
    }

    /// Seasonal effect for phase `t mod period`.
    pub fn seasonal_at(&self, t: usize) -> f64 {
        self.seasonal[t % self.period]
    }
}

/// Least-squares line through `(x0 + i, ys[i])`; returns (intercept at x0, slope).
fn fit_line(ys: &[f64]) -> (f64, f64) {
    let n = ys.len() as f64;
    if ys.len() < 2 {
        return (ys[0], 0.0);
    }
    let xm = (n - 1.0) / 2.0;
    let ym = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (i, y) in ys.iter().enumerate() {
        let dx = i as f64 - xm;
        sxy += dx * (y - ym);
        sxx += dx * dx;
    }
    let slope = sxy / sxx;
    (ym - slope * xm, slope)
}

/// Centred moving average; `None` where the window does not fit.
fn centred_moving_average(values: &[f64], period: usize) -> Vec<Option<f64>> {
    let n = values.len();
    let half = period / 2;
    let mut out = vec![None; n];
    for (t, slot) in out.iter_mut().enumerate().take(n - half).skip(half) {
        let v = if period % 2 == 1 {
            values[t - half..=t + half].iter().sum::<f64>() / period as f64
        } else {
            // 2×m average: half weight on the two extreme points
            let inner: f64 = values[t + 1 - half..t + half].iter().sum();
            (inner + 0.5 * (values[t - half] + values[t + half])) / period as f64
        };
        *slot = Some(v);
    }
    out
}

/// Classical additive decomposition with a `period`-point centred moving
/// average trend (2×m for even m).
///
/// The trend is extended to the ends by the least-squares line through the
/// nearest `period` fitted points. Seasonal effects are the per-phase means
/// of the detrended series over the fitted range, shifted to sum to zero and
/// tiled. The remainder absorbs everything else, so reconstruction is exact.
pub fn classical_decompose(series: &[f64], period: usize) -> Result<Decomposition> {
    let n = series.len();
    if period < 2 {
        return Err(Error::PeriodInvalid { period, len: n });
    }
    if n < 2 * period {
        return Err(Error::SeriesTooShort {
            len: n,
            needed: 2 * period,
        });
    }
    let half = period / 2;
    let ma = centred_moving_average(series, period);
    let first = half;
    let last = n - 1 - half;
    let mut trend = vec![0.0; n];
    for t in first..=last {
        trend[t] = ma[t].expect("inside fitted range");
    }
    let fitted = last - first + 1;
    let w = period.min(fitted);
    let (a, b) = fit_line(&trend[first..first + w]);
    for (t, slot) in trend.iter_mut().enumerate().take(first) {
        *slot = a + b * (t as f64 - first as f64);
    }
    let (a, b) = fit_line(&trend[last + 1 - w..=last]);
    let origin = (last + 1 - w) as f64;
    for (t, slot) in trend.iter_mut().enumerate().skip(last + 1) {
        *slot = a + b * (t as f64 - origin);
    }

    let mut sums = vec![0.0; period];
    let mut counts = vec![0usize; period];
    for t in first..=last {
        sums[t % period] += series[t] - trend[t];
        counts[t % period] += 1;
    }
    let mut phase: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| s / c as f64)
        .collect();
    let centre = phase.iter().sum::<f64>() / period as f64;
    for p in &mut phase {
        *p -= centre;
    }
    let seasonal: Vec<f64> = (0..n).map(|t| phase[t % period]).collect();
    let remainder = (0..n).map(|t| series[t] - trend[t] - seasonal[t]).collect();
    Ok(Decomposition {
        trend,
        seasonal,
        remainder,
        period,
    })
}

/// Convenience wrapper over a [`TimeSeries`].
pub fn decompose_series(series: &TimeSeries, period: usize) -> Result<Decomposition> {
    classical_decompose(series.values(), period)
}

/// Trend and seasonal components extended `extension` steps past the end.
///
/// The trend continues along the least-squares slope of its last
/// `trend_slope_window` points, anchored at the final fitted value; the
/// seasonal component continues periodically.
pub fn extended_baseline(
    decomposition: &Decomposition,
    extension: usize,
    trend_slope_window: usize,
) -> Vec<f64> {
    let n = decomposition.len();
    let w = trend_slope_window.clamp(2, n.max(2)).min(n);
    let (_, slope) = fit_line(&decomposition.trend[n - w..]);
    let last = decomposition.trend[n - 1];
    (0..n + extension)
        .map(|t| {
            let trend = if t < n {
                decomposition.trend[t]
            } else {
                last + slope * (t + 1 - n) as f64
            };
            trend + decomposition.seasonal_at(t)
        })
        .collect()
}

/// Adds `new_remainder` (length `len + extension`) to the extended trend and
/// seasonal components.
pub fn recompose(
    decomposition: &Decomposition,
    new_remainder: &[f64],
    extension: usize,
    trend_slope_window: usize,
) -> Result<Vec<f64>> {
    let expected = decomposition.len() + extension;
    if new_remainder.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            got: new_remainder.len(),
        });
    }
    let base = extended_baseline(decomposition, extension, trend_slope_window);
    Ok(base.iter().zip(new_remainder).map(|(b, r)| b + r).collect())
}
