//! Numeric kernels shared by every other module: the series container,
//! autocorrelation and portmanteau tests, order statistics, the χ² inverse,
//! Cholesky factorisation, differencing and the seeded random source.

mod chi2;
mod correlation;
mod diff;
mod matrix;
mod order;
mod random;

pub use chi2::{chi_square_cdf, chi_square_quantile};
pub use correlation::{
    acf, box_pierce, durbin_levinson, ljung_box, pacf, CorrelationSequence, PortmanteauTest,
};
pub use diff::{
    difference, difference_values, integrate_future, invert_difference, DifferencingPlan,
};
pub use matrix::{cholesky, SquareMatrix};
pub use order::{empirical_quantile, k_max, k_min};
pub(crate) use order::ceil_rank;
pub use random::{mix_seed, RandomSource};

use crate::error::{Error, Result};

/// Ordered real-valued observations at a fixed sampling rate.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    period: Option<usize>,
}

impl TimeSeries {
    /// Builds a series, rejecting empty input and non-finite values.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            values,
            period: None,
        })
    }

    /// Attaches a seasonal period; it must satisfy `2 <= period <= len / 2`.
    pub fn with_period(mut self, period: usize) -> Result<Self> {
        if period < 2 || period > self.values.len() / 2 {
            return Err(Error::PeriodInvalid {
                period,
                len: self.values.len(),
            });
        }
        self.period = Some(period);
        Ok(self)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn period(&self) -> Option<usize> {
        self.period
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; a series holds at least one observation.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The first `n` observations as a new series (period dropped if it no
    /// longer fits).
    pub fn head(&self, n: usize) -> Result<Self> {
        let n = n.min(self.values.len());
        let mut out = Self::new(self.values[..n].to_vec())?;
        if let Some(p) = self.period {
            if p <= n / 2 {
                out.period = Some(p);
            }
        }
        Ok(out)
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation with divisor `n - 1`.
pub(crate) fn sample_sd(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() as f64 - 1.0)).sqrt()
}
