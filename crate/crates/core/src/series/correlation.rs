use super::chi2::chi_square_cdf;
use super::mean;
use crate::error::{Error, Result};

/// Correlation coefficients indexed by lag, starting at lag 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSequence(Vec<f64>);

impl CorrelationSequence {
    pub fn new(coefficients: Vec<f64>) -> Self {
        Self(coefficients)
    }

    /// Coefficient at `lag` (1-based). Lag 0 is 1 by convention.
    pub fn at(&self, lag: usize) -> f64 {
        if lag == 0 {
            1.0
        } else {
            self.0[lag - 1]
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Sample autocorrelations at lags `1..=max_lag`, normalised by the lag-0
/// sum of squares.
pub fn acf(series: &[f64], max_lag: usize) -> Result<CorrelationSequence> {
    let n = series.len();
    if max_lag == 0 {
        return Err(Error::InvalidArgument("max_lag must be positive".into()));
    }
    if max_lag >= n {
        return Err(Error::LagTooLarge { lag: max_lag, len: n });
    }
    let m = mean(series);
    let centered: Vec<f64> = series.iter().map(|x| x - m).collect();
    let denom: f64 = centered.iter().map(|x| x * x).sum();
    if denom <= 0.0 || !denom.is_normal() {
        return Err(Error::ConstantSeries);
    }
    let coefficients = (1..=max_lag)
        .map(|k| {
            let num: f64 = centered[k..]
                .iter()
                .zip(&centered[..n - k])
                .map(|(a, b)| a * b)
                .sum();
            num / denom
        })
        .collect();
    Ok(CorrelationSequence(coefficients))
}

/// Solves the Yule-Walker system for autocorrelations `r[0..order]` (lags
/// 1..=order). Returns the order-`order` AR coefficients and the partial
/// autocorrelations at lags 1..=order.
pub fn durbin_levinson(r: &[f64], order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if order > r.len() {
        return Err(Error::LagTooLarge {
            lag: order,
            len: r.len(),
        });
    }
    let mut phi: Vec<f64> = Vec::with_capacity(order);
    let mut partial = Vec::with_capacity(order);
    let mut v = 1.0;
    for k in 0..order {
        let acc: f64 = phi.iter().enumerate().map(|(j, p)| p * r[k - 1 - j]).sum();
        if v <= f64::EPSILON {
            return Err(Error::SingularSystem);
        }
        let reflection = (r[k] - acc) / v;
        let prev = phi.clone();
        for j in 0..k {
            phi[j] = prev[j] - reflection * prev[k - 1 - j];
        }
        phi.push(reflection);
        partial.push(reflection);
        v *= 1.0 - reflection * reflection;
    }
    Ok((phi, partial))
}

/// Partial autocorrelations at lags `1..=max_lag` via Durbin-Levinson.
pub fn pacf(series: &[f64], max_lag: usize) -> Result<CorrelationSequence> {
    let r = acf(series, max_lag)?;
    let (_, partial) = durbin_levinson(r.as_slice(), max_lag)?;
    Ok(CorrelationSequence(partial))
}

/// Outcome of a portmanteau test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortmanteauTest {
    pub statistic: f64,
    pub p_value: f64,
    pub degrees_of_freedom: usize,
}

fn check_portmanteau(n: usize, max_lag: usize, fitted_params: usize) -> Result<usize> {
    if max_lag >= n {
        return Err(Error::LagTooLarge { lag: max_lag, len: n });
    }
    if max_lag <= fitted_params {
        return Err(Error::DegreesOfFreedomNonPositive {
            max_lag,
            params: fitted_params,
        });
    }
    Ok(max_lag - fitted_params)
}

fn finish(statistic: f64, df: usize) -> PortmanteauTest {
    PortmanteauTest {
        statistic,
        p_value: (1.0 - chi_square_cdf(df as f64, statistic)).clamp(0.0, 1.0),
        degrees_of_freedom: df,
    }
}

/// Ljung-Box statistic `n(n+2) Σ r_k² / (n-k)` computed from autocorrelations
/// at lags 1..=K of a series of length `n`.
pub fn ljung_box_from_acf(r: &[f64], n: usize, fitted_params: usize) -> Result<PortmanteauTest> {
    let df = check_portmanteau(n, r.len(), fitted_params)?;
    let nf = n as f64;
    let sum: f64 = r
        .iter()
        .enumerate()
        .map(|(i, rk)| rk * rk / (nf - (i + 1) as f64))
        .sum();
    Ok(finish(nf * (nf + 2.0) * sum, df))
}

/// Box-Pierce statistic `n Σ r_k²`.
pub fn box_pierce_from_acf(r: &[f64], n: usize, fitted_params: usize) -> Result<PortmanteauTest> {
    let df = check_portmanteau(n, r.len(), fitted_params)?;
    let sum: f64 = r.iter().map(|rk| rk * rk).sum();
    Ok(finish(n as f64 * sum, df))
}

pub fn ljung_box(residuals: &[f64], max_lag: usize, fitted_params: usize) -> Result<PortmanteauTest> {
    check_portmanteau(residuals.len(), max_lag, fitted_params)?;
    let r = acf(residuals, max_lag)?;
    ljung_box_from_acf(r.as_slice(), residuals.len(), fitted_params)
}

pub fn box_pierce(residuals: &[f64], max_lag: usize, fitted_params: usize) -> Result<PortmanteauTest> {
    check_portmanteau(residuals.len(), max_lag, fitted_params)?;
    let r = acf(residuals, max_lag)?;
    box_pierce_from_acf(r.as_slice(), residuals.len(), fitted_params)
}
