//! Autoregressive models with optional simple and seasonal differencing.

use rand::Rng;

use super::{gaussian_fit_report, FitReport, InnovationSampler, PathForecast};
use crate::error::{Error, Result};
use crate::series::{acf, durbin_levinson, mean, DifferencingPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArMethod {
    YuleWalker,
    Ols,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    Aic,
    Bic,
}

/// Fitted `AR(p)` on the (possibly differenced) series.
#[derive(Debug, Clone, PartialEq)]
pub struct ArModel {
    pub order: usize,
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub innovation_sd: f64,
    pub d: usize,
    pub seasonal_d: usize,
    pub period: usize,
    pub method: ArMethod,
    /// In-sample residuals on the differenced scale, one per usable
    /// observation after the first `order` lags.
    pub residuals: Vec<f64>,
    plan: DifferencingPlan,
    /// Training observations on the original scale.
    history: Vec<f64>,
    /// Training observations after differencing.
    differenced: Vec<f64>,
}

/// Householder QR least squares; returns `None` when the design is rank
/// deficient.
fn least_squares(rows: usize, cols: usize, mut a: Vec<f64>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    // a is row-major rows×cols
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    for k in 0..cols {
        let norm: f64 = (k..rows).map(|i| a[i * cols + k].powi(2)).sum::<f64>().sqrt();
        if norm <= 1e-12 * scale * (rows as f64).sqrt() {
            return None;
        }
        let alpha = if a[k * cols + k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..rows).map(|i| a[i * cols + k]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k..cols {
            let dot: f64 = (k..rows).map(|i| v[i - k] * a[i * cols + j]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k..rows {
                a[i * cols + j] -= f * v[i - k];
            }
        }
        let dot: f64 = (k..rows).map(|i| v[i - k] * b[i]).sum();
        let f = 2.0 * dot / vnorm2;
        for i in k..rows {
            b[i] -= f * v[i - k];
        }
    }
    let mut x = vec![0.0; cols];
    for k in (0..cols).rev() {
        let s: f64 = (k + 1..cols).map(|j| a[k * cols + j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k * cols + k];
    }
    Some(x)
}

fn residuals_of(y: &[f64], p: usize, intercept: f64, phi: &[f64]) -> Vec<f64> {
    (p..y.len())
        .map(|t| {
            let fit: f64 = phi.iter().enumerate().map(|(i, c)| c * y[t - 1 - i]).sum();
            y[t] - intercept - fit
        })
        .collect()
}

/// Fits `AR(p)` with intercept by Yule-Walker or by least squares on
/// `(1, y_{t-1}, …, y_{t-p})`.
pub fn fit_ar(series: &[f64], p: usize, method: ArMethod) -> Result<(ArModel, FitReport)> {
    fit_ari(series, p, 0, 0, 0, method)
}

/// Differences (`d` simple then `seasonal_d` seasonal at `period`) and fits
/// `AR(p)` to the result.
pub fn fit_ari(
    series: &[f64],
    p: usize,
    d: usize,
    seasonal_d: usize,
    period: usize,
    method: ArMethod,
) -> Result<(ArModel, FitReport)> {
    if seasonal_d > 0 && period < 2 {
        return Err(Error::PeriodInvalid {
            period,
            len: series.len(),
        });
    }
    let plan = DifferencingPlan::new(d, seasonal_d, period);
    let needed = plan.span() + 2 * p + 2;
    if series.len() < needed {
        return Err(Error::SeriesTooShort {
            len: series.len(),
            needed,
        });
    }
    let y = plan.apply(series)?;
    let (intercept, phi) = if p == 0 {
        (mean(&y), Vec::new())
    } else {
        match method {
            ArMethod::YuleWalker => {
                let r = acf(&y, p)?;
                let (phi, _) = durbin_levinson(r.as_slice(), p)?;
                let c = mean(&y) * (1.0 - phi.iter().sum::<f64>());
                (c, phi)
            }
            ArMethod::Ols => {
                let rows = y.len() - p;
                let cols = p + 1;
                let mut a = Vec::with_capacity(rows * cols);
                let mut b = Vec::with_capacity(rows);
                for t in p..y.len() {
                    a.push(1.0);
                    a.extend((1..=p).map(|i| y[t - i]));
                    b.push(y[t]);
                }
                let beta = least_squares(rows, cols, a, b).ok_or(Error::SingularSystem)?;
                (beta[0], beta[1..].to_vec())
            }
        }
    };
    let residuals = residuals_of(&y, p, intercept, &phi);
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let n_eff = residuals.len();
    let report = gaussian_fit_report(rss, n_eff, p + 2);
    let model = ArModel {
        order: p,
        coefficients: phi,
        intercept,
        innovation_sd: (rss / n_eff as f64).sqrt(),
        d,
        seasonal_d,
        period,
        method,
        residuals,
        plan,
        history: series.to_vec(),
        differenced: y,
    };
    Ok((model, report))
}

/// Fits every candidate order and keeps the one minimising `criterion`;
/// ties go to the smaller order.
///
/// Criteria are compared on a common sample: every fit is scored on the
/// residuals of the last `n - p_max` differenced observations, where `p_max`
/// is the largest order that could be fitted. The returned report is that
/// common-sample score.
pub fn select_order(
    series: &[f64],
    candidates: &[usize],
    d: usize,
    seasonal_d: usize,
    period: usize,
    criterion: Criterion,
    method: ArMethod,
) -> Result<(ArModel, FitReport)> {
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("no candidate orders".into()));
    }
    let mut orders = candidates.to_vec();
    orders.sort_unstable();
    orders.dedup();
    let fits: Vec<ArModel> = orders
        .into_iter()
        .filter_map(|p| fit_ari(series, p, d, seasonal_d, period, method).ok())
        .map(|(m, _)| m)
        .collect();
    let common = fits
        .iter()
        .map(|m| m.residuals.len())
        .min()
        .ok_or(Error::AllFitsFailed)?;
    let mut best: Option<(ArModel, FitReport)> = None;
    for model in fits {
        let tail = &model.residuals[model.residuals.len() - common..];
        let rss: f64 = tail.iter().map(|e| e * e).sum();
        let report = gaussian_fit_report(rss, common, model.order + 2);
        let better = match &best {
            None => true,
            Some((_, b)) => report.criterion(criterion) < b.criterion(criterion),
        };
        if better {
            best = Some((model, report));
        }
    }
    best.ok_or(Error::AllFitsFailed)
}

impl ArModel {
    pub fn plan(&self) -> &DifferencingPlan {
        &self.plan
    }

    pub fn history(&self) -> &[f64] {
        &self.history
    }

    /// Next value of the recursion on the differenced scale given the
    /// trailing values `tail` (most recent last) and an innovation.
    fn step(&self, tail: &[f64], eps: f64) -> f64 {
        let n = tail.len();
        self.intercept
            + self
                .coefficients
                .iter()
                .enumerate()
                .map(|(i, c)| c * tail[n - 1 - i])
                .sum::<f64>()
            + eps
    }

    fn run_forward(&self, length: usize, mut eps: impl FnMut() -> f64) -> Result<Vec<f64>> {
        let p = self.order;
        let mut buf: Vec<f64> = self.differenced[self.differenced.len() - p..].to_vec();
        buf.reserve(length);
        for _ in 0..length {
            let e = eps();
            let v = self.step(&buf, e);
            buf.push(v);
        }
        let future = buf.split_off(p);
        if self.plan.is_identity() {
            Ok(future)
        } else {
            self.plan.integrate(&self.history, &future)
        }
    }

    /// Iterated point forecasts with future innovations set to zero,
    /// mapped back through the differencing.
    pub fn forecast(&self, horizon: usize) -> Result<PathForecast> {
        Ok(PathForecast::new(self.run_forward(horizon, || 0.0)?))
    }

    /// Continues the process `length` steps past the training data.
    pub(crate) fn simulate_with<R: Rng + ?Sized>(
        &self,
        length: usize,
        sampler: &InnovationSampler,
        rng: &mut R,
    ) -> Result<Vec<f64>> {
        self.run_forward(length, || sampler.draw(rng))
    }

    /// Mean of the stationary process on the differenced scale,
    /// `c / (1 - Σφ)`.
    pub fn process_mean(&self) -> f64 {
        self.intercept / (1.0 - self.coefficients.iter().sum::<f64>())
    }
}
