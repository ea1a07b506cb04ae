//! Point forecasters: exponential smoothing and (seasonally) differenced
//! autoregression, with order selection, forward simulation for model-based
//! bootstraps, and ingestion of externally produced path forecasts.

mod ar;
mod external;
mod smoothing;

pub use ar::{fit_ar, fit_ari, select_order, ArMethod, ArModel, Criterion};
pub use external::{load_external_forecasts, parse_external_forecasts};
pub use smoothing::{fit_holt, fit_holt_winters, fit_ses, SmoothingKind, SmoothingState};

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// A smoothing parameter: fixed in `[0, 1]` or chosen by grid search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Param {
    Fixed(f64),
    Auto,
}

/// Point forecasts `ŷ_T(1..=H)` with optional prediction standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct PathForecast {
    pub point: Vec<f64>,
    pub sigma: Option<Vec<f64>>,
}

impl PathForecast {
    pub fn new(point: Vec<f64>) -> Self {
        Self { point, sigma: None }
    }

    pub fn horizon(&self) -> usize {
        self.point.len()
    }

    pub fn with_sigma(mut self, sigma: Vec<f64>) -> Result<Self> {
        if sigma.len() != self.point.len() {
            return Err(Error::LengthMismatch {
                expected: self.point.len(),
                got: sigma.len(),
            });
        }
        if let Some(h) = sigma.iter().position(|s| s.is_nan() || *s <= 0.0) {
            return Err(Error::DegenerateColumn(h));
        }
        self.sigma = Some(sigma);
        Ok(self)
    }

    /// The first `horizon` steps.
    pub fn truncated(&self, horizon: usize) -> Self {
        Self {
            point: self.point[..horizon].to_vec(),
            sigma: self.sigma.as_ref().map(|s| s[..horizon].to_vec()),
        }
    }
}

/// Goodness-of-fit summary with information criteria.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitReport {
    pub log_likelihood: f64,
    pub n_params: usize,
    pub n_obs: usize,
    pub aic: f64,
    pub bic: f64,
}

impl FitReport {
    pub fn new(log_likelihood: f64, n_params: usize, n_obs: usize) -> Self {
        Self {
            log_likelihood,
            n_params,
            n_obs,
            aic: aic(n_params, log_likelihood),
            bic: bic(n_params, n_obs, log_likelihood),
        }
    }

    pub fn criterion(&self, c: Criterion) -> f64 {
        match c {
            Criterion::Aic => self.aic,
            Criterion::Bic => self.bic,
        }
    }
}

/// `2k - 2·loglik`.
pub fn aic(k: usize, log_likelihood: f64) -> f64 {
    2.0 * k as f64 - 2.0 * log_likelihood
}

/// `k·ln(n) - 2·loglik`.
pub fn bic(k: usize, n: usize, log_likelihood: f64) -> f64 {
    k as f64 * (n as f64).ln() - 2.0 * log_likelihood
}

/// Gaussian log-likelihood proxy `-(n/2)(ln(2π σ̂²) + 1)` with `σ̂² = rss / n`.
pub(crate) fn gaussian_fit_report(rss: f64, n: usize, n_params: usize) -> FitReport {
    let nf = n as f64;
    let var = rss / nf;
    let loglik = -0.5 * nf * ((2.0 * std::f64::consts::PI * var).ln() + 1.0);
    FitReport::new(loglik, n_params, n)
}

/// Source of simulation innovations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Innovations {
    /// IID draws, with replacement, from the mean-centred residuals.
    ResampleResiduals,
    /// `N(0, σ̂²)` with the model's innovation standard deviation.
    Gaussian,
}

pub(crate) enum InnovationSampler {
    Resample(Vec<f64>),
    Gaussian(Normal<f64>),
    Zero,
}

impl InnovationSampler {
    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            InnovationSampler::Resample(c) => c[rng.random_range(0..c.len())],
            InnovationSampler::Gaussian(n) => n.sample(rng),
            InnovationSampler::Zero => 0.0,
        }
    }
}

impl Innovations {
    pub(crate) fn sampler(&self, residuals: &[f64], sd: f64) -> Result<InnovationSampler> {
        match self {
            Innovations::ResampleResiduals => {
                if residuals.is_empty() {
                    return Err(Error::NoResiduals);
                }
                let m = residuals.iter().sum::<f64>() / residuals.len() as f64;
                Ok(InnovationSampler::Resample(
                    residuals.iter().map(|e| e - m).collect(),
                ))
            }
            Innovations::Gaussian if sd == 0.0 => Ok(InnovationSampler::Zero),
            Innovations::Gaussian => Normal::new(0.0, sd)
                .map(InnovationSampler::Gaussian)
                .map_err(|e| Error::InvalidArgument(e.to_string())),
        }
    }
}

/// AR order: fixed, or chosen by an information criterion over `0..=max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArOrder {
    Fixed(usize),
    Auto {
        max: usize,
        criterion: Criterion,
    },
}

/// What to fit. Every replicate in a bootstrap is refit with the same spec.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ForecasterSpec {
    Ses {
        alpha: Param,
    },
    Holt {
        alpha: Param,
        beta: Param,
    },
    HoltWinters {
        alpha: Param,
        beta: Param,
        gamma: Param,
        period: usize,
    },
    Ar {
        order: ArOrder,
        d: usize,
        seasonal_d: usize,
        period: usize,
        method: ArMethod,
    },
}

impl ForecasterSpec {
    pub fn fit(&self, series: &[f64]) -> Result<(FittedModel, FitReport)> {
        match *self {
            ForecasterSpec::Ses { alpha } => {
                fit_ses(series, alpha).map(|(s, r)| (FittedModel::Smoothing(s), r))
            }
            ForecasterSpec::Holt { alpha, beta } => {
                fit_holt(series, alpha, beta).map(|(s, r)| (FittedModel::Smoothing(s), r))
            }
            ForecasterSpec::HoltWinters {
                alpha,
                beta,
                gamma,
                period,
            } => fit_holt_winters(series, alpha, beta, gamma, period)
                .map(|(s, r)| (FittedModel::Smoothing(s), r)),
            ForecasterSpec::Ar {
                order,
                d,
                seasonal_d,
                period,
                method,
            } => {
                let (m, r) = match order {
                    ArOrder::Fixed(p) => fit_ari(series, p, d, seasonal_d, period, method)?,
                    ArOrder::Auto { max, criterion } => {
                        let cands: Vec<usize> = (0..=max).collect();
                        select_order(series, &cands, d, seasonal_d, period, criterion, method)?
                    }
                };
                Ok((FittedModel::Ar(m), r))
            }
        }
    }
}

/// A fitted forecaster.
#[derive(Debug, Clone, PartialEq)]
pub enum FittedModel {
    Smoothing(SmoothingState),
    Ar(ArModel),
}

impl FittedModel {
    pub fn residuals(&self) -> &[f64] {
        match self {
            FittedModel::Smoothing(s) => &s.residuals,
            FittedModel::Ar(m) => &m.residuals,
        }
    }

    pub fn forecast(&self, horizon: usize) -> Result<PathForecast> {
        forecast_path(self, horizon)
    }

    pub fn simulate<R: Rng + ?Sized>(
        &self,
        length: usize,
        innovations: Innovations,
        rng: &mut R,
    ) -> Result<Vec<f64>> {
        simulate(self, length, innovations, rng)
    }
}

/// H-step path forecast; prediction standard errors are left unset.
pub fn forecast_path(model: &FittedModel, horizon: usize) -> Result<PathForecast> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    match model {
        FittedModel::Smoothing(s) => Ok(s.forecast(horizon)),
        FittedModel::Ar(m) => m.forecast(horizon),
    }
}

/// Runs the fitted recursion forward `length` steps from the terminal state.
pub fn simulate<R: Rng + ?Sized>(
    model: &FittedModel,
    length: usize,
    innovations: Innovations,
    rng: &mut R,
) -> Result<Vec<f64>> {
    match model {
        FittedModel::Smoothing(s) => {
            let sd = rms(&s.residuals);
            let sampler = innovations.sampler(&s.residuals, sd)?;
            s.simulate_with(length, &sampler, rng)
        }
        FittedModel::Ar(m) => {
            let sampler = innovations.sampler(&m.residuals, m.innovation_sd)?;
            m.simulate_with(length, &sampler, rng)
        }
    }
}

fn rms(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    (xs.iter().map(|e| e * e).sum::<f64>() / xs.len() as f64).sqrt()
}
