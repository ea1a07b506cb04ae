//! Bootstrap k-FWE joint prediction regions.

use rayon::prelude::*;

use super::{JointRegion, Method, Sided};
use crate::bootstrap::{BootstrapSpec, Bootstrapper};
use crate::error::{Error, Result};
use crate::forecasters::ForecasterSpec;
use crate::series::{empirical_quantile, k_max, k_min, mix_seed, sample_sd};

/// Inner replicate count for the double bootstrap when none is given.
pub const DEFAULT_INNER_REPLICATES: usize = 100;

/// `B × H` matrix of replicate prediction errors (raw or standardized),
/// row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

/// Rows are `ŝ*_b(1..H) = û*_b(h) / σ̂*_b(h)`.
pub type StandardizedErrorMatrix = ErrorMatrix;

impl ErrorMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 replicates, got {rows}"
            )));
        }
        if cols == 0 {
            return Err(Error::InvalidArgument("horizon must be at least 1".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::MatrixShape {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        if let Some(i) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some((index, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::HorizonMismatch {
                index,
                expected: cols,
                got: r.len(),
            });
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, b: usize) -> &[f64] {
        &self.entries[b * self.cols..(b + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.cols)
    }

    pub fn column(&self, h: usize) -> Vec<f64> {
        self.iter_rows().map(|r| r[h]).collect()
    }

    /// The first `h` columns.
    pub fn leading(&self, h: usize) -> Result<Self> {
        if h == 0 || h > self.cols {
            return Err(Error::InvalidArgument(format!(
                "cannot take {h} of {} columns",
                self.cols
            )));
        }
        let entries = self.iter_rows().flat_map(|r| r[..h].iter().copied()).collect();
        Self::new(self.rows, h, entries)
    }

    /// Divides column `h` by `sigma[h]`.
    pub fn standardize(&self, sigma: &SigmaEstimate) -> Result<Self> {
        let s = sigma.values();
        if s.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                got: s.len(),
            });
        }
        let entries = self
            .iter_rows()
            .flat_map(|r| r.iter().zip(s).map(|(u, s)| u / s))
            .collect();
        Self::new(self.rows, self.cols, entries)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaMethod {
    BootstrapSd,
    DoubleBootstrap,
    Shared,
}

/// Prediction standard errors `σ̂_T(1..H)`, all positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaEstimate {
    sigma: Vec<f64>,
    pub method: SigmaMethod,
}

impl SigmaEstimate {
    pub fn new(sigma: Vec<f64>, method: SigmaMethod) -> Result<Self> {
        if let Some(h) = sigma.iter().position(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::DegenerateColumn(h));
        }
        Ok(Self { sigma, method })
    }

    pub fn values(&self) -> &[f64] {
        &self.sigma
    }

    pub fn leading(&self, h: usize) -> Self {
        Self {
            sigma: self.sigma[..h].to_vec(),
            method: self.method,
        }
    }
}

/// Column standard deviations (divisor `B - 1`).
pub fn estimate_sigma(errors: &ErrorMatrix) -> Result<SigmaEstimate> {
    let sigma = (0..errors.cols())
        .map(|h| sample_sd(&errors.column(h)))
        .collect();
    SigmaEstimate::new(sigma, SigmaMethod::BootstrapSd)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierSet {
    /// `1 - α` quantile of `k-max |ŝ*_b|`.
    pub d_abs_kmax: f64,
    /// `1 - α` quantile of `k-max ŝ*_b`.
    pub d_kmax: f64,
    /// `α` quantile of `k-min ŝ*_b`.
    pub d_kmin: f64,
}

/// Bootstrap multipliers from the per-replicate k-max / k-min statistics.
pub fn kfwe_multipliers(s: &StandardizedErrorMatrix, k: usize, alpha: f64) -> Result<MultiplierSet> {
    if k == 0 || k > s.cols() {
        return Err(Error::KOutOfRange { k, len: s.cols() });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::POutOfRange(alpha));
    }
    let mut abs_max = Vec::with_capacity(s.rows());
    let mut max = Vec::with_capacity(s.rows());
    let mut min = Vec::with_capacity(s.rows());
    let mut buf = Vec::with_capacity(s.cols());
    for row in s.iter_rows() {
        buf.clear();
        buf.extend(row.iter().map(|v| v.abs()));
        abs_max.push(k_max(&buf, k)?);
        max.push(k_max(row, k)?);
        min.push(k_min(row, k)?);
    }
    Ok(MultiplierSet {
        d_abs_kmax: empirical_quantile(&abs_max, 1.0 - alpha)?,
        d_kmax: empirical_quantile(&max, 1.0 - alpha)?,
        d_kmin: empirical_quantile(&min, alpha)?,
    })
}

/// Region from precomputed point forecasts, standard errors and standardized
/// replicate errors.
pub fn kfwe_region_from_errors(
    point: &[f64],
    sigma: &SigmaEstimate,
    s: &StandardizedErrorMatrix,
    k: usize,
    alpha: f64,
    sided: Sided,
) -> Result<JointRegion> {
    let h = point.len();
    for got in [sigma.values().len(), s.cols()] {
        if got != h {
            return Err(Error::LengthMismatch { expected: h, got });
        }
    }
    let d = kfwe_multipliers(s, k, alpha)?;
    let sd = sigma.values();
    let (lower, upper) = match sided {
        Sided::Two => (
            (0..h).map(|i| point[i] - d.d_abs_kmax * sd[i]).collect(),
            (0..h).map(|i| point[i] + d.d_abs_kmax * sd[i]).collect(),
        ),
        Sided::Lower => (
            (0..h).map(|i| point[i] - d.d_kmax * sd[i]).collect(),
            vec![f64::INFINITY; h],
        ),
        Sided::Upper => (
            vec![f64::NEG_INFINITY; h],
            (0..h).map(|i| point[i] - d.d_kmin * sd[i]).collect(),
        ),
    };
    JointRegion::new(lower, upper, point.to_vec(), Method::Kfwe, alpha, k, sided)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaMode {
    /// Every replicate is standardized by the outer `σ̂_T`.
    Shared,
    /// Each replicate gets its own `σ̂*_b` from `inner` replicates of itself.
    Double { inner: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapConfig {
    pub horizon: usize,
    pub replicates: usize,
    pub sigma_mode: SigmaMode,
    pub seed: u64,
}

/// Everything the region constructors need from one bootstrap run.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapErrors {
    /// `ŷ_T(1..H)` from the forecaster fit on the full series.
    pub point: Vec<f64>,
    /// Raw errors `û*_b(h) = ŷ*_b(h) - y*_{T+h}`.
    pub errors: ErrorMatrix,
    pub standardized: StandardizedErrorMatrix,
    pub sigma: SigmaEstimate,
    pub train_len: usize,
}

impl BootstrapErrors {
    pub fn horizon(&self) -> usize {
        self.point.len()
    }

    /// Restriction to horizons `1..=h`.
    pub fn leading(&self, h: usize) -> Result<Self> {
        Ok(Self {
            point: self
                .point
                .get(..h)
                .ok_or_else(|| Error::InvalidArgument(format!("horizon {h} exceeds {}", self.horizon())))?
                .to_vec(),
            errors: self.errors.leading(h)?,
            standardized: self.standardized.leading(h)?,
            sigma: self.sigma.leading(h),
            train_len: self.train_len,
        })
    }

    /// Replaces the central path, e.g. with an externally produced forecast.
    pub fn with_point(mut self, point: Vec<f64>) -> Result<Self> {
        if point.len() != self.horizon() {
            return Err(Error::LengthMismatch {
                expected: self.horizon(),
                got: point.len(),
            });
        }
        self.point = point;
        Ok(self)
    }
}

fn replicate_errors(
    bootstrapper: &Bootstrapper,
    forecaster: &ForecasterSpec,
    train_len: usize,
    horizon: usize,
    seed: u64,
    stream: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let rep = bootstrapper.replicate(train_len + horizon, seed, stream)?;
    let (model, _) = forecaster.fit(&rep.values[..train_len])?;
    let f = model.forecast(horizon)?;
    let errors = (0..horizon)
        .map(|h| f.point[h] - rep.values[train_len + h])
        .collect();
    Ok((errors, rep.values))
}

/// Runs steps 1-5 of the k-FWE algorithm: `B` replicates of length `T + H`,
/// a refit on each replicate's first `T` values, and the resulting forecast
/// errors, standardized per the sigma mode.
///
/// Replicate `b` uses stream `b` of `seed`; the double bootstrap's inner
/// replicates for `b` use streams `0..inner` of `mix_seed(seed, b)`. Work is
/// spread over the current rayon pool and collected in replicate order, so
/// results do not depend on the thread count.
pub fn bootstrap_errors(
    series: &[f64],
    forecaster: &ForecasterSpec,
    bootstrap: &BootstrapSpec,
    config: &BootstrapConfig,
) -> Result<BootstrapErrors> {
    let t = series.len();
    let h = config.horizon;
    let b = config.replicates;
    if h == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    if b < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 replicates, got {b}"
        )));
    }
    let (model, _) = forecaster.fit(series)?;
    let point = model.forecast(h)?.point;
    let outer = Bootstrapper::new(*bootstrap, series)?;

    let rows: Vec<(Vec<f64>, Option<Vec<f64>>)> = (0..b as u64)
        .into_par_iter()
        .map(|stream| {
            let (errors, values) = replicate_errors(&outer, forecaster, t, h, config.seed, stream)?;
            let own_sigma = match config.sigma_mode {
                SigmaMode::Shared => None,
                SigmaMode::Double { inner } => {
                    if inner < 2 {
                        return Err(Error::InvalidArgument(format!(
                            "need at least 2 inner replicates, got {inner}"
                        )));
                    }
                    let inner_boot = Bootstrapper::new(*bootstrap, &values[..t])?;
                    let inner_seed = mix_seed(config.seed, stream);
                    let mut flat = Vec::with_capacity(inner * h);
                    for i in 0..inner as u64 {
                        let (e, _) =
                            replicate_errors(&inner_boot, forecaster, t, h, inner_seed, i)?;
                        flat.extend(e);
                    }
                    let m = ErrorMatrix::new(inner, h, flat)?;
                    Some(estimate_sigma(&m)?.sigma)
                }
            };
            Ok((errors, own_sigma))
        })
        .collect::<Result<_>>()?;

    let errors = ErrorMatrix::new(b, h, rows.iter().flat_map(|(e, _)| e.iter().copied()).collect())?;
    let outer_sigma = estimate_sigma(&errors)?;
    let (standardized, sigma) = match config.sigma_mode {
        SigmaMode::Shared => {
            let sigma = SigmaEstimate {
                method: SigmaMethod::Shared,
                ..outer_sigma
            };
            (errors.standardize(&sigma)?, sigma)
        }
        SigmaMode::Double { .. } => {
            let entries = rows
                .iter()
                .flat_map(|(e, s)| {
                    let s = s.as_ref().expect("double mode sets every row's sigma");
                    e.iter().zip(s).map(|(u, s)| u / s)
                })
                .collect();
            let sigma = SigmaEstimate {
                method: SigmaMethod::DoubleBootstrap,
                ..outer_sigma
            };
            (ErrorMatrix::new(b, h, entries)?, sigma)
        }
    };
    Ok(BootstrapErrors {
        point,
        errors,
        standardized,
        sigma,
        train_len: t,
    })
}

/// The k-FWE joint prediction region for the next `config.horizon` values of
/// `series`.
pub fn kfwe_region(
    series: &[f64],
    forecaster: &ForecasterSpec,
    bootstrap: &BootstrapSpec,
    config: &BootstrapConfig,
    k: usize,
    alpha: f64,
    sided: Sided,
) -> Result<JointRegion> {
    if config.replicates < 100 {
        return Err(Error::InvalidArgument(format!(
            "k-FWE regions need at least 100 replicates, got {}",
            config.replicates
        )));
    }
    if k == 0 || k > config.horizon {
        return Err(Error::KOutOfRange {
            k,
            len: config.horizon,
        });
    }
    let run = bootstrap_errors(series, forecaster, bootstrap, config)?;
    kfwe_region_from_errors(&run.point, &run.sigma, &run.standardized, k, alpha, sided)
}
