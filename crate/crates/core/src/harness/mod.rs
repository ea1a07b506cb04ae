//! Synthetic data, the rolling-window coverage/width protocol and report
//! emission.

mod config;
mod io;

pub use config::{parse_bootstrap, parse_forecaster, ExperimentConfig, DEFAULT_MAX_AR_ORDER};
pub use io::{read_series, read_series_csv, write_series_csv};

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forecasters::{load_external_forecasts, PathForecast};
use crate::regions::{bootstrap_errors, contains, geometric_width, BootstrapConfig, JointRegion, Method, Sided};
use crate::series::{mix_seed, RandomSource, TimeSeries};

/// Trend plus a repeating seasonal pulse plus Gaussian noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub length: usize,
    pub period: usize,
    pub baseline: f64,
    pub slope: f64,
    pub amplitude: f64,
    pub noise_sd: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            length: 3651,
            period: 30,
            baseline: 10.0,
            slope: 0.05,
            amplitude: 40.0,
            noise_sd: 5.0,
            seed: 0,
        }
    }
}

/// Seasonal shape over one period: a cosine swing for the first 40% of the
/// cycle, then exponential decay.
pub fn seasonal_shape(phase: f64) -> f64 {
    if phase < 0.4 {
        (2.0 * PI * phase).cos()
    } else {
        (-3.0 * phase).exp()
    }
}

/// `y_t = baseline + slope·t + amplitude·g(t mod p / p) + N(0, noise_sd²)`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<TimeSeries> {
    if spec.period == 0 || spec.length < 4 * spec.period {
        return Err(Error::InvalidArgument(format!(
            "length {} must be at least 4 periods of {}",
            spec.length, spec.period
        )));
    }
    let bad_sd = || Error::InvalidArgument(format!("noise_sd {} must be >= 0", spec.noise_sd));
    if spec.noise_sd.is_nan() || spec.noise_sd < 0.0 {
        return Err(bad_sd());
    }
    let noise = Normal::new(0.0, spec.noise_sd).map_err(|_| bad_sd())?;
    let mut rng = RandomSource::new(spec.seed, 0);
    let p = spec.period as f64;
    let values = (0..spec.length)
        .map(|t| {
            let phase = (t % spec.period) as f64 / p;
            spec.baseline + spec.slope * t as f64 + spec.amplitude * seasonal_shape(phase) + noise.sample(&mut rng)
        })
        .collect();
    TimeSeries::new(values)?.with_period(spec.period)
}

/// Which region a result belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub method: Method,
    pub alpha: f64,
    pub k: usize,
    pub horizon: usize,
}

impl Cell {
    // α is positive, so its bit pattern orders like the value
    fn sort_key(&self) -> (&'static str, u64, usize, usize) {
        (self.method.name(), self.alpha.to_bits(), self.k, self.horizon)
    }
}

/// What a region builder sees for one window.
#[derive(Debug, Clone, Copy)]
pub struct Window<'a> {
    pub index: usize,
    pub train: &'a [f64],
    /// Seed for this window's bootstrap, derived from the master seed.
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellResult {
    pub cell: Cell,
    pub successes: usize,
    pub n_windows: usize,
    /// Arithmetic mean of the per-window geometric widths; infinite when
    /// any window's region is unbounded.
    pub mean_geom_width: f64,
}

impl CellResult {
    pub fn coverage(&self) -> f64 {
        self.successes as f64 / self.n_windows as f64
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalReport {
    pub cells: Vec<CellResult>,
}

impl EvalReport {
    pub fn get(&self, method: Method, alpha: f64, k: usize, horizon: usize) -> Option<&CellResult> {
        self.cells.iter().find(|c| {
            c.cell.method == method && c.cell.alpha == alpha && c.cell.k == k && c.cell.horizon == horizon
        })
    }

    /// `method,alpha,k,H,coverage,mean_geom_width`, sorted by those four
    /// keys, coverage as a success count.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        if self.cells.is_empty() {
            return Err(Error::EmptyReport);
        }
        let mut rows: Vec<&CellResult> = self.cells.iter().collect();
        rows.sort_by(|a, b| a.cell.sort_key().cmp(&b.cell.sort_key()));
        let mut w = csv::Writer::from_writer(&mut out);
        let io = |e: csv::Error| Error::io("<report>", e.into());
        w.write_record(["method", "alpha", "k", "H", "coverage", "mean_geom_width"])
            .map_err(io)?;
        for r in rows {
            w.write_record([
                r.cell.method.name().to_string(),
                r.cell.alpha.to_string(),
                r.cell.k.to_string(),
                r.cell.horizon.to_string(),
                r.successes.to_string(),
                r.mean_geom_width.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::io("<report>", e))
    }
}

pub fn emit_report(report: &EvalReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if report.cells.is_empty() {
        return Err(Error::EmptyReport);
    }
    let mut buf = Vec::new();
    report.write_csv(&mut buf)?;
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Every configured cell with `k ≤ H`.
pub fn cells(config: &ExperimentConfig) -> Vec<Cell> {
    let mut out = Vec::new();
    for &method in &config.methods {
        for &alpha in &config.alphas {
            for &horizon in &config.horizons {
                for &k in config.ks.iter().filter(|&&k| k <= horizon) {
                    out.push(Cell {
                        method,
                        alpha,
                        k,
                        horizon,
                    });
                }
            }
        }
    }
    out
}

/// Runs the rolling-window protocol with the configured forecaster and
/// bootstrap. Each window draws one bootstrap at the largest horizon and
/// builds every cell's region from it.
pub fn rolling_eval(series: &TimeSeries, config: &ExperimentConfig) -> Result<EvalReport> {
    let external: Option<Vec<PathForecast>> = config
        .external
        .as_ref()
        .map(load_external_forecasts)
        .transpose()?;
    if let Some(ext) = &external {
        if ext.len() < config.n_windows {
            return Err(Error::InvalidArgument(format!(
                "external forecasts cover {} windows, need {}",
                ext.len(),
                config.n_windows
            )));
        }
        if let Some(f) = ext.first().filter(|f| f.horizon() < config.max_horizon()) {
            return Err(Error::InvalidArgument(format!(
                "external forecasts reach horizon {}, need {}",
                f.horizon(),
                config.max_horizon()
            )));
        }
    }
    let all = cells(config);
    let boot = BootstrapConfig {
        horizon: config.max_horizon(),
        replicates: config.replicates,
        sigma_mode: config.sigma_mode,
        seed: 0,
    };
    rolling_eval_with(series, config, |w| {
        let mut run = bootstrap_errors(
            w.train,
            &config.forecaster,
            &config.bootstrap,
            &BootstrapConfig { seed: w.seed, ..boot },
        )?;
        if let Some(ext) = &external {
            run = run.with_point(ext[w.index].truncated(boot.horizon).point)?;
        }
        let mut regions = Vec::with_capacity(all.len());
        for &h in &config.horizons {
            let lead = run.leading(h)?;
            for &method in &config.methods {
                for &alpha in &config.alphas {
                    let shared = if method.uses_k() {
                        None
                    } else {
                        Some(lead.region(method, alpha, 1, Sided::Two)?)
                    };
                    for &k in config.ks.iter().filter(|&&k| k <= h) {
                        let r = match &shared {
                            Some(r) => r.clone().with_k(k)?,
                            None => lead.region(method, alpha, k, Sided::Two)?,
                        };
                        regions.push((
                            Cell {
                                method,
                                alpha,
                                k,
                                horizon: h,
                            },
                            r,
                        ));
                    }
                }
            }
        }
        Ok(regions)
    })
}

/// The protocol with a caller-supplied region builder. Window `i` trains on
/// `[i·step, i·step + window_len)` and is scored on the next `H` values;
/// its seed is `mix_seed(config.seed, i)`. Windows run on the current rayon
/// pool and are reduced in window order, so results do not depend on the
/// thread count.
pub fn rolling_eval_with<F>(series: &TimeSeries, config: &ExperimentConfig, build: F) -> Result<EvalReport>
where
    F: Fn(&Window<'_>) -> Result<Vec<(Cell, JointRegion)>> + Sync,
{
    config.validate(series.len())?;
    let y = series.values();
    let per_window: Vec<Vec<(Cell, bool, f64)>> = (0..config.n_windows)
        .into_par_iter()
        .map(|i| {
            let start = i * config.step;
            let end = start + config.window_len;
            let window = Window {
                index: i,
                train: &y[start..end],
                seed: mix_seed(config.seed, i as u64),
            };
            build(&window)?
                .into_iter()
                .map(|(cell, region)| {
                    let truth = &y[end..end + region.horizon()];
                    let hit = contains(&region, truth, cell.k)?.success;
                    let width = match geometric_width(&region) {
                        Ok(w) => w,
                        Err(Error::InfiniteBound(_)) => f64::INFINITY,
                        Err(e) => return Err(e),
                    };
                    Ok((cell, hit, width))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    // successes and width total per cell, in report order
    let mut acc: BTreeMap<_, (Cell, usize, f64)> = BTreeMap::new();
    for window in &per_window {
        for &(cell, hit, width) in window {
            let e = acc.entry(cell.sort_key()).or_insert((cell, 0, 0.0));
            e.1 += usize::from(hit);
            e.2 += width;
        }
    }
    let n = config.n_windows;
    Ok(EvalReport {
        cells: acc
            .into_values()
            .map(|(cell, successes, total)| CellResult {
                cell,
                successes,
                n_windows: n,
                mean_geom_width: total / n as f64,
            })
            .collect(),
    })
}
