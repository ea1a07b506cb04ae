//! Additive exponential smoothing: simple, Holt (linear trend) and
//! Holt-Winters (linear trend plus additive seasonality).

use rand::Rng;

use super::{gaussian_fit_report, FitReport, InnovationSampler, Param, PathForecast};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmoothingKind {
    Simple,
    Holt,
    HoltWinters,
}

/// Terminal state of a fitted smoothing model.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingState {
    pub kind: SmoothingKind,
    pub level: f64,
    /// 0 for [`SmoothingKind::Simple`].
    pub trend: f64,
    /// The last `period` seasonal effects, oldest first: `seasonal[i]` belongs
    /// to time `T - period + 1 + i`. Empty unless Holt-Winters.
    pub seasonal: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub period: usize,
    /// One-step-ahead in-sample errors `y_t - ŷ_{t|t-1}`.
    pub residuals: Vec<f64>,
}

/// Smoothing parameters after resolution of `AUTO`.
#[derive(Debug, Clone, Copy)]
struct Params {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

const GRID: std::ops::RangeInclusive<u32> = 1..=99;

fn grid_value(i: u32) -> f64 {
    f64::from(i) / 100.0
}

fn check_param(name: &str, p: Param) -> Result<()> {
    if let Param::Fixed(v) = p {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidArgument(format!(
                "{name} = {v} must lie in [0, 1]"
            )));
        }
    }
    Ok(())
}

impl SmoothingState {
    fn update(&mut self, y: f64) -> f64 {
        let m = self.period;
        let s_old = if self.kind == SmoothingKind::HoltWinters {
            self.seasonal[0]
        } else {
            0.0
        };
        let prev_level = self.level;
        let prev_trend = self.trend;
        let forecast = prev_level + prev_trend + s_old;
        let err = y - forecast;
        match self.kind {
            SmoothingKind::Simple => {
                self.level = self.alpha * y + (1.0 - self.alpha) * prev_level;
            }
            SmoothingKind::Holt => {
                self.level = self.alpha * y + (1.0 - self.alpha) * (prev_level + prev_trend);
                self.trend =
                    self.beta * (self.level - prev_level) + (1.0 - self.beta) * prev_trend;
            }
            SmoothingKind::HoltWinters => {
                self.level =
                    self.alpha * (y - s_old) + (1.0 - self.alpha) * (prev_level + prev_trend);
                self.trend =
                    self.beta * (self.level - prev_level) + (1.0 - self.beta) * prev_trend;
                let s_new =
                    self.gamma * (y - prev_level - prev_trend) + (1.0 - self.gamma) * s_old;
                self.seasonal.rotate_left(1);
                self.seasonal[m - 1] = s_new;
            }
        }
        err
    }

    /// Point forecasts `ŷ_T(1..=horizon)`.
    pub fn forecast(&self, horizon: usize) -> PathForecast {
        let point = (1..=horizon)
            .map(|h| {
                let base = self.level + h as f64 * self.trend;
                if self.kind == SmoothingKind::HoltWinters {
                    base + self.seasonal[(h - 1) % self.period]
                } else {
                    base
                }
            })
            .collect();
        PathForecast::new(point)
    }

    /// Runs the state forward `length` steps with additive innovations.
    pub(crate) fn simulate_with<R: Rng + ?Sized>(
        &self,
        length: usize,
        sampler: &InnovationSampler,
        rng: &mut R,
    ) -> Result<Vec<f64>> {
        let mut state = self.clone();
        let mut out = Vec::with_capacity(length);
        for _ in 0..length {
            let s = if state.kind == SmoothingKind::HoltWinters {
                state.seasonal[0]
            } else {
                0.0
            };
            let y = state.level + state.trend + s + sampler.draw(rng);
            state.update(y);
            out.push(y);
        }
        Ok(out)
    }

    fn sse(&self) -> f64 {
        self.residuals.iter().map(|e| e * e).sum()
    }

    fn n_params(&self) -> usize {
        match self.kind {
            SmoothingKind::Simple => 2,
            SmoothingKind::Holt => 4,
            SmoothingKind::HoltWinters => 5 + self.period,
        }
    }
}

fn run(series: &[f64], kind: SmoothingKind, params: Params, period: usize) -> SmoothingState {
    let mut state = SmoothingState {
        kind,
        level: series[0],
        trend: 0.0,
        seasonal: Vec::new(),
        alpha: params.alpha,
        beta: params.beta,
        gamma: params.gamma,
        period: 0,
        residuals: Vec::new(),
    };
    let start = match kind {
        SmoothingKind::Simple => 1,
        SmoothingKind::Holt => {
            state.trend = series[1] - series[0];
            // the step at t = 1 reproduces y_2 exactly; residuals start at t = 2
            state.level = series[1];
            2
        }
        SmoothingKind::HoltWinters => {
            let m = period;
            let mean1 = series[..m].iter().sum::<f64>() / m as f64;
            let mean2 = series[m..2 * m].iter().sum::<f64>() / m as f64;
            let slope = (mean2 - mean1) / m as f64;
            let centre = (m as f64 - 1.0) / 2.0;
            // level and seasonal effects read off the season-1 trend line,
            // with the level placed at the end of season 1
            state.level = mean1 + slope * centre;
            state.trend = slope;
            state.seasonal = (0..m)
                .map(|i| series[i] - (mean1 + slope * (i as f64 - centre)))
                .collect();
            state.period = m;
            m
        }
    };
    state.residuals.reserve(series.len().saturating_sub(start));
    for &y in &series[start..] {
        let e = state.update(y);
        state.residuals.push(e);
    }
    state
}

fn report(state: &SmoothingState) -> FitReport {
    gaussian_fit_report(state.sse(), state.residuals.len(), state.n_params())
}

/// Simple exponential smoothing, `l_t = α y_t + (1 - α) l_{t-1}`, `l_1 = y_1`.
pub fn fit_ses(series: &[f64], alpha: Param) -> Result<(SmoothingState, FitReport)> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    if series.len() < 2 {
        return Err(Error::SeriesTooShort { len: 1, needed: 2 });
    }
    check_param("alpha", alpha)?;
    let fit = |a: f64| {
        run(
            series,
            SmoothingKind::Simple,
            Params {
                alpha: a,
                beta: 0.0,
                gamma: 0.0,
            },
            0,
        )
    };
    let state = match alpha {
        Param::Fixed(a) => fit(a),
        Param::Auto => best_by(GRID.map(|i| fit(grid_value(i)))),
    };
    let r = report(&state);
    Ok((state, r))
}

/// Holt's linear-trend method with `l_1 = y_1`, `b_1 = y_2 - y_1`.
pub fn fit_holt(series: &[f64], alpha: Param, beta: Param) -> Result<(SmoothingState, FitReport)> {
    if series.len() < 3 {
        return Err(Error::SeriesTooShort {
            len: series.len(),
            needed: 3,
        });
    }
    check_param("alpha", alpha)?;
    check_param("beta", beta)?;
    let fit = |a: f64, b: f64| {
        run(
            series,
            SmoothingKind::Holt,
            Params {
                alpha: a,
                beta: b,
                gamma: 0.0,
            },
            0,
        )
    };
    let alphas = candidates(alpha);
    let betas = candidates(beta);
    let state = best_by(
        alphas
            .iter()
            .flat_map(|&a| betas.iter().map(move |&b| (a, b)))
            .map(|(a, b)| fit(a, b)),
    );
    let r = report(&state);
    Ok((state, r))
}

/// Additive Holt-Winters.
///
/// `AUTO` parameters are tuned by cyclic coordinate search over the
/// 0.01..0.99 grid (each free parameter swept in turn with the others held
/// fixed, until a full sweep changes nothing).
pub fn fit_holt_winters(
    series: &[f64],
    alpha: Param,
    beta: Param,
    gamma: Param,
    period: usize,
) -> Result<(SmoothingState, FitReport)> {
    if period < 2 {
        return Err(Error::PeriodInvalid {
            period,
            len: series.len(),
        });
    }
    let needed = 2 * period + 2;
    if series.len() < needed {
        return Err(Error::SeriesTooShort {
            len: series.len(),
            needed,
        });
    }
    check_param("alpha", alpha)?;
    check_param("beta", beta)?;
    check_param("gamma", gamma)?;
    let fit = |p: [f64; 3]| {
        run(
            series,
            SmoothingKind::HoltWinters,
            Params {
                alpha: p[0],
                beta: p[1],
                gamma: p[2],
            },
            period,
        )
    };
    let spec = [alpha, beta, gamma];
    let mut current = [0.3, 0.05, 0.1];
    for (c, p) in current.iter_mut().zip(spec) {
        if let Param::Fixed(v) = p {
            *c = v;
        }
    }
    let mut best = fit(current);
    if spec.iter().any(|p| matches!(p, Param::Auto)) {
        for _sweep in 0..20 {
            let mut changed = false;
            for axis in 0..3 {
                if !matches!(spec[axis], Param::Auto) {
                    continue;
                }
                for i in GRID {
                    let mut trial = current;
                    trial[axis] = grid_value(i);
                    if trial == current {
                        continue;
                    }
                    let s = fit(trial);
                    if s.sse() < best.sse() {
                        best = s;
                        current = trial;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }
    let r = report(&best);
    Ok((best, r))
}

fn candidates(p: Param) -> Vec<f64> {
    match p {
        Param::Fixed(v) => vec![v],
        Param::Auto => GRID.map(grid_value).collect(),
    }
}

/// First state with the smallest one-step SSE.
fn best_by(states: impl Iterator<Item = SmoothingState>) -> SmoothingState {
    states
        .reduce(|best, s| if s.sse() < best.sse() { s } else { best })
        .expect("at least one candidate")
}
