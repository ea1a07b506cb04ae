//! Surrogate series for dependent data.
//!
//! Every scheme produces replicates of an arbitrary `out_len` (normally
//! `T + H`): block schemes keep drawing blocks until the output is full and
//! truncate the last one, model schemes simulate forward.

use rand::Rng;
use rand_distr::{Distribution, Geometric, Normal};

use crate::decompose::{classical_decompose, recompose, Decomposition};
use crate::error::{Error, Result};
use crate::forecasters::{
    select_order, simulate, ArMethod, Criterion, FittedModel, ForecasterSpec, Innovations,
};
use crate::series::RandomSource;

/// Resampler applied to the remainder of a decomposed series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnerScheme {
    MovingBlock { block_len: Option<usize> },
    Stationary { mean_block: f64 },
}

/// Block lengths left as `None` default to [`default_block_length`] of the
/// source length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    /// Simulates from the forecaster refit on the source series.
    ModelBased(ForecasterSpec),
    MovingBlock { block_len: Option<usize> },
    CircularBlock { block_len: Option<usize> },
    BlockOfBlocks { outer: usize, inner: usize },
    Stationary { mean_block: f64 },
    /// `order: None` selects `p ∈ 1..=⌈10·log10 T⌉` by AIC.
    Sieve { order: Option<usize> },
    DecomposedBlock { period: usize, inner: InnerScheme },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapSpec {
    pub scheme: Scheme,
    /// Standard deviation of Gaussian jitter added after resampling (the
    /// smoothed bootstrap); 0 disables it.
    pub smoothing_noise_sd: f64,
}

impl BootstrapSpec {
    pub fn new(scheme: Scheme) -> Self {
        Self {
            scheme,
            smoothing_noise_sd: 0.0,
        }
    }

    pub fn with_smoothing(mut self, sd: f64) -> Self {
        self.smoothing_noise_sd = sd;
        self
    }
}

/// One surrogate series.
#[derive(Debug, Clone, PartialEq)]
pub struct Replicate {
    pub values: Vec<f64>,
    pub stream_id: u64,
}

/// `round(n^{1/3})`, at least 1.
pub fn default_block_length(n: usize) -> usize {
    ((n as f64).cbrt().round() as usize).max(1)
}

fn check_block(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::BlockLenInvalid(format!(
            "block length {k} must lie in 1..={n}"
        )));
    }
    Ok(())
}

fn check_nonempty(series: &[f64]) -> Result<()> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(())
}

/// Concatenates overlapping blocks `series[s..s+k]`, `s` uniform on
/// `0..=n-k`, truncated to `out_len`.
pub fn moving_block<R: Rng + ?Sized>(
    series: &[f64],
    block_len: usize,
    out_len: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_nonempty(series)?;
    let n = series.len();
    check_block(block_len, n)?;
    let mut out = Vec::with_capacity(out_len + block_len);
    while out.len() < out_len {
        let s = rng.random_range(0..=n - block_len);
        out.extend_from_slice(&series[s..s + block_len]);
    }
    out.truncate(out_len);
    Ok(out)
}

/// As [`moving_block`] but starts range over all of `0..n` and indices wrap.
pub fn circular_block<R: Rng + ?Sized>(
    series: &[f64],
    block_len: usize,
    out_len: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_nonempty(series)?;
    let n = series.len();
    check_block(block_len, n)?;
    let mut out = Vec::with_capacity(out_len + block_len);
    while out.len() < out_len {
        let s = rng.random_range(0..n);
        out.extend((s..s + block_len).map(|i| series[i % n]));
    }
    out.truncate(out_len);
    Ok(out)
}

/// Outer blocks of length `outer` drawn as in [`moving_block`]; each is
/// refilled with `inner`-length sub-blocks drawn from within it.
pub fn block_of_blocks<R: Rng + ?Sized>(
    series: &[f64],
    outer: usize,
    inner: usize,
    out_len: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_nonempty(series)?;
    let n = series.len();
    check_block(outer, n)?;
    if inner == 0 || inner >= outer {
        return Err(Error::BlockLenInvalid(format!(
            "inner block {inner} must lie in 1..{outer}"
        )));
    }
    let mut out = Vec::with_capacity(out_len + outer);
    while out.len() < out_len {
        let s = rng.random_range(0..=n - outer);
        let block = moving_block(&series[s..s + outer], inner, outer, rng)?;
        out.extend(block);
    }
    out.truncate(out_len);
    Ok(out)
}

/// Geometric block lengths on `{1, 2, …}` with mean `mean_block`, as drawn
/// by the stationary bootstrap.
pub fn stationary_block_lengths(mean_block: f64) -> Result<impl Distribution<u64>> {
    if !(mean_block.is_finite() && mean_block >= 1.0) {
        return Err(Error::MeanBlockInvalid(mean_block));
    }
    let g = Geometric::new(1.0 / mean_block).map_err(|_| Error::MeanBlockInvalid(mean_block))?;
    Ok(g.map(|failures| failures + 1))
}

/// Politis-Romano stationary bootstrap with circular wrap.
pub fn stationary_bootstrap<R: Rng + ?Sized>(
    series: &[f64],
    mean_block: f64,
    out_len: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_nonempty(series)?;
    let lengths = stationary_block_lengths(mean_block)?;
    let n = series.len();
    let mut out = Vec::with_capacity(out_len);
    while out.len() < out_len {
        let s = rng.random_range(0..n);
        let len = lengths.sample(rng) as usize;
        let take = len.min(out_len - out.len());
        out.extend((s..s + take).map(|i| series[i % n]));
    }
    Ok(out)
}

/// AR fit used by the sieve bootstrap.
pub fn sieve_model(series: &[f64], order: Option<usize>) -> Result<FittedModel> {
    let candidates: Vec<usize> = match order {
        Some(p) => vec![p],
        None => {
            let cap = (10.0 * (series.len() as f64).log10()).ceil().max(1.0) as usize;
            (1..=cap).collect()
        }
    };
    let (model, _) = select_order(
        series,
        &candidates,
        0,
        0,
        0,
        Criterion::Aic,
        ArMethod::YuleWalker,
    )?;
    Ok(FittedModel::Ar(model))
}

/// Fits an AR sieve and simulates `out_len` points past the observed tail
/// with resampled centred residuals.
pub fn sieve_bootstrap<R: Rng + ?Sized>(
    series: &[f64],
    order: Option<usize>,
    out_len: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let model = sieve_model(series, order)?;
    simulate(&model, out_len, Innovations::ResampleResiduals, rng)
}

/// Residual-resampling simulation from a fitted model.
pub fn model_based<R: Rng + ?Sized>(
    model: &FittedModel,
    out_len: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    simulate(model, out_len, Innovations::ResampleResiduals, rng)
}

fn inner_resample<R: Rng + ?Sized>(
    remainder: &[f64],
    inner: InnerScheme,
    out_len: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    match inner {
        InnerScheme::MovingBlock { block_len } => {
            let k = block_len.unwrap_or_else(|| default_block_length(remainder.len()));
            moving_block(remainder, k, out_len, rng)
        }
        InnerScheme::Stationary { mean_block } => {
            stationary_bootstrap(remainder, mean_block, out_len, rng)
        }
    }
}

fn decomposed_from<R: Rng + ?Sized>(
    decomposition: &Decomposition,
    inner: InnerScheme,
    out_len: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let n = decomposition.len();
    if out_len < n {
        return Err(Error::InvalidArgument(format!(
            "decomposed bootstrap output length {out_len} is shorter than the series ({n})"
        )));
    }
    let remainder = inner_resample(&decomposition.remainder, inner, out_len, rng)?;
    recompose(decomposition, &remainder, out_len - n, decomposition.period)
}

/// Decomposes, block-resamples the remainder to `out_len`, and adds back the
/// extended trend and seasonal components.
pub fn decomposed_block<R: Rng + ?Sized>(
    series: &[f64],
    period: usize,
    inner: InnerScheme,
    out_len: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let d = classical_decompose(series, period)?;
    decomposed_from(&d, inner, out_len, rng)
}

#[derive(Debug, Clone)]
enum Prepared {
    Series(Vec<f64>),
    Model(FittedModel),
    Decomposed(Decomposition),
}

/// A scheme bound to one source series, with any model fit or decomposition
/// done once up front. Replicates are pure functions of `(seed, stream_id)`,
/// so callers may generate them in parallel.
#[derive(Debug, Clone)]
pub struct Bootstrapper {
    spec: BootstrapSpec,
    prepared: Prepared,
    noise: Option<Normal<f64>>,
}

impl Bootstrapper {
    pub fn new(spec: BootstrapSpec, series: &[f64]) -> Result<Self> {
        check_nonempty(series)?;
        let n = series.len();
        let sd = spec.smoothing_noise_sd;
        if !(sd.is_finite() && sd >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "smoothing noise sd {sd} must be finite and nonnegative"
            )));
        }
        let noise = (sd > 0.0)
            .then(|| Normal::new(0.0, sd).expect("validated above"));
        let prepared = match spec.scheme {
            Scheme::ModelBased(f) => {
                let (model, _) = f.fit(series)?;
                if model.residuals().is_empty() {
                    return Err(Error::NoResiduals);
                }
                Prepared::Model(model)
            }
            Scheme::Sieve { order } => Prepared::Model(sieve_model(series, order)?),
            Scheme::DecomposedBlock { period, inner } => {
                let d = classical_decompose(series, period)?;
                match inner {
                    InnerScheme::MovingBlock { block_len: Some(k) } => check_block(k, n)?,
                    InnerScheme::Stationary { mean_block } => {
                        stationary_block_lengths(mean_block)?;
                    }
                    InnerScheme::MovingBlock { block_len: None } => {}
                }
                Prepared::Decomposed(d)
            }
            Scheme::MovingBlock { block_len } | Scheme::CircularBlock { block_len } => {
                check_block(block_len.unwrap_or(1), n)?;
                Prepared::Series(series.to_vec())
            }
            Scheme::BlockOfBlocks { outer, inner } => {
                check_block(outer, n)?;
                if inner == 0 || inner >= outer {
                    return Err(Error::BlockLenInvalid(format!(
                        "inner block {inner} must lie in 1..{outer}"
                    )));
                }
                Prepared::Series(series.to_vec())
            }
            Scheme::Stationary { mean_block } => {
                stationary_block_lengths(mean_block)?;
                Prepared::Series(series.to_vec())
            }
        };
        Ok(Self {
            spec,
            prepared,
            noise,
        })
    }

    pub fn spec(&self) -> &BootstrapSpec {
        &self.spec
    }

    /// Replicate number `stream_id` under `seed`.
    pub fn replicate(&self, out_len: usize, seed: u64, stream_id: u64) -> Result<Replicate> {
        let mut rng = RandomSource::new(seed, stream_id);
        let mut values = self.draw(out_len, &mut rng)?;
        if let Some(noise) = &self.noise {
            for v in &mut values {
                *v += noise.sample(&mut rng);
            }
        }
        Ok(Replicate { values, stream_id })
    }

    fn draw(&self, out_len: usize, rng: &mut RandomSource) -> Result<Vec<f64>> {
        match (&self.prepared, self.spec.scheme) {
            (Prepared::Model(m), _) => model_based(m, out_len, rng),
            (Prepared::Decomposed(d), Scheme::DecomposedBlock { inner, .. }) => {
                decomposed_from(d, inner, out_len, rng)
            }
            (Prepared::Series(s), Scheme::MovingBlock { block_len }) => {
                let k = block_len.unwrap_or_else(|| default_block_length(s.len()));
                moving_block(s, k, out_len, rng)
            }
            (Prepared::Series(s), Scheme::CircularBlock { block_len }) => {
                let k = block_len.unwrap_or_else(|| default_block_length(s.len()));
                circular_block(s, k, out_len, rng)
            }
            (Prepared::Series(s), Scheme::BlockOfBlocks { outer, inner }) => {
                block_of_blocks(s, outer, inner, out_len, rng)
            }
            (Prepared::Series(s), Scheme::Stationary { mean_block }) => {
                stationary_bootstrap(s, mean_block, out_len, rng)
            }
            _ => unreachable!("prepared state always matches the scheme"),
        }
    }
}
