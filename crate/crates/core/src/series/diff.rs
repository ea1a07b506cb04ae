use super::TimeSeries;
use crate::error::{Error, Result};

/// Applies `(1 - B^lag)` `order` times to raw values.
pub fn difference_values(values: &[f64], lag: usize, order: usize) -> Result<Vec<f64>> {
    if lag == 0 {
        return Err(Error::InvalidArgument("differencing lag must be positive".into()));
    }
    let needed = lag * order + 1;
    if values.len() < needed {
        return Err(Error::SeriesTooShort {
            len: values.len(),
            needed,
        });
    }
    let mut out = values.to_vec();
    for _ in 0..order {
        out = out.windows(lag + 1).map(|w| w[lag] - w[0]).collect();
    }
    Ok(out)
}

pub fn difference(series: &TimeSeries, lag: usize, order: usize) -> Result<TimeSeries> {
    TimeSeries::new(difference_values(series.values(), lag, order)?)
}

/// Undoes [`difference`] given the `lag·order` leading observations that
/// differencing dropped.
pub fn invert_difference(
    differenced: &[f64],
    initial_values: &[f64],
    lag: usize,
    order: usize,
) -> Result<Vec<f64>> {
    if lag == 0 {
        return Err(Error::InvalidArgument("differencing lag must be positive".into()));
    }
    if initial_values.len() != lag * order {
        return Err(Error::InitialValuesLengthMismatch {
            expected: lag * order,
            got: initial_values.len(),
        });
    }
    // heads[j] = first `lag` values of the j-times differenced series
    let mut heads = Vec::with_capacity(order);
    let mut level = initial_values.to_vec();
    for _ in 0..order {
        heads.push(level[..lag].to_vec());
        level = level.windows(lag + 1).map(|w| w[lag] - w[0]).collect();
    }
    let mut current = differenced.to_vec();
    for head in heads.into_iter().rev() {
        let mut up = head;
        up.reserve(current.len());
        for (i, d) in current.iter().enumerate() {
            let v = up[i] + d;
            up.push(v);
        }
        current = up;
    }
    Ok(current)
}

/// A sequence of single differencing steps, each with its own lag, applied
/// in order. Simple differencing `d` times followed by seasonal differencing
/// `D` times at period `m` is `[1; d] ++ [m; D]`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DifferencingPlan {
    lags: Vec<usize>,
}

impl DifferencingPlan {
    pub fn new(d: usize, seasonal_d: usize, period: usize) -> Self {
        let mut lags = vec![1; d];
        lags.extend(std::iter::repeat_n(period, seasonal_d));
        Self { lags }
    }

    pub fn lags(&self) -> &[usize] {
        &self.lags
    }

    pub fn is_identity(&self) -> bool {
        self.lags.is_empty()
    }

    /// Observations consumed by the plan.
    pub fn span(&self) -> usize {
        self.lags.iter().sum()
    }

    pub fn apply(&self, values: &[f64]) -> Result<Vec<f64>> {
        let mut out = values.to_vec();
        for &lag in &self.lags {
            out = difference_values(&out, lag, 1)?;
        }
        Ok(out)
    }

    /// Every intermediate stage: `stages[0]` is the input and
    /// `stages[lags.len()]` the fully differenced series.
    fn stages(&self, values: &[f64]) -> Result<Vec<Vec<f64>>> {
        let mut stages = vec![values.to_vec()];
        for &lag in &self.lags {
            let next = difference_values(stages.last().unwrap(), lag, 1)?;
            stages.push(next);
        }
        Ok(stages)
    }

    /// Maps values that continue the fully differenced history back onto the
    /// original scale.
    pub fn integrate(&self, history: &[f64], future_differenced: &[f64]) -> Result<Vec<f64>> {
        integrate_future(history, future_differenced, self)
    }
}

/// Continues `history` with values given on the differenced scale of `plan`.
pub fn integrate_future(
    history: &[f64],
    future_differenced: &[f64],
    plan: &DifferencingPlan,
) -> Result<Vec<f64>> {
    let stages = plan.stages(history)?;
    let mut future = future_differenced.to_vec();
    for (stage, &lag) in stages.iter().zip(&plan.lags).rev() {
        let mut extended = stage.clone();
        let base = extended.len();
        for (i, d) in future.iter().enumerate() {
            let v = extended[base + i - lag] + d;
            extended.push(v);
        }
        future = extended.split_off(base);
    }
    Ok(future)
}
