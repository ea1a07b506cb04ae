//! Joint prediction regions: the bootstrap k-FWE region, joint marginals
//! (Bonferroni, BH, Šidák), the modified Scheffé rectangle and the
//! NP-heuristic envelope, plus containment and width.

mod kfwe;
mod marginal;
mod np;
mod scheffe;

pub use kfwe::{
    bootstrap_errors, estimate_sigma, kfwe_multipliers, kfwe_region, kfwe_region_from_errors,
    BootstrapConfig, BootstrapErrors, ErrorMatrix, MultiplierSet, SigmaEstimate, SigmaMethod, SigmaMode,
    StandardizedErrorMatrix, DEFAULT_INNER_REPLICATES,
};
pub use marginal::{bh_levels, bonferroni_levels, marginal_region, sidak_levels};
pub use np::{bootstrap_paths, np_heuristic_region, np_retained};
pub use scheffe::{estimate_cov, modified_scheffe_region, scheffe_ellipsoid_contains, scheffe_multipliers};

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Kfwe,
    Bonferroni,
    Bh,
    Sidak,
    Scheffe,
    Np,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Kfwe,
        Method::Bonferroni,
        Method::Bh,
        Method::Sidak,
        Method::Scheffe,
        Method::Np,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Kfwe => "kfwe",
            Method::Bonferroni => "bonferroni",
            Method::Bh => "bh",
            Method::Sidak => "sidak",
            Method::Scheffe => "scheffe",
            Method::Np => "np",
        }
    }

    /// Whether the region depends on `k` (only k-FWE does).
    pub fn uses_k(self) -> bool {
        self == Method::Kfwe
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sided {
    Two,
    /// `[ŷ - d·σ̂, ∞)`
    Lower,
    /// `(-∞, ŷ - d·σ̂]`
    Upper,
}

impl FromStr for Sided {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two" => Ok(Sided::Two),
            "lower" => Ok(Sided::Lower),
            "upper" => Ok(Sided::Upper),
            _ => Err(Error::InvalidArgument(format!("unknown sidedness `{s}`"))),
        }
    }
}

/// A product of per-horizon intervals `[lower[h], upper[h]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointRegion {
    lower: Vec<f64>,
    upper: Vec<f64>,
    point: Vec<f64>,
    pub method: Method,
    pub alpha: f64,
    pub k: usize,
    pub sided: Sided,
}

impl JointRegion {
    pub fn new(
        lower: Vec<f64>,
        upper: Vec<f64>,
        point: Vec<f64>,
        method: Method,
        alpha: f64,
        k: usize,
        sided: Sided,
    ) -> Result<Self> {
        let h = point.len();
        for v in [&lower, &upper] {
            if v.len() != h {
                return Err(Error::LengthMismatch {
                    expected: h,
                    got: v.len(),
                });
            }
        }
        if k == 0 || k > h {
            return Err(Error::KOutOfRange { k, len: h });
        }
        for i in 0..h {
            if lower[i].is_nan() || upper[i].is_nan() || lower[i] > upper[i] {
                return Err(Error::InvalidArgument(format!(
                    "region bounds at h = {} are [{}, {}]",
                    i + 1,
                    lower[i],
                    upper[i]
                )));
            }
        }
        Ok(Self {
            lower,
            upper,
            point,
            method,
            alpha,
            k,
            sided,
        })
    }

    pub fn horizon(&self) -> usize {
        self.point.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn widths(&self) -> Vec<f64> {
        self.upper.iter().zip(&self.lower).map(|(u, l)| u - l).collect()
    }

    /// Same intervals, evaluated under a different `k`.
    pub fn with_k(mut self, k: usize) -> Result<Self> {
        if k == 0 || k > self.horizon() {
            return Err(Error::KOutOfRange {
                k,
                len: self.horizon(),
            });
        }
        self.k = k;
        Ok(self)
    }

    /// Writes `h,lower,upper,point` rows; unbounded sides print as
    /// `-inf` / `inf`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "h,lower,upper,point")?;
        for i in 0..self.horizon() {
            writeln!(
                out,
                "{},{},{},{}",
                i + 1,
                self.lower[i],
                self.upper[i],
                self.point[i]
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Containment {
    pub success: bool,
    pub miss_count: usize,
}

/// Counts horizons where `actual` falls outside the closed interval;
/// success when at most `k - 1` miss.
pub fn contains(region: &JointRegion, actual: &[f64], k: usize) -> Result<Containment> {
    if actual.len() != region.horizon() {
        return Err(Error::LengthMismatch {
            expected: region.horizon(),
            got: actual.len(),
        });
    }
    if k == 0 || k > region.horizon() {
        return Err(Error::KOutOfRange {
            k,
            len: region.horizon(),
        });
    }
    let miss_count = actual
        .iter()
        .zip(region.lower.iter().zip(&region.upper))
        .filter(|(y, (l, u))| !(**l <= **y && **y <= **u))
        .count();
    Ok(Containment {
        success: miss_count < k,
        miss_count,
    })
}

/// `(∏ w_h)^{1/H}`, computed in log space; 0 when any width is 0.
pub fn geometric_width(region: &JointRegion) -> Result<f64> {
    let widths = region.widths();
    if let Some(h) = widths.iter().position(|w| !w.is_finite()) {
        return Err(Error::InfiniteBound(h));
    }
    if widths.contains(&0.0) {
        return Ok(0.0);
    }
    let mean_log = widths.iter().map(|w| w.ln()).sum::<f64>() / widths.len() as f64;
    Ok(mean_log.exp())
}

impl BootstrapErrors {
    /// Builds a region of any method from this bootstrap run. Only k-FWE
    /// uses `k` in construction; the others are tagged with it so that
    /// [`contains`] can be applied at the same `k`. Scheffé uses the row
    /// covariance of the raw errors as `Σ̂/T`.
    pub fn region(&self, method: Method, alpha: f64, k: usize, sided: Sided) -> Result<JointRegion> {
        let h = self.horizon();
        if method != Method::Kfwe && sided != Sided::Two {
            return Err(Error::InvalidArgument(format!(
                "{method} regions are two-sided only"
            )));
        }
        let region = match method {
            Method::Kfwe => {
                return kfwe_region_from_errors(&self.point, &self.sigma, &self.standardized, k, alpha, sided)
            }
            Method::Bonferroni => marginal_region(
                &self.point,
                &self.sigma,
                &self.standardized,
                &bonferroni_levels(alpha, h),
                method,
                alpha,
            )?,
            Method::Bh => marginal_region(
                &self.point,
                &self.sigma,
                &self.standardized,
                &bh_levels(alpha, h),
                method,
                alpha,
            )?,
            Method::Sidak => marginal_region(
                &self.point,
                &self.sigma,
                &self.standardized,
                &sidak_levels(alpha, h),
                method,
                alpha,
            )?,
            Method::Scheffe => {
                let t = self.train_len as f64;
                let cov = estimate_cov(&self.errors)?.scaled(t);
                modified_scheffe_region(&self.point, &cov, alpha, self.train_len)?
            }
            Method::Np => {
                np_heuristic_region(&self.point, &bootstrap_paths(&self.point, &self.errors)?, alpha)?
            }
        };
        region.with_k(k)
    }
}
