use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

fn distribution(df: f64) -> Result<ChiSquared> {
    ChiSquared::new(df).map_err(|e| Error::InvalidArgument(format!("chi-square df {df}: {e}")))
}

/// CDF of the χ² distribution with `df` degrees of freedom.
pub fn chi_square_cdf(df: f64, x: f64) -> f64 {
    match distribution(df) {
        Ok(d) if x > 0.0 => d.cdf(x),
        Ok(_) => 0.0,
        Err(_) => f64::NAN,
    }
}

/// Quantile of the χ² distribution: the `x` with `CDF(x) = p`.
pub fn chi_square_quantile(df: usize, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::POutOfRange(p));
    }
    if df == 0 {
        return Err(Error::InvalidArgument("df must be positive".into()));
    }
    Ok(distribution(df as f64)?.inverse_cdf(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Γ(df/2) for integer df by exact recursion from Γ(1) and Γ(1/2).
    fn gamma_half_int(df: usize) -> f64 {
        let (mut g, mut a) = if df % 2 == 0 {
            (1.0, 1.0)
        } else {
            (std::f64::consts::PI.sqrt(), 0.5)
        };
        while a < df as f64 / 2.0 - 1e-9 {
            g *= a;
            a += 1.0;
        }
        g
    }

    /// CDF by Simpson quadrature of the density after substituting x = u².
    fn cdf_by_quadrature(df: usize, x: f64) -> f64 {
        let k = df as f64 / 2.0;
        let norm = 2.0 / (2f64.powf(k) * gamma_half_int(df));
        let g = |u: f64| norm * u.powi(df as i32 - 1) * (-u * u / 2.0).exp();
        let b = x.sqrt();
        let n = 4000;
        let h = b / n as f64;
        let mut s = g(0.0) + g(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * g(i as f64 * h);
        }
        s * h / 3.0
    }

    fn quantile_by_bisection(df: usize, p: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, 200.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if cdf_by_quadrature(df, mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn df1_95_matches_quadrature_oracle() {
        let oracle = quantile_by_bisection(1, 0.95);
        let q = chi_square_quantile(1, 0.95).unwrap();
        assert!((q - oracle).abs() < 1e-6, "{q} vs {oracle}");
        assert!((q - 3.8415).abs() < 1e-3);
    }

    #[test]
    fn df2_closed_form() {
        for &p in &[0.01, 0.5, 0.9, 0.95, 0.999] {
            let q = chi_square_quantile(2, p).unwrap();
            assert!((q + 2.0 * (1.0 - p).ln()).abs() < 1e-8);
        }
    }

    #[test]
    fn cdf_matches_quadrature_for_several_df() {
        for df in [1, 2, 3, 5, 10, 24] {
            for &x in &[0.5, 2.0, 7.5, 20.0] {
                let a = chi_square_cdf(df as f64, x);
                let b = cdf_by_quadrature(df, x);
                assert!((a - b).abs() < 1e-8, "df={df} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn small_p_goes_to_zero() {
        let q = chi_square_quantile(1, 1e-12).unwrap();
        assert!((0.0..1e-9).contains(&q), "{q}");

    }

    #[test]
    fn inversion_tolerance() {
        for df in 1..=30 {
            for &p in &[0.001, 0.05, 0.3, 0.7, 0.9, 0.99] {
                let q = chi_square_quantile(df, p).unwrap();
                assert!((chi_square_cdf(df as f64, q) - p).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn rejects_bad_p() {
        assert!(chi_square_quantile(3, 0.0).is_err());
        assert!(chi_square_quantile(3, 1.0).is_err());
        assert!(chi_square_quantile(3, f64::NAN).is_err());
    }

    #[test]
    fn monotone_in_p_and_df() {
        for df in 1..20 {
            let mut prev = 0.0;
            for i in 1..20 {
                let q = chi_square_quantile(df, i as f64 / 20.0).unwrap();
                assert!(q > prev);
                prev = q;
                assert!(chi_square_quantile(df + 1, i as f64 / 20.0).unwrap() > q);
            }
        }
    }
}
