//! Modified Scheffé rectangle: the Cholesky factor's absolute values applied
//! to per-horizon χ² multipliers.

use super::{ErrorMatrix, JointRegion, Method, Sided};
use crate::error::{Error, Result};
use crate::series::{chi_square_quantile, cholesky, SquareMatrix};

/// `v_h = √(χ²_{h,1-α} / h)` for `h = 1..=horizon`.
pub fn scheffe_multipliers(alpha: f64, horizon: usize) -> Result<Vec<f64>> {
    (1..=horizon)
        .map(|h| Ok((chi_square_quantile(h, 1.0 - alpha)? / h as f64).sqrt()))
        .collect()
}

/// Sample covariance of the rows (divisor `B - 1`).
pub fn estimate_cov(errors: &ErrorMatrix) -> Result<SquareMatrix> {
    let (b, h) = (errors.rows(), errors.cols());
    if b <= h {
        return Err(Error::RankDeficient { rows: b, cols: h });
    }
    let means: Vec<f64> = (0..h)
        .map(|j| errors.iter_rows().map(|r| r[j]).sum::<f64>() / b as f64)
        .collect();
    let mut cov = vec![0.0; h * h];
    for r in errors.iter_rows() {
        for i in 0..h {
            let di = r[i] - means[i];
            for j in 0..=i {
                cov[i * h + j] += di * (r[j] - means[j]);
            }
        }
    }
    for i in 0..h {
        for j in 0..=i {
            let v = cov[i * h + j] / (b - 1) as f64;
            cov[i * h + j] = v;
            cov[j * h + i] = v;
        }
    }
    SquareMatrix::new(h, cov)
}

/// `ŷ ± |P|·v` with `P = chol(Σ̂/T)`.
pub fn modified_scheffe_region(
    point: &[f64],
    cov: &SquareMatrix,
    alpha: f64,
    train_len: usize,
) -> Result<JointRegion> {
    let h = point.len();
    if cov.order() != h {
        return Err(Error::MatrixShape {
            expected: h * h,
            got: cov.order() * cov.order(),
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::POutOfRange(alpha));
    }
    let p = cholesky(&cov.scaled(1.0 / train_len as f64))?;
    let v = scheffe_multipliers(alpha, h)?;
    let half: Vec<f64> = (0..h)
        .map(|i| (0..=i).map(|j| p.get(i, j).abs() * v[j]).sum())
        .collect();
    JointRegion::new(
        point.iter().zip(&half).map(|(y, w)| y - w).collect(),
        point.iter().zip(&half).map(|(y, w)| y + w).collect(),
        point.to_vec(),
        Method::Scheffe,
        alpha,
        1,
        Sided::Two,
    )
}

/// Membership in the Scheffé ellipsoid
/// `(y - ŷ)ᵀ (Σ̂/T)⁻¹ (y - ŷ) ≤ χ²_{H,1-α}`.
pub fn scheffe_ellipsoid_contains(
    point: &[f64],
    cov: &SquareMatrix,
    alpha: f64,
    train_len: usize,
    actual: &[f64],
) -> Result<bool> {
    let h = point.len();
    if actual.len() != h {
        return Err(Error::LengthMismatch {
            expected: h,
            got: actual.len(),
        });
    }
    let l = cholesky(&cov.scaled(1.0 / train_len as f64))?;
    let diff: Vec<f64> = actual.iter().zip(point).map(|(y, p)| y - p).collect();
    let z = l.solve_lower(&diff);
    let q: f64 = z.iter().map(|v| v * v).sum();
    Ok(q <= chi_square_quantile(h, 1.0 - alpha)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::RandomSource;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn identity_covariance_half_widths() {
        let t = 200;
        let cov = SquareMatrix::identity(2).scaled(t as f64);
        let r = modified_scheffe_region(&[0.0, 0.0], &cov, 0.05, t).unwrap();
        let w: Vec<f64> = r.widths().iter().map(|w| w / 2.0).collect();
        assert!((w[0] - 3.841_458_820_694_124f64.sqrt()).abs() < 1e-6);
        assert!((w[1] - (5.991_464_547_107_979f64 / 2.0).sqrt()).abs() < 1e-6);
        assert!((w[0] - 1.960).abs() < 1e-3 && (w[1] - 1.731).abs() < 1e-3);
    }

    #[test]
    fn multipliers_strictly_decrease() {
        for alpha in [0.01, 0.05, 0.1, 0.2] {
            let v = scheffe_multipliers(alpha, 24).unwrap();
            assert!(v.windows(2).all(|w| w[1] < w[0]), "{alpha}");
        }
    }

    #[test]
    fn multipliers_rise_early_at_low_confidence() {
        // χ²_{1,0.7} = 1.074 but χ²_{2,0.7}/2 = 1.204; the sequence only
        // falls from h = 3 on
        let v = scheffe_multipliers(0.3, 24).unwrap();
        assert!(v[1] > v[0] && v[2] > v[1]);
        assert!(v[2..].windows(2).all(|w| w[1] < w[0]));
        assert!((v[0] - 1.036_433_389_493_789).abs() < 1e-9);
    }

    #[test]
    fn single_horizon_reduction() {
        let cov = SquareMatrix::new(1, vec![50.0]).unwrap();
        let r = modified_scheffe_region(&[3.0], &cov, 0.1, 2).unwrap();
        let z = chi_square_quantile(1, 0.9).unwrap().sqrt();
        assert!((r.upper()[0] - (3.0 + 5.0 * z)).abs() < 1e-12);
    }

    #[test]
    fn covariance_estimates() {
        let mut rng = RandomSource::new(1, 0);
        let b = 10_000;
        let e: Vec<f64> = (0..b * 3).map(|_| StandardNormal.sample(&mut rng)).collect();
        let c = estimate_cov(&ErrorMatrix::new(b, 3, e).unwrap()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    assert!((c.get(i, j) - 1.0).abs() < 0.05);
                } else {
                    assert!(c.get(i, j).abs() < 0.05);
                }
            }
        }
        let square = ErrorMatrix::new(3, 3, vec![1.0; 9]).unwrap();
        assert!(matches!(estimate_cov(&square), Err(Error::RankDeficient { .. })));
        let repeated = ErrorMatrix::new(5, 2, [1.0, 2.0].repeat(5)).unwrap();
        let zero = estimate_cov(&repeated).unwrap();
        assert!(zero.entries().iter().all(|v| *v == 0.0));
        assert!(matches!(
            modified_scheffe_region(&[0.0, 0.0], &zero, 0.1, 10),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn ellipsoid_membership_boundary() {
        // with y = ŷ + L·u the quadratic form is |u|², so membership flips
        // as |u|² crosses the χ² quantile
        let cov = SquareMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let c = chi_square_quantile(2, 0.9).unwrap();
        let l = cholesky(&cov).unwrap();
        let member = |u: [f64; 2]| {
            let y = l.mul_vec(&u);
            scheffe_ellipsoid_contains(&[0.0, 0.0], &cov, 0.1, 1, &y).unwrap()
        };
        assert!(member([0.0, 0.0]));
        assert!(member([0.6 * c.sqrt(), 0.79 * c.sqrt()]));
        assert!(!member([0.6 * c.sqrt(), 0.81 * c.sqrt()]));
    }
}
