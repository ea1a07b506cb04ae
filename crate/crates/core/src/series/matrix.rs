use crate::error::{Error, Result};

/// Dense square matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    order: usize,
    entries: Vec<f64>,
}

impl SquareMatrix {
    pub fn new(order: usize, entries: Vec<f64>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument("matrix order must be positive".into()));
        }
        if entries.len() != order * order {
            return Err(Error::MatrixShape {
                expected: order * order,
                got: entries.len(),
            });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("matrix entries must be finite".into()));
        }
        Ok(Self { order, entries })
    }

    pub fn identity(order: usize) -> Self {
        let mut entries = vec![0.0; order * order];
        for i in 0..order {
            entries[i * order + i] = 1.0;
        }
        Self { order, entries }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let order = rows.len();
        Self::new(order, rows.iter().flatten().copied().collect())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.order + col]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            order: self.order,
            entries: self.entries.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.order;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j];
            }
        }
        Self { order: n, entries }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.order;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        Self { order: n, entries }
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.entries
            .chunks(self.order)
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        self.entries
            .chunks(self.order)
            .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Solves `L x = b` for lower-triangular `self`.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        let n = self.order;
        let mut x = vec![0.0; n];
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.get(i, j) * x[j]).sum();
            x[i] = (b[i] - s) / self.get(i, i);
        }
        x
    }

    /// Solves `Lᵀ x = b` for lower-triangular `self`.
    pub fn solve_lower_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.order;
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.get(j, i) * x[j]).sum();
            x[i] = (b[i] - s) / self.get(i, i);
        }
        x
    }
}

/// Lower-triangular Cholesky factor `P` with `P·Pᵀ = matrix`.
pub fn cholesky(matrix: &SquareMatrix) -> Result<SquareMatrix> {
    let n = matrix.order;
    for i in 0..n {
        for j in 0..i {
            let (a, b) = (matrix.get(i, j), matrix.get(j, i));
            if (a - b).abs() > 1e-10 * a.abs().max(b.abs()).max(1.0) {
                return Err(Error::NotSymmetric);
            }
        }
    }
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let s: f64 = (0..j).map(|k| l[j * n + k] * l[j * n + k]).sum();
        let pivot = matrix.get(j, j) - s;
        if pivot <= 0.0 || !pivot.is_finite() {
            return Err(Error::NotPositiveDefinite { row: j, pivot });
        }
        let d = pivot.sqrt();
        l[j * n + j] = d;
        for i in j + 1..n {
            let s: f64 = (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum();
            l[i * n + j] = (matrix.get(i, j) - s) / d;
        }
    }
    Ok(SquareMatrix {
        order: n,
        entries: l,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_factor() {
        let p = cholesky(&SquareMatrix::identity(3)).unwrap();
        assert_eq!(p, SquareMatrix::identity(3));
    }

    #[test]
    fn two_by_two() {
        let a = SquareMatrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let p = cholesky(&a).unwrap();
        let expected = [2.0, 0.0, 1.0, 2f64.sqrt()];
        for (x, y) in p.entries().iter().zip(expected) {
            assert!((x - y).abs() < 1e-15);
        }
        let back = p.matmul(&p.transpose());
        for (x, y) in back.entries().iter().zip(a.entries()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn indefinite_and_asymmetric() {
        let a = SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(cholesky(&a), Err(Error::NotPositiveDefinite { .. })));
        let b = SquareMatrix::from_rows(&[vec![1.0, 0.5], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(cholesky(&b), Err(Error::NotSymmetric)));
    }

    #[test]
    fn triangular_solves() {
        let a = SquareMatrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let p = cholesky(&a).unwrap();
        let b = [1.0, -2.0];
        let y = p.solve_lower(&b);
        let x = p.solve_lower_transpose(&y);
        let ax = a.mul_vec(&x);
        assert!((ax[0] - 1.0).abs() < 1e-12 && (ax[1] + 2.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn reconstruction_bound(n in 1usize..7, raw in prop::collection::vec(-10.0f64..10.0, 49)) {
            // A = M Mᵀ + n I is symmetric positive definite
            let m = SquareMatrix::new(n, raw[..n * n].to_vec()).unwrap();
            let mut a = m.matmul(&m.transpose());
            for i in 0..n {
                a.entries[i * n + i] += n as f64;
            }
            let l = cholesky(&a).unwrap();
            for i in 0..n {
                prop_assert!(l.get(i, i) > 0.0);
                for j in i + 1..n {
                    prop_assert_eq!(l.get(i, j), 0.0);
                }
            }
            let back = l.matmul(&l.transpose());
            let err = back
                .entries()
                .iter()
                .zip(a.entries())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            prop_assert!(err <= 1e-9 * a.norm_inf().max(1.0));
        }
    }
}
