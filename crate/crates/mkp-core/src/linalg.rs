//! Small dense square matrices.
//!
//! The Lax representations are `(N+1) × (N+1)` with `N` the number of
//! potential components — in practice single digits — so a plain row-major
//! `Vec` with Gauss–Jordan elimination is both adequate and easy to audit.

use crate::{Error, Real, Result};

/// Dense square matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<F> {
    dim: usize,
    data: Vec<F>,
}

impl<F: Real> Mat<F> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![F::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = F::one();
        }
        m
    }

    /// Builds from a row-major slice; `data.len()` must be `dim²`.
    pub fn from_rows(dim: usize, data: &[F]) -> Self {
        assert_eq!(data.len(), dim * dim, "row-major data must have dim² entries");
        Self { dim, data: data.to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self, c: F) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&v| v * c).collect() }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect();
        Self { dim: self.dim, data }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect();
        Self { dim: self.dim, data }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let aik = self[(i, k)];
                if aik == F::zero() {
                    continue;
                }
                for j in 0..d {
                    out[(i, j)] = out[(i, j)] + aik * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// `[a, b] = ab - ba`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        self.matmul(rhs).sub(&rhs.matmul(self))
    }

    pub fn max_abs(&self) -> F {
        self.data.iter().fold(F::zero(), |m, &v| m.max(v.abs()))
    }

    /// Max-row-sum (∞) norm.
    pub fn norm_inf(&self) -> F {
        (0..self.dim)
            .map(|i| (0..self.dim).fold(F::zero(), |s, j| s + self[(i, j)].abs()))
            .fold(F::zero(), F::max)
    }

    /// Gauss–Jordan inverse with partial pivoting.
    ///
    /// Returns the inverse and the ∞-norm condition estimate
    /// `‖A‖_∞ · ‖A⁻¹‖_∞`; fails on an exactly singular pivot. Callers enforce
    /// their own condition threshold.
    pub fn inverse(&self) -> Result<(Self, F)> {
        let d = self.dim;
        let mut a = self.clone();
        let mut inv = Self::identity(d);
        for col in 0..d {
            let pivot_row = (col..d)
                .max_by(|&r, &s| {
                    a[(r, col)].abs().partial_cmp(&a[(s, col)].abs()).expect("non-NaN pivot")
                })
                .expect("non-empty pivot range");
            let pivot = a[(pivot_row, col)];
            if pivot == F::zero() {
                return Err(Error::InvalidParams(format!(
                    "singular matrix: zero pivot in column {col}"
                )));
            }
            if pivot_row != col {
                for j in 0..d {
                    a.data.swap(pivot_row * d + j, col * d + j);
                    inv.data.swap(pivot_row * d + j, col * d + j);
                }
            }
            let inv_pivot = F::one() / pivot;
            for j in 0..d {
                a[(col, j)] = a[(col, j)] * inv_pivot;
                inv[(col, j)] = inv[(col, j)] * inv_pivot;
            }
            for r in 0..d {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f == F::zero() {
                    continue;
                }
                for j in 0..d {
                    a[(r, j)] = a[(r, j)] - f * a[(col, j)];
                    inv[(r, j)] = inv[(r, j)] - f * inv[(col, j)];
                }
            }
        }
        let cond = self.norm_inf() * inv.norm_inf();
        Ok((inv, cond))
    }

    /// Determinant via LU with partial pivoting.
    pub fn det(&self) -> F {
        let d = self.dim;
        let mut a = self.clone();
        let mut det = F::one();
        for col in 0..d {
            let pivot_row = (col..d)
                .max_by(|&r, &s| {
                    a[(r, col)].abs().partial_cmp(&a[(s, col)].abs()).expect("non-NaN pivot")
                })
                .expect("non-empty pivot range");
            let pivot = a[(pivot_row, col)];
            if pivot == F::zero() {
                return F::zero();
            }
            if pivot_row != col {
                for j in 0..d {
                    a.data.swap(pivot_row * d + j, col * d + j);
                }
                det = -det;
            }
            det = det * pivot;
            for r in (col + 1)..d {
                let f = a[(r, col)] / pivot;
                for j in col..d {
                    a[(r, j)] = a[(r, j)] - f * a[(col, j)];
                }
            }
        }
        det
    }
}

impl<F> std::ops::Index<(usize, usize)> for Mat<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.dim + j]
    }
}

impl<F> std::ops::IndexMut<(usize, usize)> for Mat<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.dim + j]
    }
}

/// Assembles the block matrix `[[a, row], [col, blk]]` of size `(n+1)²`,
/// where `row` is `1×n`, `col` is `n×1` and `blk` is `n×n` row-major.
pub fn block<F: Real>(a: F, row: &[F], col: &[F], blk: &[F]) -> Mat<F> {
    let n = row.len();
    assert_eq!(col.len(), n);
    assert_eq!(blk.len(), n * n);
    let mut m = Mat::zeros(n + 1);
    m[(0, 0)] = a;
    for j in 0..n {
        m[(0, j + 1)] = row[j];
        m[(j + 1, 0)] = col[j];
        for k in 0..n {
            m[(j + 1, k + 1)] = blk[j * n + k];
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_recovers_identity() {
        let a = Mat::<f64>::from_rows(3, &[2.0, 1.0, 0.0, 1.0, 3.0, -1.0, 0.0, -1.0, 4.0]);
        let (inv, cond) = a.inverse().unwrap();
        let id = a.matmul(&inv);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - expect).abs() < 1e-14);
            }
        }
        assert!(cond > 1.0 && cond < 1e3);
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        let a = Mat::<f64>::from_rows(2, &[3.0, 7.0, -2.0, 5.0]);
        assert!((a.det() - 29.0).abs() < 1e-14);
        let b = Mat::<f64>::from_rows(3, &[1.0, 2.0, 3.0, 0.0, 4.0, 5.0, 1.0, 0.0, 6.0]);
        assert!((b.det() - 22.0).abs() < 1e-13);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = Mat::from_rows(2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(a.inverse().is_err());
        assert_eq!(a.det(), 0.0);
    }

    #[test]
    fn commutator_of_noncommuting_pair() {
        let a = Mat::from_rows(2, &[0.0, 1.0, 0.0, 0.0]);
        let b = Mat::from_rows(2, &[0.0, 0.0, 1.0, 0.0]);
        let c = a.commutator(&b); // diag(1, -1)
        assert_eq!(c[(0, 0)], 1.0);
        assert_eq!(c[(1, 1)], -1.0);
        assert_eq!(c[(0, 1)], 0.0);
        assert_eq!(c[(1, 0)], 0.0);
    }

    #[test]
    fn block_layout() {
        let m = block(9.0, &[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0, 7.0, 8.0]);
        assert_eq!(m[(0, 0)], 9.0);
        assert_eq!(m[(0, 2)], 2.0);
        assert_eq!(m[(2, 0)], 4.0);
        assert_eq!(m[(1, 1)], 5.0);
        assert_eq!(m[(2, 2)], 8.0);
    }
}
