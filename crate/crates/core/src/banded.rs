//! Tridiagonal storage and the direct solver used for every window problem.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Row `i` holds `lower[i] = A[i][i-1]`, `diag[i] = A[i][i]` and
/// `upper[i] = A[i][i+1]`; `lower[0]` and `upper[n-1]` are unused.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Tridiagonal { lower: vec![0.0; n], diag: vec![0.0; n], upper: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Entry `(i, j)`; zero off the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if j + 1 == i {
            self.lower[i]
        } else if i + 1 == j {
            self.upper[i]
        } else {
            0.0
        }
    }

    /// `(A u)_i` for row `i` with `u` indexed on the full node range.
    pub fn row_apply(&self, i: usize, u: &[f64]) -> f64 {
        let mut s = self.diag[i] * u[i];
        if i > 0 {
            s += self.lower[i] * u[i - 1];
        }
        if i + 1 < u.len() {
            s += self.upper[i] * u[i + 1];
        }
        s
    }

    /// `Σ_j |A_ij u_j|` for row `i`, the natural scale of a row residual.
    pub fn row_scale(&self, i: usize, u: &[f64]) -> f64 {
        let mut s = (self.diag[i] * u[i]).abs();
        if i > 0 {
            s += (self.lower[i] * u[i - 1]).abs();
        }
        if i + 1 < u.len() {
            s += (self.upper[i] * u[i + 1]).abs();
        }
        s
    }

    /// `M^{-1} A^T M` for the diagonal weight `M = diag(masses)`.
    pub fn clear_row(&mut self, i: usize) {
        self.lower[i] = 0.0;
        self.diag[i] = 0.0;
        self.upper[i] = 0.0;
    }

    pub fn weighted_transpose(&self, masses: &[f64]) -> Self {
        let n = self.len();
        let mut t = Tridiagonal::zeros(n);
        for i in 0..n {
            t.diag[i] = self.diag[i];
            if i > 0 {
                t.lower[i] = masses[i - 1] * self.upper[i - 1] / masses[i];
            }
            if i + 1 < n {
                t.upper[i] = masses[i + 1] * self.lower[i + 1] / masses[i];
            }
        }
        t
    }

    /// Solves the block `lo..=hi` with all couplings outside the block
    /// dropped (homogeneous Dirichlet elimination). `rhs` is indexed on the
    /// block. Thomas elimination without pivoting.
    pub fn solve_block(&self, lo: usize, hi: usize, rhs: &[f64]) -> Result<Vec<f64>> {
        let m = hi + 1 - lo;
        debug_assert_eq!(rhs.len(), m);
        let mut c = vec![0.0; m];
        let mut d = vec![0.0; m];
        for k in 0..m {
            let i = lo + k;
            let a = if k > 0 { self.lower[i] } else { 0.0 };
            let (cp, dp) = if k > 0 { (c[k - 1], d[k - 1]) } else { (0.0, 0.0) };
            let pivot = self.diag[i] - a * cp;
            let scale = self.diag[i].abs() + a.abs() + self.upper[i].abs();
            if !pivot.is_finite() || pivot.abs() <= 1e-14 * scale {
                return Err(Error::SingularWindowOperator { row: i });
            }
            c[k] = if k + 1 < m { self.upper[i] / pivot } else { 0.0 };
            d[k] = (rhs[k] - a * dp) / pivot;
        }
        for k in (0..m.saturating_sub(1)).rev() {
            d[k] -= c[k] * d[k + 1];
        }
        if d.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularWindowOperator { row: lo });
        }
        Ok(d)
    }
}
