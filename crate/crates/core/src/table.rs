//! Tables of Green function values for a finite pole set.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::Window;

/// Values over the unknowns of the table window for one fixed node.
#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    /// The fixed node: the pole for a column, the evaluation point for a row.
    pub node: usize,
    pub values: Vec<f64>,
}

/// Green function values stored at the ground-state level.
///
/// The stored quantity is `H(x,y) = G(x,y) / (φ(x) φ*(y))`; for tables of
/// subcritical operators `φ = φ* = 1` and `H = G`. Columns hold `H(·, y)`
/// for each pole `y`, rows hold `H(x, ·)` for selected points `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenTable {
    pub window: Window,
    pub columns: Vec<Line>,
    pub rows: Vec<Line>,
    /// `φ` and `φ*` on every grid node.
    pub phi: Vec<f64>,
    pub phi_star: Vec<f64>,
}

impl GreenTable {
    pub fn poles(&self) -> impl Iterator<Item = usize> + '_ {
        self.columns.iter().map(|c| c.node)
    }

    pub fn column(&self, pole: usize) -> Result<&Line> {
        self.columns.iter().find(|c| c.node == pole).ok_or(Error::PoleNotInTable { pole })
    }

    pub fn row(&self, x: usize) -> Option<&Line> {
        self.rows.iter().find(|r| r.node == x)
    }

    fn offset(&self, node: usize) -> Option<usize> {
        self.window.contains(node).then(|| node - self.window.lo)
    }

    /// `G(x,y)/(φ(x)φ*(y))` from a column, or from a row when `y` has no
    /// column.
    pub fn h(&self, x: usize, y: usize) -> Option<f64> {
        if let Ok(c) = self.column(y) {
            return self.offset(x).map(|k| c.values[k]);
        }
        let r = self.row(x)?;
        self.offset(y).map(|k| r.values[k])
    }

    /// Operator-level value `G(x,y) = φ(x)φ*(y) H(x,y)`.
    pub fn g(&self, x: usize, y: usize) -> Option<f64> {
        self.h(x, y).map(|v| self.phi[x] * self.phi_star[y] * v)
    }

    /// Window nodes, in order.
    pub fn nodes(&self) -> core::ops::RangeInclusive<usize> {
        self.window.lo..=self.window.hi
    }

    /// `G - c φ⊗φ*`.
    pub fn shifted(&self, c: f64) -> Self {
        let shift = |l: &Line| Line { node: l.node, values: l.values.iter().map(|v| v - c).collect() };
        GreenTable {
            window: self.window,
            columns: self.columns.iter().map(shift).collect(),
            rows: self.rows.iter().map(shift).collect(),
            phi: self.phi.clone(),
            phi_star: self.phi_star.clone(),
        }
    }

    /// `G + χ⊗φ* + φ⊗χ*`, with `χ` and `χ*` given on every grid node.
    pub fn plus_separable(&self, chi: &[f64], chi_star: &[f64]) -> Self {
        let a: Vec<f64> = chi.iter().zip(&self.phi).map(|(c, p)| c / p).collect();
        let b: Vec<f64> = chi_star.iter().zip(&self.phi_star).map(|(c, p)| c / p).collect();
        let lo = self.window.lo;
        let columns =
            self.columns.iter().map(|l| Line { node: l.node, values: l.values.iter().enumerate().map(|(k, v)| v + a[lo + k] + b[l.node]).collect() }).collect();
        let rows =
            self.rows.iter().map(|l| Line { node: l.node, values: l.values.iter().enumerate().map(|(k, v)| v + a[l.node] + b[lo + k]).collect() }).collect();
        GreenTable { window: self.window, columns, rows, phi: self.phi.clone(), phi_star: self.phi_star.clone() }
    }

    /// Largest `|G|` over the stored columns.
    pub fn scale(&self) -> f64 {
        self.columns
            .iter()
            .flat_map(|c| c.values.iter().enumerate().map(move |(k, v)| (k, c.node, v)))
            .map(|(k, y, v)| (self.phi[self.window.lo + k] * self.phi_star[y] * v).abs())
            .fold(0.0, f64::max)
    }
}
