//! Dirichlet Green functions on exhaustion windows and the oscillation,
//! boundary and sandwich statistics computed from them.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{Exhaustion, Window};
use crate::operator::DiscreteOperator;

/// Default width, in cells, of the pole neighbourhood left out of error
/// norms and annuli.
pub const POLE_COLLAR: usize = 2;

/// Green function of one window for one pole, as a density against ν.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenField {
    /// Exhaustion index of the window (1-based), 0 for ad-hoc windows.
    pub j: usize,
    pub window: Window,
    pub pole: usize,
    /// Values on `window.lo..=window.hi`.
    pub values: Vec<f64>,
    /// Row-relative residual of `L g = e_pole / m_pole`.
    pub residual: f64,
}

impl GreenField {
    /// Value at any node; zero outside the window.
    pub fn at(&self, node: usize) -> f64 {
        if self.window.contains(node) {
            self.values[node - self.window.lo]
        } else {
            0.0
        }
    }

    /// Values on the full node range `0..n`.
    pub fn to_full(&self, n: usize) -> Vec<f64> {
        (0..n).map(|i| self.at(i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Solves `P_window g = e_pole / m_pole` by tridiagonal elimination.
pub fn dirichlet_green(op: &DiscreteOperator, window: &Window, pole: usize) -> Result<GreenField> {
    solve_unchecked(op, window, pole, 0).and_then(|g| {
        if let Some((k, &v)) = g.values.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
            return Err(Error::NonpositiveGreen { node: window.lo + k, value: v });
        }
        Ok(g)
    })
}

/// Same solve without the positivity requirement; used for operators that
/// are known to lose the maximum principle only through rounding.
pub fn solve_unchecked(op: &DiscreteOperator, window: &Window, pole: usize, j: usize) -> Result<GreenField> {
    op.check_window(window)?;
    if !window.contains(pole) {
        return Err(Error::PoleOutsideWindow { pole });
    }
    let mut rhs = vec![0.0; window.len()];
    let source = 1.0 / op.masses()[pole];
    rhs[pole - window.lo] = source;
    let values = op.matrix().solve_block(window.lo, window.hi, &rhs)?;
    let mut full = vec![0.0; op.len()];
    full[window.lo..=window.hi].copy_from_slice(&values);
    let residual = (window.lo..=window.hi)
        .map(|i| {
            let mat = op.matrix();
            let mut s = mat.diag[i] * full[i];
            let mut scale = (mat.diag[i] * full[i]).abs();
            if i > window.lo {
                s += mat.lower[i] * full[i - 1];
                scale += (mat.lower[i] * full[i - 1]).abs();
            }
            if i < window.hi {
                s += mat.upper[i] * full[i + 1];
                scale += (mat.upper[i] * full[i + 1]).abs();
            }
            let b = if i == pole { source } else { 0.0 };
            let scale = scale + b;
            if scale == 0.0 {
                0.0
            } else {
                (s - b).abs() / scale
            }
        })
        .fold(0.0, f64::max);
    Ok(GreenField { j, window: *window, pole, values, residual })
}

/// Green functions of every window of the exhaustion for one pole.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenSequence {
    pub fields: Vec<GreenField>,
    /// `min_{i ∈ M_j} (g^{j+1}_i - g^j_i)` for `j = 1..J-1`.
    pub monotonicity: Vec<f64>,
}

pub fn green_sequence(op: &DiscreteOperator, exhaustion: &Exhaustion, pole: usize) -> Result<GreenSequence> {
    if !exhaustion.window(1).contains(pole) {
        return Err(Error::PoleOutsideWindow { pole });
    }
    let mut fields = Vec::with_capacity(exhaustion.len());
    for (k, w) in exhaustion.windows().iter().enumerate() {
        let mut g = dirichlet_green(op, w, pole)?;
        g.j = k + 1;
        fields.push(g);
    }
    let monotonicity = fields.windows(2).map(|pair| pair[0].window.closure().map(|i| pair[1].at(i) - pair[0].at(i)).fold(f64::INFINITY, f64::min)).collect();
    Ok(GreenSequence { fields, monotonicity })
}

/// Nodes of `closure(M_k)` farther than `collar` cells from the pole.
pub fn annulus(exhaustion: &Exhaustion, k: usize, pole: usize, collar: usize) -> Vec<usize> {
    exhaustion.window(k).closure().filter(|&i| i.abs_diff(pole) > collar).collect()
}

/// Nodes `pole ± r` that exist inside `window`'s closure.
pub fn ring(window: &Window, pole: usize, r: usize) -> Vec<usize> {
    let closure = window.closure();
    let mut out = Vec::with_capacity(2);
    if pole >= r && closure.contains(&(pole - r)) {
        out.push(pole - r);
    }
    if r > 0 && closure.contains(&(pole + r)) {
        out.push(pole + r);
    }
    out
}

/// `max - min` of the field over the node set.
pub fn oscillation(field: &GreenField, nodes: &[usize]) -> Result<f64> {
    let (lo, hi) = boundary_stats(field, nodes).map_err(|_| Error::EmptyAnnulus)?;
    Ok(hi - lo)
}

/// `(inf, sup)` of the field over a node set.
pub fn boundary_stats(field: &GreenField, nodes: &[usize]) -> Result<(f64, f64)> {
    if nodes.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(nodes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
        let v = field.at(i);
        (lo.min(v), hi.max(v))
    }))
}

/// Margins of `ω⁻¹ g^k ≤ h_{j,k} ≤ ω⁻¹ g^k + 1` on `M_k` where
/// `h_{j,k} = ω⁻¹ (g^j - min_{M_k} g^j)` and `ω = ω_j(k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichReport {
    pub k: usize,
    pub j: usize,
    pub omega: f64,
    /// `min (h - g^k/ω)`, nonnegative when the lower bound holds.
    pub lower_margin: f64,
    /// `min (g^k/ω + 1 - h)`, nonnegative when the upper bound holds.
    pub upper_margin: f64,
}

/// Evaluates the sandwich bounds for the fields of one pole (index `j-1`
/// holds window `j`). Meaningful for operators with `L 1 = 0`.
pub fn sandwich_check(fields: &[GreenField], exhaustion: &Exhaustion, k: usize, j: usize, collar: usize) -> Result<SandwichReport> {
    if !(j > k && k >= 1 && j <= fields.len()) {
        return Err(Error::RegionMismatch);
    }
    let gj = &fields[j - 1];
    let gk = &fields[k - 1];
    let ann = annulus(exhaustion, k, gj.pole, collar);
    let omega = oscillation(gj, &ann)?;
    if !(omega > 0.0) {
        return Err(Error::ZeroOscillation);
    }
    let closure: Vec<usize> = exhaustion.window(k).closure().collect();
    let (min_k, _) = boundary_stats(gj, &closure)?;
    let mut lower = f64::INFINITY;
    let mut upper = f64::INFINITY;
    for &i in &closure {
        let h = (gj.at(i) - min_k) / omega;
        let base = gk.at(i) / omega;
        lower = lower.min(h - base);
        upper = upper.min(base + 1.0 - h);
    }
    Ok(SandwichReport { k, j, omega, lower_margin: lower, upper_margin: upper })
}
