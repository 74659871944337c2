//! Closed-form reference kernels and the comparison harness used to check
//! computed fields against them.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{Geometry, Window};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleCase {
    /// `-½|x-y| + c`, the renormalized Green function of `-d²/dx²` on R.
    LineLaplaceLt { c: f64 },
    /// `-(1/2π) log|x| + c`: planar Laplacian, pole at the origin.
    PlanarLog { c: f64 },
    /// `½(log j - |log x|)√x`: Hardy operator on `(1/j, j)`, pole 1.
    HardyWindow { j: f64 },
    /// `-½|log x|√x`: renormalized Hardy Green function, pole 1.
    HardyLtLimit,
    /// `min(x, y)`: `-d²/dx²` on the half-line.
    HalfLineLaplace,
    /// `e^{-|x-y|}/2`: `-d²/dx² + 1` on R.
    LineHelmholtz,
    /// `max(r,ρ)^{2-N} / ((N-2)|S^{N-1}|)`: radial Laplacian, `N ≥ 3`.
    RadialLaplace { dim: u32 },
    /// `x_<^{1/2+s} x_>^{1/2-s} / (2s)`, `s = √(1/4 - λ)`: `-u'' - λu/x²`.
    SubcriticalHardy { lambda: f64 },
    /// `r^{(2-N)/2}`, the ground state of the radial Hardy operator.
    RadialHardyGround { dim: u32 },
    /// `|log r| r^{(2-N)/2}`, the second positive radial solution.
    RadialHardySecond { dim: u32 },
}

impl OracleCase {
    pub fn name(&self) -> &'static str {
        match self {
            OracleCase::LineLaplaceLt { .. } => "line_laplace_lt",
            OracleCase::PlanarLog { .. } => "planar_log",
            OracleCase::HardyWindow { .. } => "hardy_window",
            OracleCase::HardyLtLimit => "hardy_lt_limit",
            OracleCase::HalfLineLaplace => "halfline_laplace",
            OracleCase::LineHelmholtz => "line_helmholtz",
            OracleCase::RadialLaplace { .. } => "radial_laplace",
            OracleCase::SubcriticalHardy { .. } => "subcritical_hardy",
            OracleCase::RadialHardyGround { .. } => "radial_hardy_ground",
            OracleCase::RadialHardySecond { .. } => "radial_hardy_second",
        }
    }

    pub fn geometry(&self) -> Geometry {
        match *self {
            OracleCase::LineLaplaceLt { .. } | OracleCase::LineHelmholtz => Geometry::Line,
            OracleCase::PlanarLog { .. } => Geometry::Radial(2),
            OracleCase::RadialLaplace { dim } | OracleCase::RadialHardyGround { dim } | OracleCase::RadialHardySecond { dim } => Geometry::Radial(dim),
            _ => Geometry::HalfLine,
        }
    }

    /// Value at `(x, y)`; solution cases ignore `y`.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        let bad = Err(Error::OutsideValidity { x, y });
        match *self {
            OracleCase::LineLaplaceLt { c } => Ok(-0.5 * (x - y).abs() + c),
            OracleCase::PlanarLog { c } => {
                if y != 0.0 || !(x > 0.0) {
                    return bad;
                }
                Ok(-libm::log(x) / (2.0 * PI) + c)
            }
            OracleCase::HardyWindow { j } => {
                if y != 1.0 || !(j > 1.0) || x < 1.0 / j || x > j {
                    return bad;
                }
                Ok(0.5 * (libm::log(j) - libm::log(x).abs()) * libm::sqrt(x))
            }
            OracleCase::HardyLtLimit => {
                if y != 1.0 || !(x > 0.0) {
                    return bad;
                }
                Ok(-0.5 * libm::log(x).abs() * libm::sqrt(x))
            }
            OracleCase::HalfLineLaplace => {
                if !(x >= 0.0 && y >= 0.0) {
                    return bad;
                }
                Ok(x.min(y))
            }
            OracleCase::LineHelmholtz => Ok(0.5 * libm::exp(-(x - y).abs())),
            OracleCase::RadialLaplace { dim } => {
                if dim < 3 || !(x >= 0.0 && y >= 0.0) || (x == 0.0 && y == 0.0) {
                    return bad;
                }
                let n = dim as f64;
                Ok(libm::pow(x.max(y), 2.0 - n) / ((n - 2.0) * Geometry::sphere_area(dim)))
            }
            OracleCase::SubcriticalHardy { lambda } => {
                if !(lambda < 0.25) || !(x > 0.0 && y > 0.0) {
                    return bad;
                }
                let s = libm::sqrt(0.25 - lambda);
                let (lo, hi) = (x.min(y), x.max(y));
                Ok(libm::pow(lo, 0.5 + s) * libm::pow(hi, 0.5 - s) / (2.0 * s))
            }
            OracleCase::RadialHardyGround { dim } => {
                if !(x > 0.0) {
                    return bad;
                }
                Ok(libm::pow(x, (2.0 - dim as f64) / 2.0))
            }
            OracleCase::RadialHardySecond { dim } => {
                if !(x > 0.0) {
                    return bad;
                }
                Ok(libm::log(x).abs() * libm::pow(x, (2.0 - dim as f64) / 2.0))
            }
        }
    }
}

/// Row of the oracle catalogue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatalogueEntry {
    pub name: &'static str,
    pub formula: &'static str,
    pub region: &'static str,
    pub source: &'static str,
}

pub fn catalogue() -> Vec<CatalogueEntry> {
    let e = |name, formula, region, source| CatalogueEntry { name, formula, region, source };
    let lit = "closed form from the literature";
    let der = "derived closed form, checked by grid refinement";
    alloc::vec![
        e("line_laplace_lt", "-|x-y|/2 + C", "x, y in R", lit),
        e("planar_log", "-log|x|/(2 pi) + C", "R^2, pole at 0", lit),
        e("hardy_window", "(log j - |log x|) sqrt(x)/2", "1/j <= x <= j, pole 1", lit),
        e("hardy_lt_limit", "-|log x| sqrt(x)/2", "x > 0, pole 1", lit),
        e("halfline_laplace", "min(x, y)", "x, y > 0", der),
        e("line_helmholtz", "exp(-|x-y|)/2", "x, y in R", der),
        e("radial_laplace", "max(r, rho)^(2-N) / ((N-2)|S^(N-1)|)", "R^N, N >= 3", der),
        e("subcritical_hardy", "x_<^(1/2+s) x_>^(1/2-s) / (2s), s = sqrt(1/4-lambda)", "x, y > 0, lambda < 1/4", der),
        e("radial_hardy_ground", "r^((2-N)/2)", "r > 0", lit),
        e("radial_hardy_second", "|log r| r^((2-N)/2)", "r > 0", lit),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    Sup,
    WeightedL2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    /// Pointwise relative error for [`Norm::Sup`]; ratio of weighted `L²`
    /// norms for [`Norm::WeightedL2`].
    pub error: f64,
    /// `sup |field - oracle|` after the fit.
    pub abs_error: f64,
    /// `sup |field - oracle| / sup |oracle|`.
    pub rel_to_sup: f64,
    pub worst_x: f64,
    /// Fitted multiple of the constant mode, zero when no mode is given.
    pub constant: f64,
    pub samples: usize,
}

/// Compares `field` (indexed on all grid nodes) with the oracle on the
/// nodes of `window` that lie in `region` and are more than `collar` cells
/// from the pole. With `mode = Some(φ(·)φ*(y))` the free multiple of the
/// mode is fitted by least squares first.
#[allow(clippy::too_many_arguments)]
pub fn compare(
    field: &[f64],
    nodes: &[f64],
    window: &Window,
    pole: usize,
    case: &OracleCase,
    region: (f64, f64),
    collar: usize,
    mode: Option<&[f64]>,
    norm: Norm,
) -> Result<ErrorReport> {
    let y = nodes[pole];
    let lo_x = nodes[window.lo];
    let hi_x = nodes[window.hi];
    if region.0 < lo_x || region.1 > hi_x || !(region.0 < region.1) {
        return Err(Error::RegionMismatch);
    }
    let idx: Vec<usize> = (window.lo..=window.hi).filter(|&i| nodes[i] >= region.0 && nodes[i] <= region.1 && i.abs_diff(pole) > collar).collect();
    if idx.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut oracle = Vec::with_capacity(idx.len());
    for &i in &idx {
        oracle.push(case.eval(nodes[i], if matches!(case, OracleCase::HardyWindow { .. } | OracleCase::HardyLtLimit) { 1.0 } else { y })?);
    }
    let weight = |i: usize| match norm {
        Norm::Sup => 1.0,
        Norm::WeightedL2 => 0.5 * (nodes[(i + 1).min(nodes.len() - 1)] - nodes[i.saturating_sub(1)]),
    };
    let constant = match mode {
        Some(m) => {
            let (mut num, mut den) = (0.0, 0.0);
            for (k, &i) in idx.iter().enumerate() {
                num += weight(i) * (field[i] - oracle[k]) * m[i];
                den += weight(i) * m[i] * m[i];
            }
            num / den
        }
        None => 0.0,
    };
    let (mut abs_err, mut sup_o, mut rel, mut worst) = (0.0f64, 0.0f64, 0.0f64, nodes[idx[0]]);
    let (mut l2e, mut l2o) = (0.0, 0.0);
    for (k, &i) in idx.iter().enumerate() {
        let e = field[i] - oracle[k] - mode.map_or(0.0, |m| constant * m[i]);
        let r = if oracle[k] != 0.0 {
            (e / oracle[k]).abs()
        } else if e == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        if r > rel {
            rel = r;
            worst = nodes[i];
        }
        abs_err = abs_err.max(e.abs());
        sup_o = sup_o.max(oracle[k].abs());
        l2e += weight(i) * e * e;
        l2o += weight(i) * oracle[k] * oracle[k];
    }
    let error = match norm {
        Norm::Sup => rel,
        Norm::WeightedL2 => libm::sqrt(l2e / l2o),
    };
    Ok(ErrorReport { error, abs_error: abs_err, rel_to_sup: abs_err / sup_o, worst_x: worst, constant, samples: idx.len() })
}
