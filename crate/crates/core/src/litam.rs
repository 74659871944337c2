//! The Li–Tam renormalization of a divergent Green sequence and the class
//! algebra of the Green functions it produces.
//!
//! The construction runs on the ground-state transform `L = φ* P φ`, where
//! `L 1 = 0` and maximum-principle arguments hold; results are reported at
//! the operator level through `G_P(x,y) = φ(x)φ*(y)J(x,y)`.

use alloc::vec::Vec;

use crate::criticality::GroundState;
use crate::error::{Error, Result};
use crate::green::{annulus, boundary_stats, dirichlet_green, GreenField, POLE_COLLAR};
use crate::grid::Exhaustion;
use crate::operator::DiscreteOperator;
use crate::table::{GreenTable, Line};

/// Number of trailing increments that decide convergence.
const TRAILING: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct LiTamOptions {
    /// Sup-norm Cauchy tolerance, relative to `max(1, ‖J‖)` on each annulus.
    pub tol: f64,
    /// Cells around the pole left out of every annulus.
    pub collar: usize,
    /// Points `x` for which the whole row `J(x, ·)` is computed.
    pub rows: Vec<usize>,
}

impl Default for LiTamOptions {
    fn default() -> Self {
        LiTamOptions { tol: 1e-5, collar: POLE_COLLAR, rows: Vec::new() }
    }
}

/// One Cauchy increment `‖J_j - J_{j-1}‖_∞` on annulus `k` for one pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CauchyRow {
    pub pole: usize,
    pub j: usize,
    pub alpha: f64,
    pub increment: f64,
    pub annulus: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiTamGreen {
    pub table: GreenTable,
    pub reference_pole: usize,
    /// `α_j = min_{∂M_1} g_L^j(·, p)`, `j = 1..J`.
    pub alpha: Vec<f64>,
    pub diagnostics: Vec<CauchyRow>,
    /// Largest relative trailing increment of the reference column.
    pub achieved_tol: f64,
    /// `‖P φ‖` and `‖P* φ*‖` (absolute, over the unknowns).
    pub transform_residuals: (f64, f64),
    /// The transformed operator `L`.
    pub operator: DiscreteOperator,
    /// `g_L^j(·, p)` for every window.
    pub sequence: Vec<GreenField>,
}

/// Runs the construction with reference pole `p` and extra poles `poles`,
/// failing with `NoConvergence` when the reference column has not settled
/// to `options.tol` on every annulus.
///
/// Every extra pole is renormalized with the reference sequence `α_j`.
/// Convergence is required for the reference column only; extra columns
/// converge at a rate tied to the window growth and their Cauchy profile is
/// recorded in `diagnostics`.
pub fn litam_construct(
    op: &DiscreteOperator,
    exhaustion: &Exhaustion,
    p: usize,
    poles: &[usize],
    phi: &GroundState,
    phi_star: &GroundState,
    options: &LiTamOptions,
) -> Result<LiTamGreen> {
    let g = litam_unchecked(op, exhaustion, p, poles, phi, phi_star, options)?;
    if !(g.achieved_tol <= options.tol) {
        return Err(Error::NoConvergence { increment: g.achieved_tol });
    }
    Ok(g)
}

/// The construction on the given windows without the convergence
/// requirement; `achieved_tol` reports how far the reference column is
/// from settling.
pub fn litam_unchecked(
    op: &DiscreteOperator,
    exhaustion: &Exhaustion,
    p: usize,
    poles: &[usize],
    phi: &GroundState,
    phi_star: &GroundState,
    options: &LiTamOptions,
) -> Result<LiTamGreen> {
    let nw = exhaustion.len();
    if !exhaustion.window(1).contains(p) {
        return Err(Error::PoleOutsideWindow { pole: p });
    }
    let (l, res) = op.ground_state_transform(&phi.values, &phi_star.values)?;
    let res_adj = op.adjoint().absolute_residual(&phi_star.values, op.first_unknown()..=op.last_unknown());
    let ring = exhaustion.window(1).boundary_nodes();

    let mut sequence = Vec::with_capacity(nw);
    let mut alpha = Vec::with_capacity(nw);
    for (k, w) in exhaustion.windows().iter().enumerate() {
        let mut g = dirichlet_green(&l, w, p)?;
        g.j = k + 1;
        let (a, _) = boundary_stats(&g, &ring)?;
        alpha.push(a);
        sequence.push(g);
    }

    let mut diagnostics = Vec::new();
    let achieved = cauchy_profile(&sequence, &alpha, exhaustion, p, options.collar, &mut diagnostics);
    let worst = if achieved.is_empty() { f64::INFINITY } else { achieved.iter().map(|&(_, r)| r).fold(0.0, f64::max) };

    let last = *exhaustion.last();
    let a_last = alpha[nw - 1];
    let to_line = |node: usize, g: &GreenField| Line { node, values: g.values.iter().map(|v| v - a_last).collect() };
    let mut columns = Vec::with_capacity(poles.len() + 1);
    columns.push(to_line(p, &sequence[nw - 1]));
    for &y in poles.iter().filter(|&&y| y != p) {
        let mut fields = Vec::with_capacity(nw);
        for (k, w) in exhaustion.windows().iter().enumerate() {
            if w.contains(y) {
                let mut g = dirichlet_green(&l, w, y)?;
                g.j = k + 1;
                fields.push(g);
            }
        }
        let shift = nw - fields.len();
        let _ = cauchy_profile_offset(&fields, &alpha[shift..], exhaustion, shift, y, options.collar, &mut diagnostics);
        columns.push(to_line(y, &fields[fields.len() - 1]));
    }
    let adj = l.adjoint();
    let mut rows = Vec::with_capacity(options.rows.len());
    for &x in &options.rows {
        let g = dirichlet_green(&adj, &last, x)?;
        rows.push(to_line(x, &g));
    }
    Ok(LiTamGreen {
        table: GreenTable { window: last, columns, rows, phi: phi.values.clone(), phi_star: phi_star.values.clone() },
        reference_pole: p,
        alpha,
        diagnostics,
        achieved_tol: worst,
        transform_residuals: (res, res_adj),
        operator: l,
        sequence,
    })
}

fn cauchy_profile(fields: &[GreenField], alpha: &[f64], ex: &Exhaustion, pole: usize, collar: usize, out: &mut Vec<CauchyRow>) -> Vec<(usize, f64)> {
    cauchy_profile_offset(fields, alpha, ex, 0, pole, collar, out)
}

/// Appends the Cauchy increments of `J_j = g^j - α_j` on every annulus and
/// returns, per annulus with enough increments, the largest of the trailing
/// relative increments. `fields[i]` belongs to window `offset + i + 1`.
fn cauchy_profile_offset(
    fields: &[GreenField],
    alpha: &[f64],
    ex: &Exhaustion,
    offset: usize,
    pole: usize,
    collar: usize,
    out: &mut Vec<CauchyRow>,
) -> Vec<(usize, f64)> {
    let mut verdicts = Vec::new();
    for k in 1..ex.len() {
        if !ex.window(k).contains(pole) {
            continue;
        }
        let nodes = annulus(ex, k, pole, collar);
        let mut rel = Vec::new();
        for (i, pair) in fields.windows(2).enumerate() {
            let j = offset + i + 2;
            // J_{j-1} must be defined on the whole closure of window k.
            if j < k + 2 {
                continue;
            }
            let (mut inc, mut norm) = (0.0f64, 1.0f64);
            for &x in &nodes {
                let a = pair[0].at(x) - alpha[i];
                let b = pair[1].at(x) - alpha[i + 1];
                inc = inc.max((b - a).abs());
                norm = norm.max(b.abs());
            }
            out.push(CauchyRow { pole, j, alpha: alpha[i + 1], increment: inc, annulus: k });
            rel.push(inc / norm);
        }
        if rel.len() >= TRAILING {
            let worst = rel[rel.len() - TRAILING..].iter().copied().fold(0.0, f64::max);
            verdicts.push((k, worst));
        }
    }
    verdicts
}

/// Margins of `g_L^{M_{2k}} - ω̄ ≤ J ≤ g_L^{M_{2k}} + C` on window `2k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichBounds {
    pub k: usize,
    /// `sup_{j > 2k}` of the oscillation of `g_L^j` on `closure(M_{2k}) \ M_1`.
    pub omega_bar: f64,
    /// `max_{∂M_{2k}} J`.
    pub c: f64,
    pub lower_margin: f64,
    pub upper_margin: f64,
    pub scale: f64,
}

pub fn sandwich_bounds_check(g: &LiTamGreen, exhaustion: &Exhaustion, k: usize) -> Result<SandwichBounds> {
    let nw = exhaustion.len();
    let k2 = 2 * k;
    if k == 0 || k2 >= nw {
        return Err(Error::RegionMismatch);
    }
    let p = g.reference_pole;
    let w2k = exhaustion.window(k2);
    let w1 = exhaustion.window(1);
    let outer: Vec<usize> = w2k.closure().filter(|&i| !w1.contains(i)).collect();
    let mut omega_bar = 0.0f64;
    for field in &g.sequence[k2..] {
        let (lo, hi) = boundary_stats(field, &outer)?;
        omega_bar = omega_bar.max(hi - lo);
    }
    let col = g.table.column(p)?;
    let j_at = |x: usize| col.values[x - g.table.window.lo];
    let c = w2k.boundary_nodes().into_iter().map(j_at).fold(f64::NEG_INFINITY, f64::max);
    let g2k = &g.sequence[k2 - 1];
    let (mut lower, mut upper, mut scale) = (f64::INFINITY, f64::INFINITY, 0.0f64);
    for x in w2k.lo..=w2k.hi {
        let jv = j_at(x);
        lower = lower.min(jv - (g2k.at(x) - omega_bar));
        upper = upper.min(g2k.at(x) + c - jv);
        scale = scale.max(jv.abs()).max(g2k.at(x).abs());
    }
    Ok(SandwichBounds { k, omega_bar, c, lower_margin: lower, upper_margin: upper, scale })
}

/// `C` in `G(x,y) ≤ C φ(x)` outside `|x - y| < radius`, and the same for
/// `G*(x,y) = G(y,x) ≤ C* φ*(x)` when the table holds the row at `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundedAbove {
    pub c: f64,
    pub c_adjoint: Option<f64>,
}

pub fn bounded_above_check(table: &GreenTable, nodes: &[f64], y: usize, radius: f64) -> Result<BoundedAbove> {
    let col = table.column(y)?;
    let outside = |x: usize| (nodes[x] - nodes[y]).abs() >= radius;
    let c = table.nodes().zip(&col.values).filter(|(x, _)| outside(*x)).map(|(_, v)| table.phi_star[y] * v).fold(f64::NEG_INFINITY, f64::max);
    if c == f64::NEG_INFINITY {
        return Err(Error::EmptySet);
    }
    let c_adjoint =
        table.row(y).map(|r| table.nodes().zip(&r.values).filter(|(x, _)| outside(*x)).map(|(_, v)| table.phi[y] * v).fold(f64::NEG_INFINITY, f64::max));
    Ok(BoundedAbove { c, c_adjoint })
}

/// `m_j = min_{∂M_j} G(·,y)/φ` for every window whose boundary lies inside
/// the table window.
pub fn liminf_probe(table: &GreenTable, y: usize, exhaustion: &Exhaustion) -> Result<Vec<(usize, f64)>> {
    let col = table.column(y)?;
    let mut out = Vec::new();
    for (k, w) in exhaustion.windows().iter().enumerate() {
        let b = w.boundary_nodes();
        if !b.iter().all(|&x| table.window.contains(x)) {
            continue;
        }
        let m = b.iter().map(|&x| table.phi_star[y] * col.values[x - table.window.lo]).fold(f64::INFINITY, f64::min);
        out.push((k + 1, m));
    }
    Ok(out)
}

/// `G - C_z φ⊗φ*` with `C_z = max_{|x - z| ≥ radius} G(x,z)/(φ(x)φ*(z))`,
/// nonpositive outside the neighbourhood in the column of `z`.
pub fn negative_tail_variant(table: &GreenTable, nodes: &[f64], z: usize, radius: f64) -> Result<(GreenTable, f64)> {
    let col = table.column(z)?;
    let cz = table.nodes().zip(&col.values).filter(|(x, _)| (nodes[*x] - nodes[z]).abs() >= radius).map(|(_, &v)| v).fold(f64::NEG_INFINITY, f64::max);
    if cz == f64::NEG_INFINITY {
        return Err(Error::EmptySet);
    }
    Ok((table.shifted(cz), cz))
}

/// `G + χ⊗φ* + φ⊗χ*` for solutions `P χ = 0`, `P* χ* = 0` on the window.
pub fn extended_member(table: &GreenTable, op: &DiscreteOperator, chi: &[f64], chi_star: &[f64], tol: f64) -> Result<GreenTable> {
    let rows = table.window.lo..=table.window.hi;
    let r = op.relative_residual(chi, rows.clone());
    let r_star = op.adjoint().relative_residual(chi_star, rows);
    let worst = r.max(r_star);
    if !(worst <= tol) {
        return Err(Error::NotASolution { residual: worst });
    }
    Ok(table.plus_separable(chi, chi_star))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Equivalence {
    /// `G1 - G2 = c φ⊗φ*`.
    ConstantMultiple(f64),
    /// Range of `(G1 - G2)/(φ⊗φ*)` over the sample.
    Distinct { min: f64, max: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub verdict: Equivalence,
    /// Minimal constants `C_k = max_{M_k} (G2 - G1)(x, y0)/φ(x)` over nested
    /// windows, for the first common pole `y0`.
    pub ra1_constants: Vec<f64>,
    /// Whether `G2(x,y0) ≤ G1(x,y0) + Cφ(x)` holds: the constants stabilize.
    pub ra1: bool,
    /// Same in the pole variable, `G2(x0,y) ≤ G1(x0,y) + Cφ*(y)`, when both
    /// tables carry a common row.
    pub ra2: Option<bool>,
    /// The verdict agrees with the one-sided conditions.
    pub consistent: bool,
}

const RIGIDITY_TOL: f64 = 1e-6;

/// Decides whether two Green tables differ by a multiple of `φ⊗φ*` and
/// evaluates the one-sided comparison conditions.
pub fn class_equivalence_test(g1: &GreenTable, g2: &GreenTable, exhaustion: &Exhaustion, collar: usize) -> Result<EquivalenceReport> {
    if g1.window != g2.window {
        return Err(Error::RegionMismatch);
    }
    let (mut lo, mut hi, mut sum, mut count) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
    let ratio = |x: usize, y: usize| -> Option<f64> {
        let d = g1.g(x, y)? - g2.g(x, y)?;
        Some(d / (g1.phi[x] * g1.phi_star[y]))
    };
    let mut common = Vec::new();
    for y in g1.poles() {
        if g2.column(y).is_err() {
            continue;
        }
        common.push(y);
        for x in g1.nodes().filter(|x| x.abs_diff(y) > collar) {
            if let Some(r) = ratio(x, y) {
                lo = lo.min(r);
                hi = hi.max(r);
                sum += r;
                count += 1;
            }
        }
    }
    for r in &g1.rows {
        if g2.row(r.node).is_none() {
            continue;
        }
        for y in g1.nodes().filter(|y| y.abs_diff(r.node) > collar) {
            let d = g1.phi[r.node] * g1.phi_star[y] * r.values[y - g1.window.lo]
                - g2.phi[r.node] * g2.phi_star[y] * g2.row(r.node).unwrap().values[y - g2.window.lo];
            let v = d / (g1.phi[r.node] * g1.phi_star[y]);
            lo = lo.min(v);
            hi = hi.max(v);
            sum += v;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::EmptySet);
    }
    let c = sum / count as f64;
    let verdict = if hi - lo <= RIGIDITY_TOL * (1.0 + c.abs()) { Equivalence::ConstantMultiple(c) } else { Equivalence::Distinct { min: lo, max: hi } };

    let y0 = *common.first().ok_or(Error::EmptySet)?;
    let inner: Vec<_> = exhaustion.windows().iter().filter(|w| w.closure().all(|i| g1.window.contains(i))).collect();
    let ra1_constants: Vec<f64> = inner
        .iter()
        .map(|w| {
            w.closure().filter(|x| x.abs_diff(y0) > collar).map(|x| (g2.g(x, y0).unwrap() - g1.g(x, y0).unwrap()) / g1.phi[x]).fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let ra1 = stabilizes(&ra1_constants);
    let ra2 = g1.rows.iter().find(|r| g2.row(r.node).is_some()).map(|r| {
        let x0 = r.node;
        let consts: Vec<f64> = inner
            .iter()
            .map(|w| {
                w.closure()
                    .filter(|y| y.abs_diff(x0) > collar)
                    .map(|y| (g2.g(x0, y).unwrap() - g1.g(x0, y).unwrap()) / g1.phi_star[y])
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        stabilizes(&consts)
    });
    let both = ra1 && ra2.unwrap_or(true);
    let consistent = matches!(verdict, Equivalence::ConstantMultiple(_)) == both;
    Ok(EquivalenceReport { verdict, ra1_constants, ra1, ra2, consistent })
}

/// A bound holds on the whole space when the minimal constants over the
/// last nested windows stop moving.
fn stabilizes(c: &[f64]) -> bool {
    match c {
        [.., a, b] => (b - a).abs() <= RIGIDITY_TOL * (1.0 + b.abs()),
        _ => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniquenessVerdict {
    Unique,
    /// The difference is not a multiple of `φ⊗φ*`: the second table is not
    /// in the Li–Tam class of the first.
    NotLiTam,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniquenessReport {
    /// `c` with `G2 - cφ⊗φ*` matching `G1` at `(x0, y0)`.
    pub shift: f64,
    pub sup_difference: f64,
    pub scale: f64,
    pub verdict: UniquenessVerdict,
}

const UNIQUENESS_TOL: f64 = 1e-8;

/// Renormalizes `g2` to agree with `g1` at `(x0, y0)` and measures the
/// remaining sup difference.
pub fn uniqueness_check(g1: &GreenTable, g2: &GreenTable, x0: usize, y0: usize) -> Result<UniquenessReport> {
    if g1.window != g2.window {
        return Err(Error::RegionMismatch);
    }
    let a = g1.g(x0, y0).ok_or(Error::RegionMismatch)?;
    let b = g2.g(x0, y0).ok_or(Error::RegionMismatch)?;
    let shift = (b - a) / (g1.phi[x0] * g1.phi_star[y0]);
    let mut sup = 0.0f64;
    for y in g1.poles() {
        if g2.column(y).is_err() {
            continue;
        }
        for x in g1.nodes() {
            let d = g2.g(x, y).unwrap() - shift * g1.phi[x] * g1.phi_star[y] - g1.g(x, y).unwrap();
            sup = sup.max(d.abs());
        }
    }
    let scale = g1.scale();
    let verdict = if sup <= UNIQUENESS_TOL * scale { UniquenessVerdict::Unique } else { UniquenessVerdict::NotLiTam };
    Ok(UniquenessReport { shift, sup_difference: sup, scale, verdict })
}
