//! Naïm kernels of subcritical operators, Martin kernels of critical ones,
//! and probes of the behaviour of Green functions at the ends of the space.

use alloc::vec::Vec;

use crate::criticality::{Classification, Verdict};
use crate::error::{Error, Result};
use crate::green::dirichlet_green;
use crate::grid::{Exhaustion, Geometry};
use crate::operator::DiscreteOperator;
use crate::table::{GreenTable, Line};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Naim,
    Martin,
}

/// Kernel values `values[iy][ix]` on the sample `xs × ys`; `NAN` where the
/// kernel is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelField {
    pub kind: KernelKind,
    pub reference: usize,
    pub xs: Vec<usize>,
    pub ys: Vec<usize>,
    pub values: Vec<Vec<f64>>,
    /// Per pole: whether the kernel is defined there.
    pub admissible: Vec<bool>,
}

impl KernelField {
    pub fn get(&self, x: usize, y: usize) -> Option<f64> {
        let ix = self.xs.iter().position(|&v| v == x)?;
        let iy = self.ys.iter().position(|&v| v == y)?;
        let v = self.values[iy][ix];
        (!v.is_nan()).then_some(v)
    }
}

/// Green table of a subcritical operator taken from the largest window of
/// its classification run.
pub fn subcritical_table(op: &DiscreteOperator, classification: &Classification, poles: &[usize]) -> Result<GreenTable> {
    let window = match (&classification.verdict, &classification.limit) {
        (Verdict::Subcritical, Some(limit)) => limit.window,
        _ => return Err(Error::NotSubcritical),
    };
    let mut columns = Vec::with_capacity(poles.len());
    for &y in poles {
        let g = dirichlet_green(op, &window, y)?;
        columns.push(Line { node: y, values: g.values });
    }
    let ones = alloc::vec![1.0; op.len()];
    Ok(GreenTable { window, columns, rows: Vec::new(), phi: ones.clone(), phi_star: ones })
}

/// `θ(x,y) = G(x,y) / (G(x,x0) G(x0,y))` on `sample × sample`, off the
/// diagonal. The table needs columns at `x0` and at every sample point.
pub fn naim_kernel(table: &GreenTable, x0: usize, sample: &[usize]) -> Result<KernelField> {
    if sample.contains(&x0) {
        return Err(Error::PoleAtReference);
    }
    let c0 = table.column(x0)?;
    let lo = table.window.lo;
    let mut values = Vec::with_capacity(sample.len());
    for &y in sample {
        let cy = table.column(y)?;
        let g0y = cy.values[x0 - lo];
        let row = sample.iter().map(|&x| if x == y { f64::NAN } else { cy.values[x - lo] / (c0.values[x - lo] * g0y) }).collect();
        values.push(row);
    }
    Ok(KernelField { kind: KernelKind::Naim, reference: x0, xs: sample.to_vec(), ys: sample.to_vec(), values, admissible: alloc::vec![true; sample.len()] })
}

/// `max θ(x,y)/θ(y,x)` over the sampled pairs.
pub fn quasi_symmetry_constant(theta: &KernelField) -> Result<f64> {
    let mut c = f64::NEG_INFINITY;
    for &x in &theta.xs {
        for &y in &theta.ys {
            if let (Some(a), Some(b)) = (theta.get(x, y), theta.get(y, x)) {
                c = c.max(a / b);
            }
        }
    }
    if c == f64::NEG_INFINITY {
        return Err(Error::EmptySet);
    }
    Ok(c)
}

/// `K(x,y) = G(x,y)/G(x0,y)` for every pole of the table with
/// `G(x0,y) < 0`; other poles are masked.
pub fn martin_kernel(table: &GreenTable, x0: usize) -> Result<KernelField> {
    let xs: Vec<usize> = table.nodes().collect();
    let mut ys = Vec::new();
    let mut values = Vec::new();
    let mut admissible = Vec::new();
    for col in &table.columns {
        let y = col.node;
        let g0 = table.g(x0, y).ok_or(Error::RegionMismatch)?;
        let ok = g0 < 0.0;
        ys.push(y);
        admissible.push(ok);
        values.push(xs.iter().map(|&x| if ok { table.g(x, y).unwrap() / g0 } else { f64::NAN }).collect());
    }
    if !admissible.iter().any(|&a| a) {
        return Err(Error::NoAdmissiblePoles);
    }
    Ok(KernelField { kind: KernelKind::Martin, reference: x0, xs, ys, values, admissible })
}

/// `e_m = sup_{x ∈ xs} |K(x, y_m) - φ(x)|` along the pole ladder; `NAN` for
/// masked poles.
pub fn martin_limit_probe(kernel: &KernelField, phi: &[f64], ladder: &[usize], xs: &[usize]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(ladder.len());
    for &y in ladder {
        let iy = kernel.ys.iter().position(|&v| v == y).ok_or(Error::PoleNotInTable { pole: y })?;
        if !kernel.admissible[iy] {
            out.push(f64::NAN);
            continue;
        }
        let mut e = 0.0f64;
        for &x in xs {
            let k = kernel.get(x, y).ok_or(Error::RegionMismatch)?;
            e = e.max((k - phi[x]).abs());
        }
        out.push(e);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    /// `-∞` on the line, `0` on the half-line and punctured radial spaces.
    Lower,
    /// `+∞`.
    Upper,
}

impl End {
    pub fn label(self, geometry: Geometry) -> &'static str {
        match (self, geometry) {
            (End::Lower, Geometry::Line) => "-inf",
            (End::Lower, _) => "0",
            (End::Upper, _) => "inf",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndSample {
    pub j: usize,
    pub x: f64,
    pub g: f64,
    pub g_over_phi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EndReport {
    pub end: End,
    pub samples: Vec<EndSample>,
    /// `G/φ` strictly decreasing along the windows.
    pub divergent: bool,
    /// Least-squares slope of `G/φ` against `|x|` on the line and `|log x|`
    /// otherwise.
    pub rate: f64,
}

/// Values of `G(·,y)/φ` at the window boundaries towards each end.
pub fn infinity_behavior_probe(
    table: &GreenTable,
    nodes: &[f64],
    geometry: Geometry,
    regular_origin: bool,
    y: usize,
    exhaustion: &Exhaustion,
) -> Result<Vec<EndReport>> {
    table.column(y)?;
    let ends: &[End] = if regular_origin { &[End::Upper] } else { &[End::Lower, End::Upper] };
    let mut out = Vec::with_capacity(ends.len());
    for &end in ends {
        let mut samples = Vec::new();
        for (k, w) in exhaustion.windows().iter().enumerate() {
            let b = match end {
                End::Lower if w.has_lower_boundary() => w.lo - 1,
                End::Lower => continue,
                End::Upper => w.hi + 1,
            };
            if !table.window.contains(b) {
                continue;
            }
            let g = table.g(b, y).unwrap();
            samples.push(EndSample { j: k + 1, x: nodes[b], g, g_over_phi: g / table.phi[b] });
        }
        let divergent = samples.len() >= 2 && samples.windows(2).all(|s| s[1].g_over_phi < s[0].g_over_phi);
        let s = |x: f64| if geometry == Geometry::Line { x.abs() } else { libm::log(x).abs() };
        let pts: Vec<(f64, f64)> = samples.iter().map(|e| (s(e.x), e.g_over_phi)).collect();
        out.push(EndReport { end, samples, divergent, rate: slope(&pts) });
    }
    Ok(out)
}

/// Least-squares slope; `NAN` for fewer than two points.
pub fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn slope_of_a_line() {
        let pts = [(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)];
        assert!((slope(&pts) - 2.0).abs() < 1e-15);
        assert!(slope(&pts[..1]).is_nan());
    }

    #[test]
    fn single_pair_quasi_symmetry() {
        let k = KernelField {
            kind: KernelKind::Naim,
            reference: 0,
            xs: vec![1, 2],
            ys: vec![1, 2],
            values: vec![vec![f64::NAN, 2.0], vec![3.0, f64::NAN]],
            admissible: vec![true, true],
        };
        // θ(2,1) = 2, θ(1,2) = 3.
        assert_eq!(quasi_symmetry_constant(&k).unwrap(), 1.5);
    }

    #[test]
    fn end_labels() {
        assert_eq!(End::Lower.label(Geometry::Line), "-inf");
        assert_eq!(End::Lower.label(Geometry::HalfLine), "0");
        assert_eq!(End::Upper.label(Geometry::Radial(3)), "inf");
    }
}
