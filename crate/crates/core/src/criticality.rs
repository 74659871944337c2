//! Critical/subcritical classification from the growth of the exhaustion
//! Green sequence, and extraction of (adjoint) ground states.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::green::{green_sequence, GreenField};
use crate::grid::Exhaustion;
use crate::operator::DiscreteOperator;

/// Relative-increment tolerance of the convergence test.
pub const DEFAULT_TOL: f64 = 1e-4;
/// Required growth `g^J / g^1` of the divergence test.
pub const DEFAULT_THRESHOLD: f64 = 50.0;
/// Number of trailing windows that must satisfy the convergence test.
pub const TRAILING_WINDOWS: usize = 3;
/// Slack allowed when testing that increments are nondecreasing.
const INCREMENT_SLACK: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Critical,
    Subcritical,
}

/// One row of classification evidence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeRow {
    pub j: usize,
    /// `g^j(x_probe, pole)`.
    pub value: f64,
    /// `g^j - g^{j-1}` at the probe, zero for the first window.
    pub increment: f64,
    /// `increment / g^{j-1}`, zero for the first window.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub verdict: Verdict,
    pub evidence: Vec<ProbeRow>,
    /// Green function of the final window, the approximate limit; only for
    /// subcritical verdicts.
    pub limit: Option<GreenField>,
}

/// Probe values of the Green sequence without a verdict.
pub fn probe_evidence(op: &DiscreteOperator, exhaustion: &Exhaustion, pole: usize, probe: usize) -> Result<(Vec<ProbeRow>, Vec<GreenField>)> {
    if probe == pole || !exhaustion.window(1).contains(probe) {
        return Err(Error::PoleOutsideWindow { pole: probe });
    }
    let seq = green_sequence(op, exhaustion, pole)?;
    let mut rows = Vec::with_capacity(seq.fields.len());
    let mut prev: Option<f64> = None;
    for g in &seq.fields {
        let value = g.at(probe);
        let (increment, ratio) = match prev {
            Some(p) => (value - p, (value - p) / p),
            None => (0.0, 0.0),
        };
        rows.push(ProbeRow { j: g.j, value, increment, ratio });
        prev = Some(value);
    }
    Ok((rows, seq.fields))
}

/// Verdict from the evidence rows alone.
pub fn verdict_from_evidence(rows: &[ProbeRow], tol: f64, threshold: f64) -> Option<Verdict> {
    let n = rows.len();
    if n > TRAILING_WINDOWS && rows[n - TRAILING_WINDOWS..].iter().all(|r| r.ratio.abs() < tol) {
        return Some(Verdict::Subcritical);
    }
    let grew = n >= 2 && rows[n - 1].value > threshold * rows[0].value;
    let monotone = rows[1..].windows(2).all(|w| w[1].increment >= (1.0 - INCREMENT_SLACK) * w[0].increment && w[1].increment > 0.0);
    if grew && monotone {
        return Some(Verdict::Critical);
    }
    None
}

/// Classifies `op` from `g^j(x_probe, pole)` over the exhaustion.
pub fn classify(op: &DiscreteOperator, exhaustion: &Exhaustion, pole: usize, probe: usize, tol: f64, threshold: f64) -> Result<Classification> {
    let (evidence, mut fields) = probe_evidence(op, exhaustion, pole, probe)?;
    match verdict_from_evidence(&evidence, tol, threshold) {
        Some(Verdict::Subcritical) => Ok(Classification { verdict: Verdict::Subcritical, evidence, limit: fields.pop() }),
        Some(Verdict::Critical) => Ok(Classification { verdict: Verdict::Critical, evidence, limit: None }),
        None => Err(Error::Indeterminate { windows: exhaustion.len() }),
    }
}

/// Positive solution of `P φ = 0`, normalized by `φ(x0) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    /// Values on every grid node, boundary nodes included.
    pub values: Vec<f64>,
    pub x0: usize,
    /// Largest row-relative residual of `P φ` over the unknowns.
    pub residual: f64,
    /// Relative sup-distance of the last two normalized Green increments.
    pub convergence: f64,
}

impl GroundState {
    /// The same ground state rescaled to equal one at `node`.
    pub fn normalized_at(&self, node: usize) -> Self {
        let s = self.values[node];
        let mut values: Vec<f64> = self.values.iter().map(|v| v / s).collect();
        values[node] = 1.0;
        GroundState { values, x0: node, ..self.clone() }
    }
}

/// Continues a solution of `P u = 0` from its values at `i` and `i+1` over
/// every node of the grid by the three-term recurrence.
pub fn extend_solution(op: &DiscreteOperator, i: usize, seed: (f64, f64)) -> Vec<f64> {
    let n = op.len();
    let m = op.matrix();
    let mut u = vec![0.0; n];
    u[i] = seed.0;
    u[i + 1] = seed.1;
    for k in i + 1..=op.last_unknown() {
        u[k + 1] = if m.upper[k] != 0.0 {
            -(m.lower[k] * u[k - 1] + m.diag[k] * u[k]) / m.upper[k]
        } else {
            // No coupling to the next node (degenerate coefficients):
            // extrapolate geometrically.
            u[k] * u[k] / u[k - 1]
        };
    }
    for k in (op.first_unknown().max(1)..=i).rev() {
        u[k - 1] = if m.lower[k] != 0.0 { -(m.diag[k] * u[k] + m.upper[k] * u[k + 1]) / m.lower[k] } else { u[k] * u[k] / u[k + 1] };
    }
    u
}

/// Solution of `P u = 0` that satisfies the zero-flux row of a regular
/// origin, with `u_0 = 1`.
fn regular_solution(op: &DiscreteOperator) -> Vec<f64> {
    let m = op.matrix();
    extend_solution(op, 0, (1.0, -m.diag[0] / m.upper[0]))
}

/// Ground state from normalized Green increments.
///
/// `u_j = (g^{j+1} - g^j)/(g^{j+1} - g^j)(x0)` is a solution of `P u = 0`
/// on window `j`; the last two must agree to `tol` on the second-to-last
/// window. The last increment is then continued over the whole grid by the
/// recurrence so that `P φ = 0` holds on every unknown.
pub fn ground_state(op: &DiscreteOperator, exhaustion: &Exhaustion, pole: usize, x0: usize, classification: &Classification, tol: f64) -> Result<GroundState> {
    if classification.verdict != Verdict::Critical {
        return Err(Error::NotCritical);
    }
    if x0 == pole {
        return Err(Error::PoleAtReference);
    }
    if !exhaustion.window(1).contains(x0) {
        return Err(Error::PoleOutsideWindow { pole: x0 });
    }
    let nw = exhaustion.len();
    if nw < 3 {
        return Err(Error::NoConvergence { increment: f64::INFINITY });
    }
    let seq = green_sequence(op, exhaustion, pole)?;
    let increment = |j: usize| -> Vec<f64> {
        // Normalized increment on the closure of window j (1-based).
        let (a, b) = (&seq.fields[j - 1], &seq.fields[j]);
        let scale = b.at(x0) - a.at(x0);
        (0..op.len()).map(|i| (b.at(i) - a.at(i)) / scale).collect()
    };
    let last = increment(nw - 1);
    let prev = increment(nw - 2);
    let check = exhaustion.window(nw - 2).closure();
    let (mut diff, mut norm) = (0.0f64, 0.0f64);
    for i in check {
        diff = diff.max((last[i] - prev[i]).abs());
        norm = norm.max(prev[i].abs());
    }
    let convergence = diff / norm;
    if !(convergence <= tol) {
        return Err(Error::NoConvergence { increment: convergence });
    }
    let mut values = if op.first_unknown() == 0 {
        regular_solution(op)
    } else {
        let i = if x0 < op.last_unknown() { x0 } else { x0 - 1 };
        extend_solution(op, i, (last[i], last[i + 1]))
    };
    let s = values[x0];
    for v in values.iter_mut() {
        *v /= s;
    }
    values[x0] = 1.0;
    if let Some(i) = values.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::NonpositiveGroundState { node: i });
    }
    let residual = op.relative_residual(&values, op.first_unknown()..=op.last_unknown());
    Ok(GroundState { values, x0, residual, convergence })
}

/// Ground state of `P*`; criticality of `P` and `P*` coincide.
///
/// For ν-symmetric operators `P* = P` and `φ` itself is returned: two
/// separate recurrences would drift apart by rounding over long grids.
pub fn ground_state_adjoint(
    op: &DiscreteOperator,
    exhaustion: &Exhaustion,
    pole: usize,
    x0: usize,
    classification: &Classification,
    tol: f64,
) -> Result<GroundState> {
    if op.is_symmetric() {
        return ground_state(op, exhaustion, pole, x0, classification, tol);
    }
    ground_state(&op.adjoint(), exhaustion, pole, x0, classification, tol)
}
