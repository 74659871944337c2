//! Finite-volume realization of
//! `P u = -div(a ∇u + b̃ u) + b·∇u + c u`, divergence taken against
//! `dν = f dvol`, together with its exact discrete ν-adjoint.

use alloc::vec::Vec;

use crate::banded::Tridiagonal;
use crate::coefficient::Coefficient;
use crate::error::{Error, Result};
use crate::grid::{Geometry, GridDomain, Window};

/// Continuum coefficients of the operator.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec {
    /// Scalar diffusion, must be positive.
    pub a: Coefficient,
    /// Drift acting on the gradient.
    pub b: Coefficient,
    /// Drift inside the divergence.
    pub b_tilde: Coefficient,
    pub c: Coefficient,
    /// Density of ν against the volume form, must be positive.
    pub f: Coefficient,
    pub geometry: Geometry,
}

impl OperatorSpec {
    /// `-Δ` in the given geometry.
    pub fn laplace(geometry: Geometry) -> Self {
        OperatorSpec { a: Coefficient::ONE, b: Coefficient::ZERO, b_tilde: Coefficient::ZERO, c: Coefficient::ZERO, f: Coefficient::ONE, geometry }
    }

    pub fn laplace_line() -> Self {
        Self::laplace(Geometry::Line)
    }

    pub fn laplace_halfline() -> Self {
        Self::laplace(Geometry::HalfLine)
    }

    pub fn laplace_radial(dim: u32) -> Self {
        Self::laplace(Geometry::Radial(dim))
    }

    /// `-u'' + u` on the line.
    pub fn helmholtz_line() -> Self {
        Self::laplace_line().with_potential(Coefficient::ONE)
    }

    /// `-u'' - 1/(4x²) u` on the half-line, critical with ground state `√x`.
    pub fn hardy_halfline() -> Self {
        Self::hardy_subcritical(0.25)
    }

    /// `-u'' - λ/x² u` on the half-line; subcritical for `λ < 1/4`.
    pub fn hardy_subcritical(lambda: f64) -> Self {
        Self::laplace_halfline().with_potential(Coefficient::inverse_square(-lambda))
    }

    /// `-Δ - (N-2)²/(4|x|²)` on `R^N \ {0}`, radially reduced.
    pub fn hardy_radial(dim: u32) -> Self {
        let k = (dim as f64 - 2.0) * (dim as f64 - 2.0) / 4.0;
        Self::laplace_radial(dim).with_potential(Coefficient::inverse_square(-k))
    }

    pub fn with_potential(mut self, c: Coefficient) -> Self {
        self.c = c;
        self
    }

    pub fn with_drift(mut self, b: Coefficient, b_tilde: Coefficient) -> Self {
        self.b = b;
        self.b_tilde = b_tilde;
        self
    }

    /// Symmetric in `L²(ν)` on the given nodes (`b = b̃` pointwise).
    pub fn is_symmetric_on(&self, domain: &GridDomain) -> bool {
        domain.nodes().iter().all(|&x| self.b.eval(x) == self.b_tilde.eval(x))
    }
}

/// Banded matrices of `P` and `P*` on the unknowns of a grid.
///
/// Rows of Dirichlet boundary nodes are zero. Couplings from the first and
/// last unknowns to boundary nodes are kept and dropped by window solves.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperator {
    matrix: Tridiagonal,
    adjoint_matrix: Tridiagonal,
    masses: Vec<f64>,
    nodes: Vec<f64>,
    first_unknown: usize,
    last_unknown: usize,
    symmetric: bool,
}

fn harmonic_mean(p: f64, q: f64) -> f64 {
    2.0 * p * q / (p + q)
}

/// Finite-volume discretization on `domain`.
///
/// Face fluxes are `F = κ (u_{i+1} - u_i)/h + β (u_i + u_{i+1})/2` with
/// `κ` the harmonic mean of `f a` times the weight at the face and `β` the
/// arithmetic mean of `f b̃` times the weight. The gradient drift uses the
/// same face splitting, `[β'_+ (u_{i+1}-u_i) + β'_- (u_i-u_{i-1})]/(2 m_i)`,
/// which reduces to the centred difference on uniform grids and makes the
/// symmetric case exactly ν-self-adjoint.
pub fn discretize(spec: &OperatorSpec, domain: &GridDomain) -> Result<DiscreteOperator> {
    if spec.geometry != domain.geometry() {
        return Err(Error::GeometryMismatch);
    }
    let n = domain.len();
    let xs = domain.nodes();
    let mut fa = Vec::with_capacity(n);
    let mut fv = Vec::with_capacity(n);
    for (i, &x) in xs.iter().enumerate() {
        let f = spec.f.eval(x);
        let a = spec.a.eval(x);
        if !(f > 0.0) {
            return Err(Error::NonpositiveCoefficient { name: "f", node: i, value: f });
        }
        if !(a > 0.0) {
            return Err(Error::NonpositiveCoefficient { name: "a", node: i, value: a });
        }
        fa.push(f * a);
        fv.push(f);
    }
    let masses: Vec<f64> = domain.masses().iter().zip(&fv).map(|(m, f)| m * f).collect();

    // Face i+1/2 between nodes i and i+1.
    let mut kappa = Vec::with_capacity(n - 1);
    let mut beta = Vec::with_capacity(n - 1);
    let mut beta_grad = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let (x0, x1) = (xs[i], xs[i + 1]);
        let h = x1 - x0;
        let w = domain.geometry().weight(0.5 * (x0 + x1));
        kappa.push(harmonic_mean(fa[i], fa[i + 1]) * w / h);
        beta.push(0.5 * (fv[i] * spec.b_tilde.eval(x0) + fv[i + 1] * spec.b_tilde.eval(x1)) * w);
        beta_grad.push(0.5 * (fv[i] * spec.b.eval(x0) + fv[i + 1] * spec.b.eval(x1)) * w);
    }

    let first = domain.first_unknown();
    let last = domain.last_unknown();
    // The stencil is assembled on boundary nodes too so that the transpose
    // keeps the couplings of the outermost unknowns to the boundary; the
    // boundary rows are cleared afterwards.
    let mut mat = Tridiagonal::zeros(n);
    for i in 0..n {
        let m = masses[i];
        let mut diag = spec.c.eval(xs[i]) * m;
        if i > 0 {
            let (k, bt, bg) = (kappa[i - 1], beta[i - 1], beta_grad[i - 1]);
            // Contribution of F_{i-1/2} and the left half of the drift.
            mat.lower[i] = (-k + 0.5 * bt - 0.5 * bg) / m;
            diag += k + 0.5 * bt + 0.5 * bg;
        }
        if i + 1 < n {
            let (k, bt, bg) = (kappa[i], beta[i], beta_grad[i]);
            mat.upper[i] = (-k - 0.5 * bt + 0.5 * bg) / m;
            diag += k - 0.5 * bt - 0.5 * bg;
        }
        mat.diag[i] = diag / m;
    }
    let mut adjoint_matrix = mat.weighted_transpose(&masses);
    for i in (0..first).chain(last + 1..n) {
        mat.clear_row(i);
        adjoint_matrix.clear_row(i);
    }
    Ok(DiscreteOperator {
        matrix: mat,
        adjoint_matrix,
        masses,
        nodes: xs.to_vec(),
        first_unknown: first,
        last_unknown: last,
        symmetric: spec.is_symmetric_on(domain),
    })
}

impl DiscreteOperator {
    pub fn matrix(&self) -> &Tridiagonal {
        &self.matrix
    }

    pub fn adjoint_matrix(&self) -> &Tridiagonal {
        &self.adjoint_matrix
    }

    /// ν-masses `f_i m_i` of the dual cells.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn first_unknown(&self) -> usize {
        self.first_unknown
    }

    pub fn last_unknown(&self) -> usize {
        self.last_unknown
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// The operator with `P` and `P*` exchanged.
    pub fn adjoint(&self) -> Self {
        DiscreteOperator { matrix: self.adjoint_matrix.clone(), adjoint_matrix: self.matrix.clone(), ..self.clone() }
    }

    /// `P u` on the unknowns (zero on boundary rows).
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        (0..self.len()).map(|i| if (self.first_unknown..=self.last_unknown).contains(&i) { self.matrix.row_apply(i, u) } else { 0.0 }).collect()
    }

    /// Largest row-relative residual `|(P u)_i| / Σ_j |P_ij u_j|` over the
    /// unknowns in `rows`.
    pub fn relative_residual(&self, u: &[f64], rows: core::ops::RangeInclusive<usize>) -> f64 {
        rows.filter(|i| (self.first_unknown..=self.last_unknown).contains(i))
            .map(|i| {
                let scale = self.matrix.row_scale(i, u);
                if scale == 0.0 {
                    0.0
                } else {
                    self.matrix.row_apply(i, u).abs() / scale
                }
            })
            .fold(0.0, f64::max)
    }

    /// Largest `|(P u)_i|` over the unknowns in `rows`.
    pub fn absolute_residual(&self, u: &[f64], rows: core::ops::RangeInclusive<usize>) -> f64 {
        rows.filter(|i| (self.first_unknown..=self.last_unknown).contains(i)).map(|i| self.matrix.row_apply(i, u).abs()).fold(0.0, f64::max)
    }

    /// Conjugation `L u = φ* P(φ u)`: `L_ij = φ*_i P_ij φ_j`.
    ///
    /// The masses are unchanged, so `L* = φ P* φ*` is again the ν-weighted
    /// transpose and Green functions satisfy `G_P(x,y) = φ(x)φ*(y)G_L(x,y)`.
    /// Returns the transformed operator and `max |(P φ)_i|` over the unknowns.
    pub fn ground_state_transform(&self, phi: &[f64], phi_star: &[f64]) -> Result<(Self, f64)> {
        for (i, (&p, &q)) in phi.iter().zip(phi_star).enumerate() {
            if !(p > 0.0 && q > 0.0) {
                return Err(Error::NonpositiveGroundState { node: i });
            }
        }
        let n = self.len();
        let mut mat = Tridiagonal::zeros(n);
        for i in self.first_unknown..=self.last_unknown {
            mat.diag[i] = phi_star[i] * self.matrix.diag[i] * phi[i];
            if i > 0 {
                mat.lower[i] = phi_star[i] * self.matrix.lower[i] * phi[i - 1];
            }
            if i + 1 < n {
                mat.upper[i] = phi_star[i] * self.matrix.upper[i] * phi[i + 1];
            }
        }
        let residual = self.absolute_residual(phi, self.first_unknown..=self.last_unknown);
        // `L*_ij = φ_i P*_ij φ*_j`, the ν-weighted transpose of `L`.
        let mut adjoint_matrix = Tridiagonal::zeros(n);
        let a = &self.adjoint_matrix;
        for i in self.first_unknown..=self.last_unknown {
            adjoint_matrix.diag[i] = phi[i] * a.diag[i] * phi_star[i];
            if i > 0 {
                adjoint_matrix.lower[i] = phi[i] * a.lower[i] * phi_star[i - 1];
            }
            if i + 1 < n {
                adjoint_matrix.upper[i] = phi[i] * a.upper[i] * phi_star[i + 1];
            }
        }
        Ok((DiscreteOperator { matrix: mat, adjoint_matrix, symmetric: self.symmetric && phi == phi_star, ..self.clone() }, residual))
    }

    /// Adds the potential `W ≥ 0, W ≢ 0` on the nodes `support`.
    pub fn perturb(&self, w: &Coefficient, support: core::ops::RangeInclusive<usize>) -> Result<Self> {
        if support.is_empty() || *support.start() <= self.first_unknown || *support.end() >= self.last_unknown {
            return Err(Error::SupportTouchesBoundary);
        }
        let mut out = self.clone();
        let mut any = false;
        for i in support {
            let v = w.eval(self.nodes[i]);
            if v < 0.0 {
                return Err(Error::NegativePerturbation { node: i });
            }
            any |= v > 0.0;
            out.matrix.diag[i] += v;
            out.adjoint_matrix.diag[i] += v;
        }
        if !any {
            return Err(Error::ZeroPerturbation);
        }
        Ok(out)
    }

    /// Row-scaled operator `λ P`.
    pub fn scaled(&self, lambda: f64) -> Self {
        let scale = |t: &Tridiagonal| Tridiagonal {
            lower: t.lower.iter().map(|v| v * lambda).collect(),
            diag: t.diag.iter().map(|v| v * lambda).collect(),
            upper: t.upper.iter().map(|v| v * lambda).collect(),
        };
        DiscreteOperator { matrix: scale(&self.matrix), adjoint_matrix: scale(&self.adjoint_matrix), ..self.clone() }
    }

    /// Checks that the window lies inside the unknowns of this operator.
    pub(crate) fn check_window(&self, window: &Window) -> Result<()> {
        if window.lo < self.first_unknown || window.hi > self.last_unknown || window.is_empty() {
            return Err(Error::RegionMismatch);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, Spacing};

    fn line(n: usize) -> GridDomain {
        build_grid(Geometry::Line, (-1.0, 1.0), n, Spacing::Uniform).unwrap()
    }

    #[test]
    fn laplacian_row() {
        let g = line(21);
        let op = discretize(&OperatorSpec::laplace_line(), &g).unwrap();
        let h: f64 = 0.1;
        let m = op.matrix();
        for i in 1..20 {
            assert!((m.lower[i] + 1.0 / (h * h)).abs() < 1e-9);
            assert!((m.diag[i] - 2.0 / (h * h)).abs() < 1e-9);
            assert!((m.upper[i] + 1.0 / (h * h)).abs() < 1e-9);
        }
        assert_eq!(m.diag[0], 0.0);
        assert_eq!(m.diag[20], 0.0);
    }

    #[test]
    fn hardy_adds_inverse_square_diagonal() {
        let g = build_grid(Geometry::HalfLine, (0.25, 4.0), 64, Spacing::LogUniform).unwrap();
        let lap = discretize(&OperatorSpec::laplace_halfline(), &g).unwrap();
        let hardy = discretize(&OperatorSpec::hardy_halfline(), &g).unwrap();
        for i in 1..63 {
            let x = g.x(i);
            let d = hardy.matrix().diag[i] - lap.matrix().diag[i];
            assert!((d + 0.25 / (x * x)).abs() < 1e-12 * lap.matrix().diag[i]);
            assert_eq!(hardy.matrix().lower[i], lap.matrix().lower[i]);
        }
    }

    #[test]
    fn geometry_and_sign_errors() {
        let g = line(16);
        assert_eq!(discretize(&OperatorSpec::hardy_halfline(), &g), Err(Error::GeometryMismatch));
        let mut spec = OperatorSpec::laplace_line();
        spec.a = Coefficient::Constant(-1.0);
        assert!(matches!(discretize(&spec, &g), Err(Error::NonpositiveCoefficient { name: "a", .. })));
        let mut spec = OperatorSpec::laplace_line();
        spec.f = Coefficient::ZERO;
        assert!(matches!(discretize(&spec, &g), Err(Error::NonpositiveCoefficient { name: "f", .. })));
    }

    #[test]
    fn constants_are_annihilated_without_potential() {
        let g = build_grid(Geometry::Radial(3), (0.0, 2.0), 101, Spacing::Uniform).unwrap();
        let mut spec = OperatorSpec::laplace_radial(3);
        spec.a = Coefficient::Power { coef: 1.0, exponent: 1.0 }.scaled(0.5);
        spec.a = Coefficient::Sum(alloc::vec![spec.a.clone(), Coefficient::ONE]);
        let op = discretize(&spec, &g).unwrap();
        let ones = alloc::vec![1.0; g.len()];
        let pu = op.apply(&ones);
        for (i, v) in pu.iter().enumerate().take(g.len() - 2) {
            let scale = op.matrix().row_scale(i, &ones);
            assert!(v.abs() <= 1e-12 * scale, "row {i}: {v}");
        }
    }

    #[test]
    fn identity_transform_is_neutral() {
        let g = line(32);
        let op = discretize(&OperatorSpec::helmholtz_line(), &g).unwrap();
        let ones = alloc::vec![1.0; 32];
        let (l, _) = op.ground_state_transform(&ones, &ones).unwrap();
        assert_eq!(l.matrix(), op.matrix());
    }

    #[test]
    fn transform_rejects_nonpositive_states() {
        let g = line(16);
        let op = discretize(&OperatorSpec::laplace_line(), &g).unwrap();
        let mut phi = alloc::vec![1.0; 16];
        phi[3] = 0.0;
        assert_eq!(op.ground_state_transform(&phi, &phi).unwrap_err(), Error::NonpositiveGroundState { node: 3 });
    }

    #[test]
    fn perturbation_errors() {
        let g = line(41);
        let op = discretize(&OperatorSpec::laplace_line(), &g).unwrap();
        assert_eq!(op.perturb(&Coefficient::ZERO, 5..=10), Err(Error::ZeroPerturbation));
        assert_eq!(op.perturb(&Coefficient::Constant(-1.0), 5..=10), Err(Error::NegativePerturbation { node: 5 }));
        assert_eq!(op.perturb(&Coefficient::ONE, 0..=10), Err(Error::SupportTouchesBoundary));
        assert_eq!(op.perturb(&Coefficient::ONE, 30..=39), Err(Error::SupportTouchesBoundary));
    }

    #[test]
    fn perturb_commutes_with_adjoint() {
        let g = line(41);
        let spec = OperatorSpec::laplace_line().with_drift(Coefficient::ONE, Coefficient::ZERO);
        let op = discretize(&spec, &g).unwrap();
        let w = Coefficient::Bump { height: 1.0, lo: -0.5, hi: 0.5 };
        let a = op.perturb(&w, 5..=35).unwrap().adjoint();
        let b = op.adjoint().perturb(&w, 5..=35).unwrap();
        assert_eq!(a, b);
    }
}
