mod common;

use common::*;
use greenlab_core::criticality::{extend_solution, DEFAULT_THRESHOLD, DEFAULT_TOL};
use greenlab_core::*;

/// Worst relative deviation from `x^a` over `(lo, hi)`, both sides equal to
/// one at `x = 1`.
fn power_error(phi: &GroundState, nodes: &[f64], a: f64, (lo, hi): (f64, f64)) -> f64 {
    max_abs(nodes.iter().zip(&phi.values).filter(|(&x, _)| x >= lo && x <= hi).map(|(&x, &v)| v / x.powf(a) - 1.0))
}

fn hardy_phi(jmax: usize, per: usize) -> (Setup, GroundState) {
    let cls = hardy_verdict();
    let s = hardy(jmax, per);
    let (p, seed) = (s.grid.nearest_node(1.0), s.grid.nearest_node(1.5));
    let phi = ground_state(&s.op, &s.ex, p, seed, &cls, 1e-4).unwrap().normalized_at(p);
    (s, phi)
}

#[test]
fn hardy_ground_state_is_root_x() {
    let (s, phi) = hardy_phi(8, 256);
    assert!(phi.residual < 1e-10, "{}", phi.residual);
    assert!(phi.convergence < 1e-4);
    assert!(power_error(&phi, s.grid.nodes(), 0.5, (1.0 / 256.0, 256.0)) < 1e-3);
}

#[test]
fn ground_state_error_is_second_order() {
    let e: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&per| {
            let (s, phi) = hardy_phi(6, per);
            power_error(&phi, s.grid.nodes(), 0.5, (0.25, 4.0))
        })
        .collect();
    for w in e.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 2.0).abs() < 0.3, "{e:?}");
    }
}

#[test]
fn gauge_transformed_ground_states() {
    // L = γ⁻¹ P γ with γ = x^0.3 is a nonsymmetric critical operator whose
    // ground states are x^0.2 and, for the adjoint, x^0.8.
    let big = hardy(24, 256);
    let gamma = |s: &Setup, a: f64| -> Vec<f64> { s.grid.nodes().iter().map(|x| x.powf(a)).collect() };
    let (l, _) = big.op.ground_state_transform(&gamma(&big, 0.3), &gamma(&big, -0.3)).unwrap();
    assert!(!l.is_symmetric());
    let (p, q) = (big.grid.nearest_node(1.0), big.grid.nearest_node(1.5));
    let cls = classify(&l, &big.ex, p, q, DEFAULT_TOL, DEFAULT_THRESHOLD).unwrap();
    assert_eq!(cls.verdict, Verdict::Critical);

    let s = hardy(8, 256);
    let (l, _) = s.op.ground_state_transform(&gamma(&s, 0.3), &gamma(&s, -0.3)).unwrap();
    let p = s.grid.nearest_node(1.0);
    let phi = ground_state(&l, &s.ex, p, q.min(s.grid.nearest_node(1.5)), &cls, 1e-4).unwrap().normalized_at(p);
    let phi_star = ground_state_adjoint(&l, &s.ex, p, s.grid.nearest_node(1.5), &cls, 1e-4).unwrap().normalized_at(p);
    let region = (1.0 / 64.0, 64.0);
    assert!(power_error(&phi, s.grid.nodes(), 0.2, region) < 2e-3);
    assert!(power_error(&phi_star, s.grid.nodes(), 0.8, region) < 2e-3);
}

#[test]
fn transform_by_ground_states_annihilates_constants() {
    let c = hardy_litam(6, 128, &[]);
    let (l, residual) = c.s.op.ground_state_transform(&c.phi.values, &c.phi_star.values).unwrap();
    assert!(residual < 1e-8);
    let ones = vec![1.0; l.len()];
    let scale = max_abs(l.matrix().diag.iter().copied());
    assert!(max_abs(l.apply(&ones)) < 1e-9 * scale);
    assert!(max_abs(l.adjoint().apply(&ones)) < 1e-9 * scale);
}

#[test]
fn subcritical_operators_have_no_ground_state() {
    let s = hardy(24, 256);
    let (p, q) = (s.grid.nearest_node(1.0), s.grid.nearest_node(1.5));
    let support = s.grid.nearest_node(0.3)..=s.grid.nearest_node(3.0);
    let op = s.op.perturb(&Coefficient::Constant(10.0), support).unwrap();
    let cls = classify(&op, &s.ex, p, q, DEFAULT_TOL, DEFAULT_THRESHOLD).unwrap();
    assert!(matches!(ground_state(&op, &s.ex, p, q, &cls, 1e-4), Err(Error::NotCritical)));
}

#[test]
fn ground_state_rejects_bad_reference_points() {
    let cls = hardy_verdict();
    let s = hardy(6, 64);
    let p = s.grid.nearest_node(1.0);
    assert!(matches!(ground_state(&s.op, &s.ex, p, p, &cls, 1e-4), Err(Error::PoleAtReference)));
    assert!(ground_state(&s.op, &s.ex, p, s.grid.nearest_node(10.0), &cls, 1e-4).is_err());
}

#[test]
fn planar_ground_state_is_constant() {
    let big = planar(23, 16385);
    let cls = classify(&big.op, &big.ex, 0, big.grid.nearest_node(1.5), DEFAULT_TOL, DEFAULT_THRESHOLD).unwrap();
    assert_eq!(cls.verdict, Verdict::Critical);
    let s = planar(8, 4097);
    let x0 = s.grid.nearest_node(0.5);
    let phi = ground_state(&s.op, &s.ex, 0, x0, &cls, 1e-4).unwrap();
    assert!(max_abs(phi.values.iter().map(|v| v - 1.0)) < 1e-9);
}

#[test]
fn extended_solutions_satisfy_the_equation() {
    let s = hardy(6, 128);
    let i = s.grid.nearest_node(1.0);
    let (a, b) = (s.grid.x(i), s.grid.x(i + 1));
    // √x log x is the second Hardy solution.
    let u = extend_solution(&s.op, i, (a.sqrt() * a.ln(), b.sqrt() * b.ln()));
    assert!(s.op.relative_residual(&u, s.op.first_unknown()..=s.op.last_unknown()) < 1e-10);
    let exact = |x: f64| x.sqrt() * x.ln();
    for &x in &[0.1, 4.0, 30.0] {
        let k = s.grid.nearest_node(x);
        let xk = s.grid.x(k);
        assert!((u[k] - exact(xk)).abs() < 1e-3 * xk.sqrt() * (1.0 + xk.ln().abs()));
    }
}
