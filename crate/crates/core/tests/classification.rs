mod common;

use common::*;
use greenlab_core::criticality::{DEFAULT_THRESHOLD, DEFAULT_TOL};
use greenlab_core::*;

fn verdict(s: &Setup, pole: f64, probe: f64) -> Result<Verdict> {
    let (p, q) = (s.grid.nearest_node(pole), s.grid.nearest_node(probe));
    classify(&s.op, &s.ex, p, q, DEFAULT_TOL, DEFAULT_THRESHOLD).map(|c| c.verdict)
}

fn halfline(spec: OperatorSpec, jmax: usize, per: usize) -> Setup {
    let e = 2f64.powi(jmax as i32);
    let grid = build_grid(Geometry::HalfLine, (1.0 / e, e), 2 * jmax * per + 1, Spacing::LogUniform).unwrap();
    setup(&spec, grid, Schedule::geometric(2.0), jmax)
}

fn radial3(jmax: usize) -> Setup {
    let e = 2f64.powi(jmax as i32);
    let grid = build_grid(Geometry::Radial(3), (1e-3, e), 8193, Spacing::LogUniform).unwrap().with_origin().unwrap();
    setup(&OperatorSpec::laplace_radial(3), grid, Schedule::geometric(2.0), jmax)
}

#[test]
fn battery() {
    assert_eq!(verdict(&hardy(24, 256), 1.0, 1.5).unwrap(), Verdict::Critical);
    assert_eq!(verdict(&halfline(OperatorSpec::laplace_halfline(), 20, 256), 1.0, 1.5).unwrap(), Verdict::Subcritical);
    assert_eq!(verdict(&halfline(OperatorSpec::hardy_subcritical(0.2), 40, 128), 1.0, 1.5).unwrap(), Verdict::Subcritical);
    assert_eq!(verdict(&radial3(16), 0.0, 0.5).unwrap(), Verdict::Subcritical);
    assert_eq!(verdict(&laplace_line(8, 8), 0.0, 0.25).unwrap(), Verdict::Critical);
}

#[test]
fn too_few_windows_is_indeterminate() {
    assert!(matches!(verdict(&hardy(4, 256), 1.0, 1.5), Err(Error::Indeterminate { windows: 4 })));
}

#[test]
fn probe_must_lie_off_the_pole_in_window_one() {
    let s = hardy(6, 64);
    let p = s.grid.nearest_node(1.0);
    assert!(classify(&s.op, &s.ex, p, p, DEFAULT_TOL, DEFAULT_THRESHOLD).is_err());
    assert!(classify(&s.op, &s.ex, p, s.grid.nearest_node(3.0), DEFAULT_TOL, DEFAULT_THRESHOLD).is_err());
}

#[test]
fn verdict_is_scale_invariant() {
    let s = hardy(24, 256);
    let (p, q) = (s.grid.nearest_node(1.0), s.grid.nearest_node(1.5));
    for lambda in [0.25, 3.0, 40.0] {
        let op = s.op.scaled(lambda);
        let c = classify(&op, &s.ex, p, q, DEFAULT_TOL, DEFAULT_THRESHOLD).unwrap();
        assert_eq!(c.verdict, Verdict::Critical, "lambda = {lambda}");
    }
}

#[test]
fn operator_and_adjoint_agree() {
    // Drifted line operator, critical through the gauge e^{bx}: constant drift
    // b with Ṽ = 0 gives -u'' + b u', annihilating constants.
    let spec = OperatorSpec::laplace_line().with_drift(Coefficient::Constant(0.0), Coefficient::Bump { height: 0.4, lo: -0.2, hi: 0.2 });
    let e = 128.0;
    let grid = build_grid(Geometry::Line, (-e, e), 2049, Spacing::Uniform).unwrap();
    let s = setup(&spec, grid, Schedule::Geometric { ratio: 2.0, scale: 0.5 }, 8);
    let (p, q) = (s.grid.nearest_node(0.0), s.grid.nearest_node(0.25));
    let a = classify(&s.op, &s.ex, p, q, DEFAULT_TOL, DEFAULT_THRESHOLD).unwrap().verdict;
    let b = classify(&s.op.adjoint(), &s.ex, p, q, DEFAULT_TOL, DEFAULT_THRESHOLD).unwrap().verdict;
    assert_eq!(a, b);
}

#[test]
fn nonnegative_perturbation_makes_hardy_subcritical() {
    let s = hardy(24, 256);
    let (p, q) = (s.grid.nearest_node(1.0), s.grid.nearest_node(1.5));
    // In log x the relative increments decay like 1/(ε L²), ε the mass of the
    // bump: a weak or narrow one needs far more windows to settle.
    let support = s.grid.nearest_node(0.3)..=s.grid.nearest_node(3.0);
    let op = s.op.perturb(&Coefficient::Constant(10.0), support).unwrap();
    let c = classify(&op, &s.ex, p, q, DEFAULT_TOL, DEFAULT_THRESHOLD).unwrap();
    assert_eq!(c.verdict, Verdict::Subcritical);
    assert!(c.limit.is_some());
}

#[test]
fn critical_evidence_grows_monotonically() {
    let s = hardy(24, 256);
    let c = classify(&s.op, &s.ex, s.grid.nearest_node(1.0), s.grid.nearest_node(1.5), DEFAULT_TOL, DEFAULT_THRESHOLD).unwrap();
    assert_eq!(c.evidence.len(), 24);
    // Window increments of the Hardy Green function are ½ log 2 · √x_probe.
    let expect = 0.5 * core::f64::consts::LN_2 * 1.5f64.sqrt();
    for r in &c.evidence[1..] {
        assert!((r.increment - expect).abs() < 1e-3 * expect, "{r:?}");
    }
}
