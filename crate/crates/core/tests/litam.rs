mod common;

use common::*;
use greenlab_core::criticality::{DEFAULT_THRESHOLD, DEFAULT_TOL};
use greenlab_core::litam::*;
use greenlab_core::martin::slope;
use greenlab_core::*;

fn critical_on(s: Setup, cls: &Classification, p: usize, seed: usize, poles: &[usize]) -> Critical {
    let phi = ground_state(&s.op, &s.ex, p, seed, cls, 1e-4).unwrap().normalized_at(p);
    let phi_star = ground_state_adjoint(&s.op, &s.ex, p, seed, cls, 1e-4).unwrap().normalized_at(p);
    let opts = LiTamOptions { rows: vec![p], ..Default::default() };
    let g = litam_construct(&s.op, &s.ex, p, poles, &phi, &phi_star, &opts).unwrap();
    Critical { s, p, phi, phi_star, g }
}

fn line_critical(poles: &[f64]) -> Critical {
    let s = laplace_line(8, 8);
    let (p, q) = (s.grid.nearest_node(0.0), s.grid.nearest_node(0.25));
    let cls = classify(&s.op, &s.ex, p, q, DEFAULT_TOL, DEFAULT_THRESHOLD).unwrap();
    let poles: Vec<usize> = poles.iter().map(|&y| s.grid.nearest_node(y)).collect();
    critical_on(s, &cls, p, q, &poles)
}

#[test]
fn line_laplacian_limit_is_exact() {
    let c = line_critical(&[0.5]);
    assert!(c.g.achieved_tol <= 1e-5);
    let t = &c.g.table;
    let x = c.s.grid.nodes();
    let e = 128.0;
    for i in t.nodes() {
        assert!((t.h(i, c.p).unwrap() - (0.5 - 0.5 * x[i].abs())).abs() < 1e-10, "x = {}", x[i]);
    }
    // The extra pole carries the window correction -xy/(2E).
    let y = c.s.grid.nearest_node(0.5);
    for i in t.nodes() {
        let exact = 0.5 - 0.5 * (x[i] - x[y]).abs() - x[i] * x[y] / (2.0 * e);
        assert!((t.h(i, y).unwrap() - exact).abs() < 1e-10);
    }
}

#[test]
fn hardy_limit_is_log_profile_up_to_a_constant() {
    let c = hardy_litam(8, 256, &[]);
    assert!(c.g.achieved_tol <= 1e-5, "{}", c.g.achieved_tol);
    let t = &c.g.table;
    let x = c.s.grid.nodes();
    let shift: Vec<f64> =
        t.nodes().filter(|&i| x[i] >= 0.05 && x[i] <= 20.0 && i.abs_diff(c.p) > 2).map(|i| t.h(i, c.p).unwrap() + 0.5 * x[i].ln().abs()).collect();
    let (lo, hi) = shift.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(hi - lo < 2e-2, "J + |log x|/2 ranges over [{lo}, {hi}]");
}

#[test]
fn planar_limit_has_logarithmic_slope() {
    let big = planar(23, 16385);
    let cls = classify(&big.op, &big.ex, 0, big.grid.nearest_node(1.5), DEFAULT_TOL, DEFAULT_THRESHOLD).unwrap();
    let s = planar(8, 4097);
    let seed = s.grid.nearest_node(0.5);
    let c = critical_on(s, &cls, 0, seed, &[]);
    let x = c.s.grid.nodes();
    let pts: Vec<(f64, f64)> = c.g.table.nodes().filter(|&i| x[i] >= 0.1 && x[i] <= 200.0).map(|i| (x[i].ln(), c.g.table.g(i, 0).unwrap())).collect();
    let target = -1.0 / (2.0 * core::f64::consts::PI);
    assert!((slope(&pts) / target - 1.0).abs() < 1e-3, "{}", slope(&pts));
}

#[test]
fn reference_row_mirrors_the_column_for_symmetric_operators() {
    let c = hardy_litam(6, 128, &[]);
    let t = &c.g.table;
    let col = t.column(c.p).unwrap();
    let row = t.row(c.p).unwrap();
    assert!(max_abs(col.values.iter().zip(&row.values).map(|(a, b)| a - b)) < 1e-10);
}

#[test]
fn unreachable_tolerance_is_reported() {
    let c = hardy_litam(6, 128, &[]);
    let opts = LiTamOptions { tol: 1e-15, ..Default::default() };
    let r = litam_construct(&c.s.op, &c.s.ex, c.p, &[], &c.phi, &c.phi_star, &opts);
    assert!(matches!(r, Err(Error::NoConvergence { .. })));
    let u = litam_unchecked(&c.s.op, &c.s.ex, c.p, &[], &c.phi, &c.phi_star, &opts).unwrap();
    assert!(u.achieved_tol > 1e-15 && u.achieved_tol <= 1e-5);
}

#[test]
fn constant_shifts_stay_in_the_class() {
    let c = hardy_litam(6, 128, &[1.5]);
    let t = &c.g.table;
    let t2 = t.shifted(0.75);
    let eq = class_equivalence_test(t, &t2, &c.s.ex, 2).unwrap();
    match eq.verdict {
        Equivalence::ConstantMultiple(v) => assert!((v - 0.75).abs() < 1e-12),
        other => panic!("{other:?}"),
    }
    assert!(eq.ra1 && eq.ra2 == Some(true) && eq.consistent);
    let y0 = c.s.grid.nearest_node(1.5);
    let u = uniqueness_check(t, &t2, c.p, y0).unwrap();
    assert_eq!(u.verdict, UniquenessVerdict::Unique);
    assert!((u.shift + 0.75).abs() < 1e-12);
}

#[test]
fn separable_perturbations_leave_the_class() {
    let c = hardy_litam(6, 128, &[1.5]);
    let x = c.s.grid.nodes();
    let i = c.p;
    let seed = |o: &DiscreteOperator| criticality::extend_solution(o, i, (x[i].sqrt() * x[i].ln(), x[i + 1].sqrt() * x[i + 1].ln()));
    let chi = seed(&c.s.op);
    let chi_star = seed(&c.s.op.adjoint());
    let t3 = extended_member(&c.g.table, &c.s.op, &chi, &chi_star, 1e-10).unwrap();
    let eq = class_equivalence_test(&c.g.table, &t3, &c.s.ex, 2).unwrap();
    assert!(matches!(eq.verdict, Equivalence::Distinct { .. }));
    assert!(!eq.ra1);
    assert!(eq.consistent);
    let u = uniqueness_check(&c.g.table, &t3, c.p, c.s.grid.nearest_node(1.5)).unwrap();
    assert_eq!(u.verdict, UniquenessVerdict::NotLiTam);
    // A non-solution is refused.
    let junk: Vec<f64> = x.iter().map(|v| v * v).collect();
    assert!(matches!(extended_member(&c.g.table, &c.s.op, &junk, &chi_star, 1e-10), Err(Error::NotASolution { .. })));
}

#[test]
fn limit_sandwich_holds() {
    let c = hardy_litam(8, 256, &[]);
    for k in 1..=3 {
        let b = sandwich_bounds_check(&c.g, &c.s.ex, k).unwrap();
        assert!(b.lower_margin >= -1e-8 * b.scale && b.upper_margin >= -1e-8 * b.scale, "{b:?}");
    }
    assert!(sandwich_bounds_check(&c.g, &c.s.ex, 4).is_err());
    assert!(sandwich_bounds_check(&c.g, &c.s.ex, 0).is_err());
}

#[test]
fn bounded_above_and_divergent_below() {
    let c = line_critical(&[0.5]);
    let x = c.s.grid.nodes();
    for y in c.g.table.poles() {
        let b = bounded_above_check(&c.g.table, x, y, 0.25).unwrap();
        assert!(b.c.is_finite() && b.c <= 0.5);
    }
    let b = bounded_above_check(&c.g.table, x, c.p, 0.25).unwrap();
    assert!(b.c_adjoint.is_some());
    let minima = liminf_probe(&c.g.table, c.p, &c.s.ex).unwrap();
    assert!(minima.len() >= 6);
    for w in minima.windows(2) {
        assert!(w[1].1 < w[0].1);
    }
    // J(x, 0) = ½ - |x|/2 at the boundary nodes |x| = 2^{j-1}.
    let (j, m) = *minima.last().unwrap();
    let edge = 0.5 * 2f64.powi(j as i32);
    assert!((m - (0.5 - 0.5 * edge)).abs() < 1e-9, "{m}");
}

#[test]
fn negative_tail_variant_is_nonpositive_away_from_z() {
    let c = hardy_litam(6, 128, &[1.5]);
    let x = c.s.grid.nodes();
    let z = c.s.grid.nearest_node(1.5);
    let (v, cz) = negative_tail_variant(&c.g.table, x, z, 0.1).unwrap();
    let col = v.column(z).unwrap();
    let mut touched = false;
    for (i, &h) in v.nodes().zip(&col.values) {
        if (x[i] - x[z]).abs() >= 0.1 {
            assert!(h <= 1e-14);
            touched |= h.abs() < 1e-14;
        }
    }
    assert!(touched, "the maximum should be attained");
    assert!((v.h(z, z).unwrap() - (c.g.table.h(z, z).unwrap() - cz)).abs() < 1e-14);
    assert!(negative_tail_variant(&c.g.table, x, z, 1e6).is_err());
}
