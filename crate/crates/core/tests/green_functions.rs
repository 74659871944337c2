mod common;

use common::*;
use greenlab_core::green::{annulus, boundary_stats, dirichlet_green, oscillation, ring, sandwich_check, POLE_COLLAR};
use greenlab_core::oracle::{compare, Norm, OracleCase};
use greenlab_core::*;
use proptest::prelude::*;

#[test]
fn hardy_window_matches_closed_form() {
    for j in [4.0f64, 16.0] {
        let grid = build_grid(Geometry::HalfLine, (1.0 / j, j), 2048, Spacing::LogUniform).unwrap();
        let op = discretize(&OperatorSpec::hardy_halfline(), &grid).unwrap();
        let w = grid.full_window();
        let pole = grid.nearest_node(1.0);
        let g = dirichlet_green(&op, &w, pole).unwrap();
        let region = (grid.x(w.lo), grid.x(w.hi));
        let r = compare(&g.to_full(grid.len()), grid.nodes(), &w, pole, &OracleCase::HardyWindow { j }, region, POLE_COLLAR, None, Norm::Sup).unwrap();
        assert!(r.error < 1e-2, "j = {j}: {r:?}");
    }
}

#[test]
fn interval_green_of_the_line_laplacian_is_piecewise_linear() {
    let s = laplace_line(4, 8);
    let w = *s.ex.window(4);
    let (a, b) = (s.grid.x(w.lo - 1), s.grid.x(w.hi + 1));
    for y in [w.lo + 3, (w.lo + w.hi) / 2, w.hi - 1] {
        let g = dirichlet_green(&s.op, &w, y).unwrap();
        let yv = s.grid.x(y);
        for i in w.closure() {
            let x = s.grid.x(i);
            let exact = (x.min(yv) - a) * (b - x.max(yv)) / (b - a);
            assert!((g.at(i) - exact).abs() < 1e-12, "x = {x}, y = {yv}");
        }
    }
}

#[test]
fn boundary_minima_on_the_first_window() {
    // I_j(1) at the window-1 boundary {1/2, 2} against the closed form.
    let s = hardy(6, 256);
    let p = s.grid.nearest_node(1.0);
    let seq = green_sequence(&s.op, &s.ex, p).unwrap();
    let ring1 = s.ex.window(1).boundary_nodes();
    for f in &seq.fields[1..] {
        let j = 2f64.powi(f.j as i32);
        let (lo, hi) = boundary_stats(f, &ring1).unwrap();
        let at = |x: f64| OracleCase::HardyWindow { j }.eval(x, 1.0).unwrap();
        let (a, b) = (at(0.5), at(2.0));
        assert!((lo - a.min(b)).abs() < 2e-3 * a.max(b), "j = {}", f.j);
        assert!((hi - a.max(b)).abs() < 2e-3 * a.max(b));
        assert!(lo <= hi);
    }
}

#[test]
fn oscillation_of_the_transformed_hardy_sequence_settles() {
    let c = hardy_litam(8, 256, &[]);
    let seq = &c.g.sequence;
    for k in 1..=3 {
        let ann = annulus(&c.s.ex, k, c.p, POLE_COLLAR);
        let om: Vec<f64> = seq[k..].iter().map(|f| oscillation(f, &ann).unwrap()).collect();
        for w in om.windows(2) {
            assert!((w[1] - w[0]).abs() <= 1e-2 * w[0], "k = {k}: {om:?}");
        }
    }
}

#[test]
fn sandwich_estimates_for_the_transformed_operator() {
    let c = hardy_litam(8, 256, &[]);
    let seq = &c.g.sequence;
    let scale = seq.iter().map(|f| f.max_abs()).fold(0.0, f64::max);
    for k in 1..4 {
        for j in k + 1..=seq.len() {
            let r = sandwich_check(seq, &c.s.ex, k, j, POLE_COLLAR).unwrap();
            assert!(r.lower_margin >= -1e-9 * scale && r.upper_margin >= -1e-9 * scale, "{r:?}");
        }
    }
    assert!(sandwich_check(seq, &c.s.ex, 2, 2, POLE_COLLAR).is_err());
}

#[test]
fn sandwich_is_shift_invariant() {
    let c = hardy_litam(6, 128, &[]);
    let seq = &c.g.sequence;
    let shifted: Vec<_> = seq
        .iter()
        .map(|f| {
            let mut g = f.clone();
            g.values.iter_mut().for_each(|v| *v += 3.0);
            g
        })
        .collect();
    let a = sandwich_check(seq, &c.s.ex, 1, 5, POLE_COLLAR).unwrap();
    let b = sandwich_check(&shifted, &c.s.ex, 1, 5, POLE_COLLAR).unwrap();
    assert!((a.omega - b.omega).abs() < 1e-12);
    // Only the g^k/ω term moves, by 3/ω.
    assert!((b.lower_margin - (a.lower_margin - 3.0 / a.omega)).abs() < 1e-10);
}

#[test]
fn ring_maxima_decrease_with_radius() {
    let c = hardy_litam(8, 256, &[]);
    let f = c.g.sequence.last().unwrap();
    let mut prev = f64::INFINITY;
    for r in POLE_COLLAR + 1..1500 {
        let nodes = ring(&f.window, c.p, r);
        let s = nodes.iter().map(|&i| f.at(i)).fold(f64::NEG_INFINITY, f64::max);
        assert!(s <= prev + 1e-12, "r = {r}");
        prev = s;
    }
}

fn drifted(b: f64, c: f64) -> OperatorSpec {
    OperatorSpec::laplace_line()
        .with_potential(Coefficient::Constant(c))
        .with_drift(Coefficient::Constant(b), Coefficient::Bump { height: 0.3, lo: -1.0, hi: 1.0 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sequences_increase_and_stay_positive(c in 0.0f64..2.0, off in -15i64..15, n in 129usize..200) {
        let grid = build_grid(Geometry::Line, (-4.0, 4.0), n, Spacing::Uniform).unwrap();
        let s = setup(&OperatorSpec::laplace_line().with_potential(Coefficient::Constant(c)), grid, Schedule::Linear { step: 1.0 }, 4);
        let pole = (n as i64 / 2 + off) as usize;
        let seq = green_sequence(&s.op, &s.ex, pole).unwrap();
        let scale = seq.fields.iter().map(|f| f.max_abs()).fold(0.0, f64::max);
        for m in &seq.monotonicity {
            prop_assert!(*m >= -1e-12 * scale);
        }
        for f in &seq.fields {
            prop_assert!(f.values.iter().all(|&v| v > 0.0));
        }
    }

    #[test]
    fn adjoint_green_is_the_transpose(b in -1.0f64..1.0, c in 0.5f64..2.0, x in 5usize..60, y in 5usize..60) {
        let grid = build_grid(Geometry::Line, (-3.0, 3.0), 65, Spacing::Uniform).unwrap();
        let op = discretize(&drifted(b, c), &grid).unwrap();
        let w = grid.full_window();
        let g = dirichlet_green(&op, &w, y).unwrap();
        let gs = dirichlet_green(&op.adjoint(), &w, x).unwrap();
        prop_assert!((g.at(x) - gs.at(y)).abs() <= 1e-12 * g.at(x).abs());
    }

    #[test]
    fn symmetric_operators_have_symmetric_green(c in 0.0f64..3.0, x in 1usize..63, y in 1usize..63) {
        let grid = build_grid(Geometry::HalfLine, (0.1, 10.0), 65, Spacing::LogUniform).unwrap();
        let op = discretize(&OperatorSpec::hardy_subcritical(0.1).with_potential(Coefficient::Constant(c)), &grid).unwrap();
        let w = grid.full_window();
        let gx = dirichlet_green(&op, &w, y).unwrap().at(x);
        let gy = dirichlet_green(&op, &w, x).unwrap().at(y);
        prop_assert!((gx - gy).abs() <= 1e-12 * gx.abs());
    }
}
