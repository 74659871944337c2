#![allow(dead_code)]

use greenlab_core::*;

pub struct Setup {
    pub grid: GridDomain,
    pub op: DiscreteOperator,
    pub ex: Exhaustion,
}

pub fn setup(spec: &OperatorSpec, grid: GridDomain, schedule: Schedule, jmax: usize) -> Setup {
    let op = discretize(spec, &grid).unwrap();
    let ex = build_exhaustion(&grid, schedule, jmax).unwrap();
    Setup { grid, op, ex }
}

/// Hardy operator on `(2^-J, 2^J)` with `per` cells per unit of `log2 x`.
pub fn hardy(jmax: usize, per: usize) -> Setup {
    let e = 2f64.powi(jmax as i32);
    let grid = build_grid(Geometry::HalfLine, (1.0 / e, e), 2 * jmax * per + 1, Spacing::LogUniform).unwrap();
    setup(&OperatorSpec::hardy_halfline(), grid, Schedule::geometric(2.0), jmax)
}

/// `-u''` on `(-2^{J-1}, 2^{J-1})`, windows `(-2^{j-1}, 2^{j-1})`, step `1/per`.
pub fn laplace_line(jmax: usize, per: usize) -> Setup {
    let e = 0.5 * 2f64.powi(jmax as i32);
    let grid = build_grid(Geometry::Line, (-e, e), (2.0 * e) as usize * per + 1, Spacing::Uniform).unwrap();
    setup(&OperatorSpec::laplace_line(), grid, Schedule::Geometric { ratio: 2.0, scale: 0.5 }, jmax)
}

pub fn planar(jmax: usize, n: usize) -> Setup {
    let e = 2f64.powi(jmax as i32);
    let grid = build_grid(Geometry::Radial(2), (1e-3, e), n, Spacing::LogUniform).unwrap().with_origin().unwrap();
    setup(&OperatorSpec::laplace_radial(2), grid, Schedule::geometric(2.0), jmax)
}

/// Critical verdict from a deep Hardy exhaustion.
pub fn hardy_verdict() -> Classification {
    let s = hardy(24, 256);
    classify(&s.op, &s.ex, s.grid.nearest_node(1.0), s.grid.nearest_node(1.5), 1e-4, 50.0).unwrap()
}

pub struct Critical {
    pub s: Setup,
    pub p: usize,
    pub phi: GroundState,
    pub phi_star: GroundState,
    pub g: LiTamGreen,
}

/// Li–Tam construction on a Hardy grid with reference pole 1.
pub fn hardy_litam(jmax: usize, per: usize, poles: &[f64]) -> Critical {
    let cls = hardy_verdict();
    let s = hardy(jmax, per);
    let p = s.grid.nearest_node(1.0);
    let seed = s.grid.nearest_node(1.5);
    let phi = ground_state(&s.op, &s.ex, p, seed, &cls, 1e-4).unwrap().normalized_at(p);
    let phi_star = ground_state_adjoint(&s.op, &s.ex, p, seed, &cls, 1e-4).unwrap().normalized_at(p);
    let poles: Vec<usize> = poles.iter().map(|&y| s.grid.nearest_node(y)).collect();
    let opts = LiTamOptions { rows: vec![p], ..Default::default() };
    let g = litam_construct(&s.op, &s.ex, p, &poles, &phi, &phi_star, &opts).unwrap();
    Critical { s, p, phi, phi_star, g }
}

pub fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().map(f64::abs).fold(0.0, f64::max)
}
