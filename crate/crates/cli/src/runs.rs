//! Experiment pipelines behind the subcommands, and their CSV renderings.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use greenlab_core::criticality::{probe_evidence, verdict_from_evidence, ProbeRow};
use greenlab_core::green::{green_sequence, GreenField};
use greenlab_core::litam::negative_tail_variant;
use greenlab_core::martin::{infinity_behavior_probe, martin_kernel, martin_limit_probe, EndReport, KernelField};
use greenlab_core::{ground_state, ground_state_adjoint, litam_construct, Classification, Error, GreenTable, GroundState, LiTamGreen, LiTamOptions, Verdict};

use crate::cells;
use crate::config::{node_of, Built, Run};
use crate::csv::Table;
use crate::Failure;

pub struct ClassifyOutcome {
    pub built: Built,
    pub evidence: Vec<ProbeRow>,
    pub verdict: Option<Verdict>,
    pub limit: Option<GreenField>,
}

impl ClassifyOutcome {
    pub fn classification(&self) -> Result<Classification, Failure> {
        match self.verdict {
            Some(v) => Ok(Classification { verdict: v, evidence: self.evidence.clone(), limit: self.limit.clone() }),
            None => Err(Error::Indeterminate { windows: self.evidence.len() }.into()),
        }
    }

    pub fn evidence_csv(&self) -> Table {
        let mut t = Table::new(&["j", "value", "increment", "ratio"]);
        for r in &self.evidence {
            t.row(cells![r.j, r.value, r.increment, r.ratio]);
        }
        t
    }
}

/// Runs the growth test on the classification grid; an indeterminate
/// verdict is reported, not raised, so the evidence can still be written.
pub fn classify_run(run: &Run) -> Result<ClassifyOutcome, Failure> {
    let built = run.classification.build(&run.operator)?;
    let (evidence, mut fields) = probe_evidence(&built.op, &built.exhaustion, built.pole, built.probe)?;
    let verdict = verdict_from_evidence(&evidence, run.tolerances.classify, run.tolerances.threshold);
    let limit = (verdict == Some(Verdict::Subcritical)).then(|| fields.pop()).flatten();
    Ok(ClassifyOutcome { built, evidence, verdict, limit })
}

pub fn classification(run: &Run) -> Result<Classification, Failure> {
    classify_run(run)?.classification()
}

/// Dirichlet Green functions of every construction window for the
/// construction pole, rows ordered by `(j, x-index)`.
pub fn green_csv(run: &Run) -> Result<Table, Failure> {
    let b = run.construction.build(&run.operator)?;
    let seq = green_sequence(&b.op, &b.exhaustion, b.pole)?;
    let mut t = Table::new(&["window_j", "x_index", "x", "g"]);
    for f in &seq.fields {
        for i in f.window.closure() {
            t.row(cells![f.j, i, b.grid.x(i), f.at(i)]);
        }
    }
    Ok(t)
}

pub struct CriticalRun {
    pub built: Built,
    pub classification: Classification,
    pub phi: GroundState,
    pub phi_star: GroundState,
    pub green: LiTamGreen,
    pub p: usize,
    pub x0: usize,
}

/// Ground states normalized at `x0`, from increments seeded off the pole.
pub fn ground_states(run: &Run, b: &Built, cls: &Classification, p: usize, x0: usize) -> Result<(GroundState, GroundState), Failure> {
    let seed = if b.probe != p { b.probe } else { p + 1 };
    let tol = run.tolerances.ground_state;
    let phi = ground_state(&b.op, &b.exhaustion, p, seed, cls, tol)?.normalized_at(x0);
    let phi_star = ground_state_adjoint(&b.op, &b.exhaustion, p, seed, cls, tol)?.normalized_at(x0);
    Ok((phi, phi_star))
}

/// Classification, ground states and the Li–Tam table with the configured
/// poles plus `extra`.
pub fn litam_run(run: &Run, extra: &[f64]) -> Result<CriticalRun, Failure> {
    let classification = classification(run)?;
    if classification.verdict != Verdict::Critical {
        return Err(Error::NotCritical.into());
    }
    let built = run.construction.build(&run.operator)?;
    let p = node_of(&built.grid, run.reference.p);
    let x0 = node_of(&built.grid, run.reference.x0);
    let (phi, phi_star) = ground_states(run, &built, &classification, p, x0)?;
    let mut poles: Vec<usize> = run.poles.iter().chain(extra).map(|&y| node_of(&built.grid, y)).collect();
    if !poles.contains(&x0) && x0 != p {
        poles.push(x0);
    }
    poles.dedup();
    let mut rows = vec![p];
    if x0 != p {
        rows.push(x0);
    }
    let options = LiTamOptions { tol: run.tolerances.litam, rows, ..Default::default() };
    let green = litam_construct(&built.op, &built.exhaustion, p, &poles, &phi, &phi_star, &options)?;
    Ok(CriticalRun { built, classification, phi, phi_star, green, p, x0 })
}

/// One row per `(x, y)` with `y` a pole, ordered by `(x-index, y-index)`.
pub fn green_table_csv(table: &GreenTable, nodes: &[f64], j: usize) -> Table {
    let mut t = Table::new(&["window_j", "x_index", "y_index", "x", "y", "J", "G", "phi_x", "phistar_y"]);
    let mut poles: Vec<usize> = table.poles().collect();
    poles.sort_unstable();
    for x in table.nodes() {
        for &y in &poles {
            t.row(cells![j, x, y, nodes[x], nodes[y], table.h(x, y).unwrap(), table.g(x, y).unwrap(), table.phi[x], table.phi_star[y]]);
        }
    }
    t
}

/// Cauchy diagnostics ordered by `(j, annulus, pole)`.
pub fn litam_diag_csv(g: &LiTamGreen, nodes: &[f64]) -> Table {
    let mut rows = g.diagnostics.clone();
    rows.sort_by_key(|r| (r.j, r.annulus, r.pole));
    let mut t = Table::new(&["window_j", "annulus_id", "pole_index", "pole", "alpha_j", "cauchy_increment"]);
    for r in rows {
        t.row(cells![r.j, r.annulus, r.pole, nodes[r.pole], r.alpha, r.increment]);
    }
    t
}

pub fn litam_report(run: &Run, c: &CriticalRun) -> String {
    let g = &c.green;
    let mut s = String::new();
    let nodes = c.built.grid.nodes();
    writeln!(s, "preset: {}", run.name).unwrap();
    writeln!(s, "verdict: Critical ({} classification windows)", c.classification.evidence.len()).unwrap();
    writeln!(s, "construction: {} nodes, {} windows, reference pole x = {}", nodes.len(), c.built.exhaustion.len(), nodes[c.p]).unwrap();
    writeln!(s, "ground state: residual {:.3e}, increment agreement {:.3e}", c.phi.residual, c.phi.convergence).unwrap();
    writeln!(s, "adjoint ground state: residual {:.3e}, increment agreement {:.3e}", c.phi_star.residual, c.phi_star.convergence).unwrap();
    writeln!(s, "transform residuals: |P phi| = {:.3e}, |P* phi*| = {:.3e}", g.transform_residuals.0, g.transform_residuals.1).unwrap();
    writeln!(s, "achieved Cauchy tolerance: {:.3e} (required {:.1e})", g.achieved_tol, run.tolerances.litam).unwrap();
    writeln!(s, "alpha_J: {}", crate::csv::float(*g.alpha.last().unwrap())).unwrap();
    let mut poles: Vec<usize> = g.table.poles().collect();
    poles.sort_unstable();
    for y in poles {
        if let Some(worst) = g.diagnostics.iter().filter(|r| r.pole == y && r.j == c.built.exhaustion.len()).map(|r| r.increment).reduce(f64::max) {
            writeln!(s, "pole x = {}: last Cauchy increment {:.3e}", nodes[y], worst).unwrap();
        }
    }
    s
}

pub struct MartinRun {
    pub critical: CriticalRun,
    pub variant: GreenTable,
    pub c_z: f64,
    pub kernel: KernelField,
    pub ladder: Vec<usize>,
    pub errors: Vec<f64>,
    pub ends: Vec<EndReport>,
}

/// Poles `y_m = extent(m)`, one per window boundary shell, `m = 3..=top`.
pub fn ladder_points(run: &Run, top: usize) -> Vec<f64> {
    (3..=top).map(|m| run.construction.schedule.extent(m)).collect()
}

pub fn martin_run(run: &Run, top: usize) -> Result<MartinRun, Failure> {
    if top < 3 || top >= run.construction.jmax {
        return Err(Failure::Config(format!("ladder top must lie in 3..{}", run.construction.jmax)));
    }
    let ys = ladder_points(run, top);
    let critical = litam_run(run, &ys)?;
    let grid = &critical.built.grid;
    let ladder: Vec<usize> = ys.iter().map(|&y| node_of(grid, y)).collect();
    let (variant, c_z) = negative_tail_variant(&critical.green.table, grid.nodes(), critical.x0, run.radius)?;
    let kernel = martin_kernel(&variant, critical.x0)?;
    let (lo, hi) = martin_region(run);
    let xs: Vec<usize> = variant.nodes().filter(|&i| grid.x(i) >= lo && grid.x(i) <= hi).collect();
    let errors = martin_limit_probe(&kernel, &critical.phi.values, &ladder, &xs)?;
    let ends = infinity_behavior_probe(&variant, grid.nodes(), run.operator.geometry, grid.regular_origin(), critical.p, &critical.built.exhaustion)?;
    Ok(MartinRun { critical, variant, c_z, kernel, ladder, errors, ends })
}

/// Compact set on which kernel limits are measured.
pub fn martin_region(run: &Run) -> (f64, f64) {
    match run.operator.geometry {
        greenlab_core::Geometry::Line => (-2.0, 2.0),
        _ if run.construction.origin => (0.0, 2.0),
        _ => (0.2, 5.0),
    }
}

impl MartinRun {
    pub fn kernel_csv(&self) -> Table {
        let nodes = self.critical.built.grid.nodes();
        let mut t = Table::new(&["x_index", "y_index", "x", "y", "K", "phi_x", "admissible"]);
        let mut order: Vec<usize> = (0..self.kernel.ys.len()).collect();
        order.sort_by_key(|&k| self.kernel.ys[k]);
        for (ix, &x) in self.kernel.xs.iter().enumerate() {
            for &iy in &order {
                let y = self.kernel.ys[iy];
                t.row(cells![x, y, nodes[x], nodes[y], self.kernel.values[iy][ix], self.critical.phi.values[x], self.kernel.admissible[iy]]);
            }
        }
        t
    }

    pub fn probe_csv(&self) -> Table {
        let mut t = Table::new(&["end", "window_j", "x", "min_G_over_phi", "fitted_rate"]);
        for e in &self.ends {
            let label = e.end.label(self.critical.built.grid.geometry());
            for s in &e.samples {
                t.row(cells![label, s.j, s.x, s.g_over_phi, e.rate]);
            }
        }
        t
    }

    pub fn limit_csv(&self) -> Table {
        let nodes = self.critical.built.grid.nodes();
        let mut t = Table::new(&["m", "y", "sup_error"]);
        for (k, (&y, &e)) in self.ladder.iter().zip(&self.errors).enumerate() {
            t.row(cells![k + 3, nodes[y], e]);
        }
        t
    }
}

pub fn ensure_dir(dir: &Path) -> Result<PathBuf, Failure> {
    std::fs::create_dir_all(dir)?;
    Ok(dir.to_path_buf())
}
