//! Run configuration: named presets, TOML files and command-line overrides.

use std::path::{Path, PathBuf};

use greenlab_core::{build_exhaustion, build_grid, Coefficient, DiscreteOperator, Exhaustion, Geometry, GridDomain, OperatorSpec, Schedule, Spacing};
use serde::Deserialize;

use crate::Failure;

/// Grid, exhaustion and probe points for one stage of a run.
///
/// The grid spans exactly the last window, so `jmax` and the schedule fix
/// its extent; `inner` is the first positive node of grids with a regular
/// origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Setup {
    pub n: usize,
    pub spacing: Spacing,
    pub origin: bool,
    pub inner: f64,
    pub schedule: Schedule,
    pub jmax: usize,
    pub pole: f64,
    pub probe: f64,
}

/// Setup turned into grid objects.
pub struct Built {
    pub grid: GridDomain,
    pub op: DiscreteOperator,
    pub exhaustion: Exhaustion,
    pub pole: usize,
    pub probe: usize,
}

impl Setup {
    pub fn range(&self, geometry: Geometry) -> (f64, f64) {
        let e = self.schedule.extent(self.jmax);
        match geometry {
            Geometry::Line => (-e, e),
            _ if self.origin => (self.inner, e),
            _ => (1.0 / e, e),
        }
    }

    pub fn build(&self, spec: &OperatorSpec) -> Result<Built, Failure> {
        let range = self.range(spec.geometry);
        let mut grid = build_grid(spec.geometry, range, self.n, self.spacing)?;
        if self.origin {
            grid = grid.with_origin()?;
        }
        let op = discretize_checked(spec, &grid)?;
        let exhaustion = build_exhaustion(&grid, self.schedule, self.jmax)?;
        let pole = node_of(&grid, self.pole);
        let probe = node_of(&grid, self.probe);
        Ok(Built { grid, op, exhaustion, pole, probe })
    }
}

fn discretize_checked(spec: &OperatorSpec, grid: &GridDomain) -> Result<DiscreteOperator, Failure> {
    Ok(greenlab_core::discretize(spec, grid)?)
}

/// Nearest node; `0` maps to the origin node of grids that carry one.
pub fn node_of(grid: &GridDomain, x: f64) -> usize {
    if x == 0.0 && grid.regular_origin() {
        0
    } else {
        grid.nearest_node(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference {
    /// Reference pole of the construction.
    pub p: f64,
    /// Normalization point of ground states and kernels.
    pub x0: f64,
    /// Pole used for uniqueness renormalization.
    pub y0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub classify: f64,
    pub threshold: f64,
    pub ground_state: f64,
    pub litam: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            classify: greenlab_core::criticality::DEFAULT_TOL,
            threshold: greenlab_core::criticality::DEFAULT_THRESHOLD,
            ground_state: 1e-4,
            litam: 1e-5,
        }
    }
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub name: String,
    pub operator: OperatorSpec,
    /// Grid on which the verdict is decided; usually much larger.
    pub classification: Setup,
    /// Grid of ground states, Green tables and kernels.
    pub construction: Setup,
    /// Extra poles of the Green table.
    pub poles: Vec<f64>,
    pub reference: Reference,
    /// Radius of the neighbourhoods `U_z`.
    pub radius: f64,
    pub tolerances: Tolerances,
    pub out: PathBuf,
}

pub const PRESETS: &[&str] =
    &["hardy_halfline", "laplace_line", "laplace_halfline", "laplace_radial2", "laplace_radial3", "helmholtz_line", "hardy_subcritical", "hardy_radial3"];

fn log_setup(jmax: usize, n: usize, pole: f64) -> Setup {
    Setup { n, spacing: Spacing::LogUniform, origin: false, inner: 0.0, schedule: Schedule::geometric(2.0), jmax, pole, probe: 1.5 }
}

fn origin_setup(jmax: usize, n: usize) -> Setup {
    Setup { origin: true, inner: 1e-3, pole: 0.0, ..log_setup(jmax, n, 0.0) }
}

fn line_setup(jmax: usize, n: usize) -> Setup {
    Setup { n, spacing: Spacing::Uniform, origin: false, inner: 0.0, schedule: Schedule::Geometric { ratio: 2.0, scale: 0.5 }, jmax, pole: 0.0, probe: 0.5 }
}

pub fn preset(name: &str) -> Result<Run, Failure> {
    let tol = Tolerances::default();
    let out = PathBuf::from("out");
    let hardy_ref = Reference { p: 1.0, x0: 1.0, y0: 1.5 };
    let run = |operator: OperatorSpec, classification: Setup, construction: Setup, poles: Vec<f64>, reference: Reference, radius: f64| Run {
        name: name.to_string(),
        operator,
        classification,
        construction,
        poles,
        reference,
        radius,
        tolerances: tol,
        out: out.clone(),
    };
    Ok(match name {
        "hardy_halfline" => run(OperatorSpec::hardy_halfline(), log_setup(24, 16385, 1.0), log_setup(10, 10241, 1.0), vec![1.5], hardy_ref, 0.1),
        "laplace_line" => {
            let s = line_setup(8, 4097);
            run(OperatorSpec::laplace_line(), s.clone(), s, vec![0.5], Reference { p: 0.0, x0: 0.0, y0: 0.5 }, 0.25)
        }
        "laplace_halfline" => run(OperatorSpec::laplace_halfline(), log_setup(20, 16385, 1.0), log_setup(20, 16385, 1.0), vec![1.5], hardy_ref, 0.1),
        "laplace_radial2" => {
            run(OperatorSpec::laplace_radial(2), origin_setup(23, 16385), origin_setup(8, 4097), vec![], Reference { p: 0.0, x0: 0.0, y0: 0.0 }, 0.1)
        }
        "laplace_radial3" => {
            let s = origin_setup(20, 16385);
            run(OperatorSpec::laplace_radial(3), s.clone(), s, vec![], Reference { p: 0.0, x0: 0.0, y0: 0.0 }, 0.1)
        }
        "helmholtz_line" => {
            let s = Setup { schedule: Schedule::Geometric { ratio: 2.0, scale: 0.5 }, ..line_setup(7, 4097) };
            run(OperatorSpec::helmholtz_line(), s.clone(), s, vec![0.5], Reference { p: 0.0, x0: 0.0, y0: 0.5 }, 0.25)
        }
        "hardy_subcritical" => {
            let s = log_setup(40, 16385, 1.0);
            run(OperatorSpec::hardy_subcritical(0.2), s.clone(), s, vec![1.5], hardy_ref, 0.1)
        }
        "hardy_radial3" => run(OperatorSpec::hardy_radial(3), log_setup(24, 16385, 1.0), log_setup(10, 10241, 1.0), vec![1.5], hardy_ref, 0.1),
        _ => return Err(Failure::Config(format!("unknown preset `{name}` (known: {})", PRESETS.join(", ")))),
    })
}

// ---- TOML --------------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub operator: Option<OperatorConfig>,
    pub classification: Option<SetupPatch>,
    pub construction: Option<SetupPatch>,
    pub poles: Option<Vec<f64>>,
    pub reference: Option<ReferencePatch>,
    pub radius: Option<f64>,
    pub tolerances: Option<TolerancePatch>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorConfig {
    pub geometry: GeometryName,
    /// Dimension of radial geometries.
    pub dim: Option<u32>,
    #[serde(default = "one")]
    pub a: CoefConfig,
    #[serde(default = "zero")]
    pub b: CoefConfig,
    #[serde(default = "zero")]
    pub b_tilde: CoefConfig,
    #[serde(default = "zero")]
    pub c: CoefConfig,
    #[serde(default = "one")]
    pub f: CoefConfig,
}

fn one() -> CoefConfig {
    CoefConfig::Number(1.0)
}

fn zero() -> CoefConfig {
    CoefConfig::Number(0.0)
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryName {
    Line,
    Halfline,
    Radial,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum CoefConfig {
    Number(f64),
    Form(CoefForm),
    Sum(Vec<CoefForm>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefForm {
    Constant { value: f64 },
    Power { coef: f64, exponent: f64 },
    InverseSquare { coef: f64 },
    Bump { height: f64, lo: f64, hi: f64 },
}

impl CoefForm {
    fn to_coefficient(&self) -> Coefficient {
        match *self {
            CoefForm::Constant { value } => Coefficient::Constant(value),
            CoefForm::Power { coef, exponent } => Coefficient::Power { coef, exponent },
            CoefForm::InverseSquare { coef } => Coefficient::inverse_square(coef),
            CoefForm::Bump { height, lo, hi } => Coefficient::Bump { height, lo, hi },
        }
    }
}

impl CoefConfig {
    pub fn to_coefficient(&self) -> Coefficient {
        match self {
            CoefConfig::Number(v) => Coefficient::Constant(*v),
            CoefConfig::Form(f) => f.to_coefficient(),
            CoefConfig::Sum(v) => Coefficient::Sum(v.iter().map(CoefForm::to_coefficient).collect()),
        }
    }
}

impl OperatorConfig {
    pub fn to_spec(&self) -> Result<OperatorSpec, Failure> {
        let geometry = match (self.geometry, self.dim) {
            (GeometryName::Line, None) => Geometry::Line,
            (GeometryName::Halfline, None) => Geometry::HalfLine,
            (GeometryName::Radial, Some(d)) if d >= 2 => Geometry::Radial(d),
            (GeometryName::Radial, _) => return Err(Failure::Config("radial geometry needs `dim` >= 2".into())),
            (_, Some(_)) => return Err(Failure::Config("`dim` only applies to radial geometry".into())),
        };
        Ok(OperatorSpec {
            a: self.a.to_coefficient(),
            b: self.b.to_coefficient(),
            b_tilde: self.b_tilde.to_coefficient(),
            c: self.c.to_coefficient(),
            f: self.f.to_coefficient(),
            geometry,
        })
    }
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetupPatch {
    pub n: Option<usize>,
    pub spacing: Option<SpacingName>,
    pub origin: Option<bool>,
    pub inner: Option<f64>,
    pub ratio: Option<f64>,
    pub scale: Option<f64>,
    /// Switches to a linear schedule with this step.
    pub step: Option<f64>,
    pub jmax: Option<usize>,
    pub pole: Option<f64>,
    pub probe: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpacingName {
    Uniform,
    Log,
}

impl SetupPatch {
    pub fn apply(&self, base: &mut Setup) {
        if let Some(n) = self.n {
            base.n = n;
        }
        if let Some(s) = self.spacing {
            base.spacing = match s {
                SpacingName::Uniform => Spacing::Uniform,
                SpacingName::Log => Spacing::LogUniform,
            };
        }
        if let Some(o) = self.origin {
            base.origin = o;
        }
        if let Some(v) = self.inner {
            base.inner = v;
        }
        if let Some(step) = self.step {
            base.schedule = Schedule::Linear { step };
        } else if self.ratio.is_some() || self.scale.is_some() {
            let (r0, s0) = match base.schedule {
                Schedule::Geometric { ratio, scale } => (ratio, scale),
                Schedule::Linear { .. } => (2.0, 1.0),
            };
            base.schedule = Schedule::Geometric { ratio: self.ratio.unwrap_or(r0), scale: self.scale.unwrap_or(s0) };
        }
        if let Some(j) = self.jmax {
            base.jmax = j;
        }
        if let Some(p) = self.pole {
            base.pole = p;
        }
        if let Some(p) = self.probe {
            base.probe = p;
        }
    }
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferencePatch {
    pub p: Option<f64>,
    pub x0: Option<f64>,
    pub y0: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancePatch {
    pub classify: Option<f64>,
    pub threshold: Option<f64>,
    pub ground_state: Option<f64>,
    pub litam: Option<f64>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, Failure> {
        toml::from_str(text).map_err(|e| Failure::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Resolves against the named preset; a custom operator without a
    /// preset starts from the `hardy_halfline` grids.
    pub fn resolve(&self) -> Result<Run, Failure> {
        let mut run = match (&self.preset, &self.operator) {
            (Some(p), _) => preset(p)?,
            (None, Some(_)) => Run { name: "custom".into(), ..preset("hardy_halfline")? },
            (None, None) => return Err(Failure::Config("config needs `preset` or `[operator]`".into())),
        };
        if let Some(op) = &self.operator {
            let spec = op.to_spec()?;
            if spec.geometry == Geometry::Line && run.operator.geometry != Geometry::Line {
                run.classification = line_setup(8, 4097);
                run.construction = line_setup(8, 4097);
                run.reference = Reference { p: 0.0, x0: 0.0, y0: 0.5 };
                run.poles = vec![0.5];
            }
            run.operator = spec;
        }
        if let Some(p) = &self.classification {
            p.apply(&mut run.classification);
        }
        if let Some(p) = &self.construction {
            p.apply(&mut run.construction);
        }
        if let Some(p) = &self.poles {
            run.poles = p.clone();
        }
        if let Some(r) = &self.reference {
            run.reference.p = r.p.unwrap_or(run.reference.p);
            run.reference.x0 = r.x0.unwrap_or(run.reference.x0);
            run.reference.y0 = r.y0.unwrap_or(run.reference.y0);
        }
        if let Some(r) = self.radius {
            run.radius = r;
        }
        if let Some(t) = &self.tolerances {
            run.tolerances.classify = t.classify.unwrap_or(run.tolerances.classify);
            run.tolerances.threshold = t.threshold.unwrap_or(run.tolerances.threshold);
            run.tolerances.ground_state = t.ground_state.unwrap_or(run.tolerances.ground_state);
            run.tolerances.litam = t.litam.unwrap_or(run.tolerances.litam);
        }
        if let Some(o) = &self.out {
            run.out = o.clone();
        }
        run.validate()?;
        Ok(run)
    }
}

impl Run {
    pub fn validate(&self) -> Result<(), Failure> {
        let t = &self.tolerances;
        for (name, v) in [("classify", t.classify), ("threshold", t.threshold), ("ground_state", t.ground_state), ("litam", t.litam), ("radius", self.radius)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Failure::Config(format!("`{name}` must be positive, got {v}")));
            }
        }
        for s in [&self.classification, &self.construction] {
            if s.jmax == 0 {
                return Err(Failure::Config("`jmax` must be at least 1".into()));
            }
            if let Schedule::Geometric { ratio, scale } = s.schedule {
                if !(ratio > 1.0 && scale > 0.0) {
                    return Err(Failure::Config("geometric schedule needs ratio > 1 and scale > 0".into()));
                }
            }
        }
        // Poles must lie in the first window of the construction.
        let e1 = self.construction.schedule.extent(1);
        let inside = |x: f64| match self.operator.geometry {
            Geometry::Line => x.abs() < e1,
            _ if self.construction.origin => (0.0..e1).contains(&x),
            _ => x > 1.0 / e1 && x < e1,
        };
        for &y in self.poles.iter().chain([self.reference.p, self.construction.pole].iter()) {
            if !inside(y) {
                return Err(Failure::Config(format!("pole {y} is outside window 1")));
            }
        }
        Ok(())
    }
}

/// Command-line overrides, applied after the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub n: Option<usize>,
    pub jmax: Option<usize>,
    pub pole: Option<f64>,
    pub reference: Option<f64>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, run: &mut Run) -> Result<(), Failure> {
        if let Some(n) = self.n {
            run.construction.n = n;
        }
        if let Some(j) = self.jmax {
            run.construction.jmax = j;
        }
        if let Some(p) = self.pole {
            run.construction.pole = p;
            run.reference.p = p;
        }
        if let Some(x0) = self.reference {
            run.reference.x0 = x0;
        }
        if let Some(o) = &self.out {
            run.out = o.clone();
        }
        run.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_resolves_and_validates() {
        for name in PRESETS {
            let run = preset(name).unwrap();
            run.validate().unwrap();
        }
        assert!(preset("nope").is_err());
    }

    #[test]
    fn toml_overrides_preset_fields() {
        let cfg = RunConfig::from_toml(
            r#"
preset = "hardy_halfline"
poles = [1.5, 1.25]
[construction]
n = 4097
jmax = 6
[tolerances]
litam = 1e-6
"#,
        )
        .unwrap();
        let run = cfg.resolve().unwrap();
        assert_eq!(run.construction.n, 4097);
        assert_eq!(run.construction.jmax, 6);
        assert_eq!(run.poles, vec![1.5, 1.25]);
        assert_eq!(run.tolerances.litam, 1e-6);
        assert_eq!(run.classification, preset("hardy_halfline").unwrap().classification);
    }

    #[test]
    fn custom_operator() {
        let cfg = RunConfig::from_toml(
            r#"
[operator]
geometry = "halfline"
c = { kind = "inverse_square", coef = -0.2 }
"#,
        )
        .unwrap();
        let run = cfg.resolve().unwrap();
        assert_eq!(run.operator, OperatorSpec::hardy_subcritical(0.2));
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(RunConfig::from_toml("preset = 3").is_err());
        assert!(RunConfig::from_toml("bogus = 1").is_err());
        assert!(RunConfig::from_toml("").unwrap().resolve().is_err());
        let neg = RunConfig::from_toml("preset = \"hardy_halfline\"\n[tolerances]\nlitam = -1.0\n").unwrap();
        assert!(neg.resolve().is_err());
        let far = RunConfig::from_toml("preset = \"hardy_halfline\"\npoles = [100.0]\n").unwrap();
        assert!(far.resolve().is_err());
        let radial = RunConfig::from_toml("[operator]\ngeometry = \"radial\"\n").unwrap();
        assert!(radial.resolve().is_err());
    }

    #[test]
    fn grid_spans_the_last_window() {
        let run = preset("laplace_line").unwrap();
        assert_eq!(run.construction.range(Geometry::Line), (-128.0, 128.0));
        let b = run.construction.build(&run.operator).unwrap();
        assert_eq!(b.exhaustion.len(), 8);
        assert_eq!(b.grid.x(b.pole), 0.0);
    }
}
