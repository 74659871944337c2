//! One-dimensional node sets, dual-cell measures and nested exhaustions.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Smallest grid that still has one unknown between two boundary nodes.
pub const MIN_NODES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    /// The real line.
    Line,
    /// The open half-line `(0, ∞)`.
    HalfLine,
    /// Radial reduction of `R^N`; the weight `|S^{N-1}| r^{N-1}` is folded
    /// into the cell masses.
    Radial(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Uniform,
    LogUniform,
}

impl Geometry {
    /// Surface measure of the unit sphere `S^{N-1}`.
    pub fn sphere_area(dim: u32) -> f64 {
        use core::f64::consts::PI;
        match dim {
            0 => 1.0,
            1 => 2.0,
            2 => 2.0 * PI,
            n => 2.0 * PI * Self::sphere_area(n - 2) / (n - 2) as f64,
        }
    }

    /// Density of the volume form in the reduced coordinate.
    pub fn weight(self, x: f64) -> f64 {
        match self {
            Geometry::Line | Geometry::HalfLine => 1.0,
            Geometry::Radial(n) => Self::sphere_area(n) * libm::pow(x, (n - 1) as f64),
        }
    }

    /// Exact integral of [`Geometry::weight`] over `[a, b]`.
    pub fn weight_integral(self, a: f64, b: f64) -> f64 {
        match self {
            Geometry::Line | Geometry::HalfLine => b - a,
            Geometry::Radial(n) => {
                let nf = n as f64;
                Self::sphere_area(n) * (libm::pow(b, nf) - libm::pow(a, nf)) / nf
            }
        }
    }
}

/// Ordered node set with the dual-cell mass of every node.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDomain {
    nodes: Vec<f64>,
    masses: Vec<f64>,
    geometry: Geometry,
    spacing: Spacing,
    regular_origin: bool,
}

/// Builds a grid on `[lo, hi]` with `n` nodes.
///
/// A radial grid that starts at `r = 0` treats the origin as an interior
/// node with a zero-flux condition. For log spacing use
/// [`GridDomain::with_origin`] to prepend the origin to a punctured grid.
pub fn build_grid(geometry: Geometry, range: (f64, f64), n: usize, spacing: Spacing) -> Result<GridDomain> {
    let (lo, hi) = range;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidRange { lo, hi });
    }
    if n < MIN_NODES {
        return Err(Error::TooFewNodes { n, min: MIN_NODES });
    }
    let min_lo = match geometry {
        Geometry::Line => f64::NEG_INFINITY,
        Geometry::HalfLine | Geometry::Radial(_) => 0.0,
    };
    if lo < min_lo {
        return Err(Error::InvalidRange { lo, hi });
    }
    let last = (n - 1) as f64;
    let nodes: Vec<f64> = match spacing {
        Spacing::Uniform => (0..n).map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * (i as f64 / last) }).collect(),
        Spacing::LogUniform => {
            if lo <= 0.0 {
                return Err(Error::InvalidRange { lo, hi });
            }
            let (llo, lhi) = (libm::log(lo), libm::log(hi));
            (0..n)
                .map(|i| match i {
                    0 => lo,
                    i if i == n - 1 => hi,
                    i => libm::exp(llo + (lhi - llo) * (i as f64 / last)),
                })
                .collect()
        }
    };
    let regular_origin = matches!(geometry, Geometry::Radial(_)) && nodes[0] == 0.0;
    Ok(GridDomain::from_nodes(nodes, geometry, spacing, regular_origin))
}

impl GridDomain {
    fn from_nodes(nodes: Vec<f64>, geometry: Geometry, spacing: Spacing, regular_origin: bool) -> Self {
        let n = nodes.len();
        let masses = (0..n)
            .map(|i| {
                let a = if i == 0 { nodes[0] } else { 0.5 * (nodes[i - 1] + nodes[i]) };
                let b = if i == n - 1 { nodes[n - 1] } else { 0.5 * (nodes[i] + nodes[i + 1]) };
                geometry.weight_integral(a, b)
            })
            .collect();
        GridDomain { nodes, masses, geometry, spacing, regular_origin }
    }

    /// Prepends a regular origin node to a punctured radial grid.
    pub fn with_origin(self) -> Result<Self> {
        if !matches!(self.geometry, Geometry::Radial(_)) || self.regular_origin {
            return Err(Error::GeometryMismatch);
        }
        let mut nodes = Vec::with_capacity(self.nodes.len() + 1);
        nodes.push(0.0);
        nodes.extend_from_slice(&self.nodes);
        Ok(Self::from_nodes(nodes, self.geometry, self.spacing, true))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn x(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    /// Geometric mass of the dual cell around every node.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    /// True when node 0 is the radial origin (zero flux, not Dirichlet).
    pub fn regular_origin(&self) -> bool {
        self.regular_origin
    }

    /// Index of the first node carrying an unknown.
    pub fn first_unknown(&self) -> usize {
        if self.regular_origin {
            0
        } else {
            1
        }
    }

    pub fn last_unknown(&self) -> usize {
        self.nodes.len() - 2
    }

    /// Window covering every unknown of the grid.
    pub fn full_window(&self) -> Window {
        Window::new(self, self.first_unknown(), self.last_unknown())
    }

    /// Node closest to `x` (ties go to the lower index).
    pub fn nearest_node(&self, x: f64) -> usize {
        let idx = self.nodes.partition_point(|&v| v < x);
        if idx == 0 {
            return 0;
        }
        if idx >= self.nodes.len() {
            return self.nodes.len() - 1;
        }
        if (x - self.nodes[idx - 1]) <= (self.nodes[idx] - x) {
            idx - 1
        } else {
            idx
        }
    }

    /// Total mass of the nodes `lo..=hi`.
    pub fn window_mass(&self, lo: usize, hi: usize) -> f64 {
        self.masses[lo..=hi].iter().sum()
    }
}

/// Contiguous block of unknowns `lo..=hi`; every node outside carries a
/// homogeneous Dirichlet value, except a regular origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lo: usize,
    pub hi: usize,
    /// Snapped coordinate of the lower boundary (the origin for a radial
    /// window that contains it).
    pub lo_x: f64,
    pub hi_x: f64,
    lower_boundary: bool,
}

impl Window {
    pub fn new(domain: &GridDomain, lo: usize, hi: usize) -> Self {
        let lower_boundary = !(domain.regular_origin && lo == 0);
        let lo_x = if lower_boundary { domain.x(lo - 1) } else { domain.x(0) };
        Window { lo, hi, lo_x, hi_x: domain.x(hi + 1), lower_boundary }
    }

    pub fn len(&self) -> usize {
        self.hi + 1 - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }

    pub fn contains(&self, node: usize) -> bool {
        self.lo <= node && node <= self.hi
    }

    /// Strict containment: every unknown of `self` and its boundary nodes
    /// are unknowns of `other`.
    pub fn inside(&self, other: &Window) -> bool {
        let lo_ok = if self.lower_boundary { other.lo < self.lo } else { other.lo == self.lo };
        lo_ok && self.hi < other.hi
    }

    /// Dirichlet boundary nodes of the window.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(2);
        if self.lower_boundary {
            out.push(self.lo - 1);
        }
        out.push(self.hi + 1);
        out
    }

    pub fn has_lower_boundary(&self) -> bool {
        self.lower_boundary
    }

    /// Unknowns plus boundary nodes.
    pub fn closure(&self) -> core::ops::RangeInclusive<usize> {
        let lo = if self.lower_boundary { self.lo - 1 } else { self.lo };
        lo..=self.hi + 1
    }
}

/// Growth law of the window extents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schedule {
    /// Window `j` reaches out to `scale * ratio^j`.
    Geometric { ratio: f64, scale: f64 },
    /// Window `j` reaches out to `step * j`.
    Linear { step: f64 },
}

impl Schedule {
    pub fn geometric(ratio: f64) -> Self {
        Schedule::Geometric { ratio, scale: 1.0 }
    }

    pub fn extent(&self, j: usize) -> f64 {
        match *self {
            Schedule::Geometric { ratio, scale } => scale * libm::pow(ratio, j as f64),
            Schedule::Linear { step } => step * j as f64,
        }
    }
}

/// Nested windows `M_1 ⋐ M_2 ⋐ …` whose last member is the whole grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Exhaustion {
    windows: Vec<Window>,
}

/// Snaps the schedule's windows to the grid.
///
/// Line windows are `(-e_j, e_j)`. On the half-line and on punctured radial
/// grids they are `(1/e_j, e_j)`, or `(0, e_j)` when the grid starts at the
/// origin; radial grids with a regular origin always keep the origin.
pub fn build_exhaustion(domain: &GridDomain, schedule: Schedule, j_max: usize) -> Result<Exhaustion> {
    if j_max < 2 {
        return Err(Error::NotNested { window: j_max });
    }
    let x0 = domain.x(0);
    let xn = domain.x(domain.len() - 1);
    let slack = 1e-9 * (xn - x0).abs().max(xn.abs());
    let fixed_left = domain.regular_origin() || (domain.geometry() != Geometry::Line && x0 == 0.0);
    let mut windows = Vec::with_capacity(j_max);
    for j in 1..=j_max {
        let e = schedule.extent(j);
        let (lo_pt, hi_pt) = match domain.geometry() {
            Geometry::Line => (-e, e),
            _ if fixed_left => (x0, e),
            _ => (1.0 / e, e),
        };
        if !(e > 0.0) || lo_pt < x0 - slack.max(1e-12 * x0.abs()) || hi_pt > xn + slack {
            return Err(Error::ScheduleOverflow { window: j });
        }
        let lo = if domain.regular_origin() { 0 } else { domain.nearest_node(lo_pt) + 1 };
        let b_hi = domain.nearest_node(hi_pt);
        if b_hi < 1 || b_hi <= lo {
            return Err(Error::NotNested { window: j });
        }
        windows.push(Window::new(domain, lo, b_hi - 1));
    }
    Exhaustion::from_windows(domain, windows)
}

impl Exhaustion {
    /// Validates an explicit list of windows.
    pub fn from_windows(domain: &GridDomain, windows: Vec<Window>) -> Result<Self> {
        if windows.len() < 2 {
            return Err(Error::NotNested { window: windows.len() });
        }
        for (j, pair) in windows.windows(2).enumerate() {
            if !pair[0].inside(&pair[1]) {
                return Err(Error::NotNested { window: j + 1 });
            }
        }
        let last = windows[windows.len() - 1];
        if last.lo != domain.first_unknown() || last.hi != domain.last_unknown() {
            return Err(Error::IncompleteExhaustion);
        }
        Ok(Exhaustion { windows })
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    /// Window `j`, counted from 1.
    pub fn window(&self, j: usize) -> &Window {
        &self.windows[j - 1]
    }

    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    pub fn last(&self) -> &Window {
        &self.windows[self.windows.len() - 1]
    }

    /// First `j` windows as a new exhaustion of a truncated problem.
    pub fn truncate(&self, j: usize) -> Vec<Window> {
        self.windows[..j].to_vec()
    }
}
