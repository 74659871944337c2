use core::fmt;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    InvalidRange {
        lo: f64,
        hi: f64,
    },
    TooFewNodes {
        n: usize,
        min: usize,
    },
    ScheduleOverflow {
        window: usize,
    },
    NotNested {
        window: usize,
    },
    IncompleteExhaustion,
    NonpositiveCoefficient {
        name: &'static str,
        node: usize,
        value: f64,
    },
    GeometryMismatch,
    NonpositiveGroundState {
        node: usize,
    },
    NegativePerturbation {
        node: usize,
    },
    ZeroPerturbation,
    SupportTouchesBoundary,
    PoleOutsideWindow {
        pole: usize,
    },
    SingularWindowOperator {
        row: usize,
    },
    NonpositiveGreen {
        node: usize,
        value: f64,
    },
    EmptyAnnulus,
    EmptySet,
    ZeroOscillation,
    /// Neither the convergence nor the divergence test fired.
    Indeterminate {
        windows: usize,
    },
    NotCritical,
    NotSubcritical,
    NoConvergence {
        increment: f64,
    },
    NotASolution {
        residual: f64,
    },
    PoleAtReference,
    NoAdmissiblePoles,
    OutsideValidity {
        x: f64,
        y: f64,
    },
    RegionMismatch,
    PoleNotInTable {
        pole: usize,
    },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidRange { lo, hi } => write!(f, "invalid range ({lo}, {hi})"),
            Error::TooFewNodes { n, min } => write!(f, "grid needs at least {min} nodes, got {n}"),
            Error::ScheduleOverflow { window } => write!(f, "window {window} exceeds the grid"),
            Error::NotNested { window } => {
                write!(f, "window {window} is not strictly inside its successor")
            }
            Error::IncompleteExhaustion => write!(f, "final window does not cover the grid interior"),
            Error::NonpositiveCoefficient { name, node, value } => {
                write!(f, "coefficient {name} = {value} is not positive at node {node}")
            }
            Error::GeometryMismatch => write!(f, "operator geometry does not match the grid"),
            Error::NonpositiveGroundState { node } => {
                write!(f, "ground state is not strictly positive at node {node}")
            }
            Error::NegativePerturbation { node } => write!(f, "perturbation is negative at node {node}"),
            Error::ZeroPerturbation => write!(f, "perturbation vanishes identically"),
            Error::SupportTouchesBoundary => write!(f, "perturbation support touches the grid boundary"),
            Error::PoleOutsideWindow { pole } => write!(f, "pole node {pole} is not inside the window"),
            Error::SingularWindowOperator { row } => {
                write!(f, "window operator is singular (zero pivot at row {row})")
            }
            Error::NonpositiveGreen { node, value } => {
                write!(f, "Dirichlet Green value {value} at node {node} is not positive")
            }
            Error::EmptyAnnulus => write!(f, "annulus contains no nodes"),
            Error::EmptySet => write!(f, "node set is empty"),
            Error::ZeroOscillation => write!(f, "oscillation vanishes"),
            Error::Indeterminate { windows } => {
                write!(f, "classification indeterminate after {windows} windows; extend the exhaustion")
            }
            Error::NotCritical => write!(f, "operator is not critical"),
            Error::NotSubcritical => write!(f, "operator is not subcritical"),
            Error::NoConvergence { increment } => {
                write!(f, "sequence did not converge (last increment {increment:e})")
            }
            Error::NotASolution { residual } => {
                write!(f, "field is not a solution (relative residual {residual:e})")
            }
            Error::PoleAtReference => write!(f, "sample point coincides with the reference point"),
            Error::NoAdmissiblePoles => write!(f, "no pole has a negative value at the reference point"),
            Error::OutsideValidity { x, y } => write!(f, "({x}, {y}) is outside the oracle's validity region"),
            Error::RegionMismatch => write!(f, "comparison region is not inside the field window"),
            Error::PoleNotInTable { pole } => write!(f, "pole node {pole} is not a column of the table"),
        }
    }
}

impl core::error::Error for Error {}
