//! Numerical Green functions for nonnegative second-order elliptic operators
//! on one-dimensional and radially reduced domains.
//!
//! The crate builds finite-volume realizations of operators in divergence
//! form, solves Dirichlet Green problems on nested exhaustion windows,
//! classifies operators as critical or subcritical, and renormalizes the
//! divergent Green sequence of a critical operator into a sign-changing
//! Green function (the Li–Tam construction). Martin and Naïm kernels and a
//! catalogue of closed-form reference kernels sit on top of that.
//!
//! `no_std` with `alloc`; all IO lives in the companion `greenlab` crate.
#![no_std]
#![deny(unsafe_code)]
// `!(a <= b)` is used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod banded;
pub mod coefficient;
pub mod criticality;
pub mod error;
pub mod green;
pub mod grid;
pub mod litam;
pub mod martin;
pub mod operator;
pub mod oracle;
pub mod table;

pub use coefficient::Coefficient;
pub use criticality::{classify, ground_state, ground_state_adjoint, Classification, GroundState, Verdict};
pub use error::{Error, Result};
pub use green::{dirichlet_green, green_sequence, GreenField};
pub use grid::{build_exhaustion, build_grid, Exhaustion, Geometry, GridDomain, Schedule, Spacing, Window};
pub use litam::{litam_construct, litam_unchecked, LiTamGreen, LiTamOptions};
pub use operator::{discretize, DiscreteOperator, OperatorSpec};
pub use table::GreenTable;
