//! Exact optimal transport for probability measures on the unit interval.
//!
//! Measures on `[0, 1]` are handled through their quantile functions, where
//! the 2-Wasserstein geometry is the flat `L²` geometry of a convex cone.
//! On top of that the crate provides
//!
//! - distances, optimal plans, geodesics and midpoints ([`wasserstein`]),
//!   with an independent transportation-simplex oracle for atomic measures;
//! - the relative entropy with respect to Lebesgue measure in its density
//!   and quantile forms, and displacement-convexity deficiencies
//!   ([`entropy`]);
//! - finite-dimensional step-function approximations of the quantile cone
//!   with certified Gromov–Hausdorff bounds ([`gh`]);
//! - the entropic measure (Dirichlet process) through its finite marginals,
//!   with exact set probabilities showing the failure of every
//!   generalized Ricci lower bound ([`entropic`]).

// `!(a < b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod entropic;
pub mod entropy;
mod error;
pub mod gh;
pub mod quantile;
pub mod scan;
pub mod wasserstein;

pub use error::{Error, Result};
pub use quantile::{psi, psi_inverse, Atom, Density, Measure1D, QuantileFunction, QuantileKind};
pub use scan::{ScanSeries, ScanValue};
