//! Quantile functions, probability measures on `[0, 1]`, and the isometry
//! between them.
//!
//! A measure `μ` corresponds to its inverse distribution function
//! `g_μ(t) = inf{s : μ([0,s]) > t}` and a nondecreasing `g` corresponds to
//! `g_*Leb`. Under this correspondence the 2-Wasserstein distance becomes
//! the `L²[0,1]` distance, which is what the rest of the crate builds on.
//!
//! Everything here is exact piecewise arithmetic: step and piecewise-linear
//! quantiles are integrated in closed form cell by cell. Curved quantiles
//! enter as piecewise-linear refinements chosen by the caller.

mod function;
mod measure;
mod pushforward;

pub(crate) use function::merge_grids;
pub use function::{l2_distance, l2_distance_squared, QuantileFunction, QuantileKind, Segment};
pub use measure::{psi, psi_inverse, Atom, Density, Measure1D, MASS_TOLERANCE};
pub use pushforward::pushforward_density;
