//! 2-Wasserstein geometry of `𝒫([0,1])`.
//!
//! All quantities are computed on quantile functions: the distance is the
//! `L²` distance of quantiles, the optimal plan is the quantile coupling
//! `(g_μ, g_ν)_*Leb`, and geodesics interpolate quantiles linearly. The
//! [`lp`] module minimizes over couplings directly and serves as an
//! independent check on atomic measures.

pub mod lp;

use serde::{Deserialize, Serialize};

use crate::quantile::{
    l2_distance, l2_distance_squared, merge_grids, psi, psi_inverse, Atom, Measure1D,
    QuantileFunction,
};
use crate::{Error, Result};

pub use lp::{lp_oracle, DEFAULT_MAX_ATOMS};

/// Marginal tolerance for discrete plans.
pub const PLAN_TOLERANCE: f64 = 1e-10;

/// `d^W(μ, ν)`.
pub fn wasserstein2(mu: &Measure1D, nu: &Measure1D) -> f64 {
    l2_distance(&psi_inverse(mu), &psi_inverse(nu))
}

/// `d^W(μ, ν)²`, without the square root round trip.
pub fn wasserstein2_squared(mu: &Measure1D, nu: &Measure1D) -> f64 {
    l2_distance_squared(&psi_inverse(mu), &psi_inverse(nu))
}

/// A coupling of two measures on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransportPlan {
    /// `(source, target)_*Leb`.
    QuantileCoupling {
        source: QuantileFunction,
        target: QuantileFunction,
    },
    DiscreteMatrix(DiscretePlan),
}

impl TransportPlan {
    /// `∫ |x − y|² dπ`.
    pub fn cost(&self) -> f64 {
        match self {
            TransportPlan::QuantileCoupling { source, target } => {
                l2_distance_squared(source, target)
            }
            TransportPlan::DiscreteMatrix(d) => d.cost(),
        }
    }

    /// The plan as a mass matrix between atoms, when both marginals are
    /// atomic.
    pub fn to_discrete(&self) -> Result<DiscretePlan> {
        match self {
            TransportPlan::DiscreteMatrix(d) => Ok(d.clone()),
            TransportPlan::QuantileCoupling { source, target } => {
                let (Measure1D::Atoms(rows), Measure1D::Atoms(cols)) = (psi(source), psi(target))
                else {
                    return Err(Error::NotAtomic);
                };
                let mut mass = vec![vec![0.0; cols.len()]; rows.len()];
                let index = |atoms: &[Atom], x: f64| {
                    atoms
                        .iter()
                        .position(|a| a.position == x)
                        .expect("value is an atom of the pushforward")
                };
                for cell in merge_grids(source.breakpoints(), target.breakpoints()) {
                    let i = index(&rows, source.segment(cell.left).v0);
                    let j = index(&cols, target.segment(cell.right).v0);
                    mass[i][j] += cell.t1 - cell.t0;
                }
                DiscretePlan::new(rows, cols, mass)
            }
        }
    }
}

/// A coupling of two atomic measures given by its mass matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretePlan {
    rows: Vec<Atom>,
    cols: Vec<Atom>,
    mass: Vec<Vec<f64>>,
}

impl DiscretePlan {
    /// Checks the marginal conditions to [`PLAN_TOLERANCE`].
    pub fn new(rows: Vec<Atom>, cols: Vec<Atom>, mass: Vec<Vec<f64>>) -> Result<Self> {
        if mass.len() != rows.len() || mass.iter().any(|r| r.len() != cols.len()) {
            return Err(Error::ShapeMismatch {
                expected: rows.len() * cols.len(),
                got: mass.iter().map(Vec::len).sum(),
            });
        }
        if mass.iter().flatten().any(|m| !(*m >= 0.0)) {
            return Err(Error::InvalidMeasure("negative mass in plan".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            let s: f64 = mass[i].iter().sum();
            if (s - r.weight).abs() > PLAN_TOLERANCE {
                return Err(Error::InvalidMeasure(format!(
                    "row {i} carries {s}, source atom has {}",
                    r.weight
                )));
            }
        }
        for (j, c) in cols.iter().enumerate() {
            let s: f64 = mass.iter().map(|r| r[j]).sum();
            if (s - c.weight).abs() > PLAN_TOLERANCE {
                return Err(Error::InvalidMeasure(format!(
                    "column {j} carries {s}, target atom has {}",
                    c.weight
                )));
            }
        }
        Ok(Self { rows, cols, mass })
    }

    pub fn rows(&self) -> &[Atom] {
        &self.rows
    }

    pub fn cols(&self) -> &[Atom] {
        &self.cols
    }

    pub fn mass(&self) -> &[Vec<f64>] {
        &self.mass
    }

    pub fn cost(&self) -> f64 {
        self.rows
            .iter()
            .zip(&self.mass)
            .flat_map(|(r, row)| {
                self.cols
                    .iter()
                    .zip(row)
                    .map(move |(c, m)| m * (r.position - c.position).powi(2))
            })
            .sum()
    }

    /// Nonzero entries as `(x, y, mass)`.
    pub fn entries(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.rows.iter().zip(&self.mass).flat_map(move |(r, row)| {
            self.cols
                .iter()
                .zip(row)
                .filter(|(_, m)| **m > 0.0)
                .map(move |(c, m)| (r.position, c.position, *m))
        })
    }
}

/// The optimal plan: the monotone coupling of the two quantile functions.
pub fn optimal_plan(mu: &Measure1D, nu: &Measure1D) -> TransportPlan {
    TransportPlan::QuantileCoupling {
        source: psi_inverse(mu),
        target: psi_inverse(nu),
    }
}

/// The unique geodesic between two quantile functions, `t ↦ (1−t)f + tg`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicG0 {
    pub start: QuantileFunction,
    pub end: QuantileFunction,
}

impl GeodesicG0 {
    pub fn between(mu0: &Measure1D, mu1: &Measure1D) -> Self {
        Self {
            start: psi_inverse(mu0),
            end: psi_inverse(mu1),
        }
    }

    pub fn quantile_at(&self, t: f64) -> Result<QuantileFunction> {
        self.start.interpolate(&self.end, t)
    }

    pub fn length(&self) -> f64 {
        l2_distance(&self.start, &self.end)
    }
}

/// `μ_t` on the Wasserstein geodesic from `mu0` to `mu1`.
///
/// The endpoints are returned unchanged; interior points are the
/// pushforward of the interpolated quantile, with coinciding atoms merged.
pub fn geodesic_point(mu0: &Measure1D, mu1: &Measure1D, t: f64) -> Result<Measure1D> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::DomainError(format!(
            "geodesic parameter {t} outside [0, 1]"
        )));
    }
    if t == 0.0 {
        return Ok(mu0.clone());
    }
    if t == 1.0 {
        return Ok(mu1.clone());
    }
    Ok(psi(&GeodesicG0::between(mu0, mu1).quantile_at(t)?))
}

/// The geodesic midpoint.
pub fn midpoint(mu0: &Measure1D, mu1: &Measure1D) -> Measure1D {
    geodesic_point(mu0, mu1, 0.5).expect("1/2 lies in [0, 1]")
}

/// `d(μ, γ_t)² − [(1−t) d(μ,ν)² + t d(μ,η)² − t(1−t) d(ν,η)²]` for the
/// geodesic `γ` from `ν` to `η`.
///
/// In a space of vanishing Alexandrov curvature this is identically zero.
pub fn alexandrov_deficiency(
    mu: &Measure1D,
    nu: &Measure1D,
    eta: &Measure1D,
    t: f64,
) -> Result<f64> {
    let gamma_t = geodesic_point(nu, eta, t)?;
    let lhs = wasserstein2_squared(mu, &gamma_t);
    let rhs = (1.0 - t) * wasserstein2_squared(mu, nu) + t * wasserstein2_squared(mu, eta)
        - t * (1.0 - t) * wasserstein2_squared(nu, eta);
    Ok(lhs - rhs)
}
