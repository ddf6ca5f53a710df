//! Relative entropy with respect to Lebesgue measure on `[0, 1]`, and its
//! convexity along Wasserstein geodesics.
//!
//! `Ent(μ) = ∫ ρ log ρ` when `μ = ρ·Leb` and `+∞` otherwise. On quantile
//! functions the same quantity reads `−∫ log f′`, which is linear along
//! geodesics up to the concave `log`; that is why the entropy is
//! displacement convex with constant 0.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::{Serialize, Serializer};

use crate::quantile::{psi_inverse, Measure1D, QuantileFunction};
use crate::wasserstein::{geodesic_point, wasserstein2_squared};
use crate::{Error, Result, ScanSeries, ScanValue};

/// A real number or `+∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(x) => Some(x),
            ExtendedReal::PosInfinity => None,
        }
    }

    /// As an `f64`, with `+∞` mapped to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    /// Multiplication by a nonnegative scalar with `0·∞ = 0`.
    pub fn scale(self, k: f64) -> Self {
        debug_assert!(k >= 0.0);
        match self {
            ExtendedReal::Finite(x) => ExtendedReal::Finite(k * x),
            ExtendedReal::PosInfinity if k == 0.0 => ExtendedReal::Finite(0.0),
            ExtendedReal::PosInfinity => ExtendedReal::PosInfinity,
        }
    }
}

impl Add for ExtendedReal {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite(a + b),
            _ => ExtendedReal::PosInfinity,
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => a.partial_cmp(b),
            (ExtendedReal::Finite(_), ExtendedReal::PosInfinity) => Some(Ordering::Less),
            (ExtendedReal::PosInfinity, ExtendedReal::Finite(_)) => Some(Ordering::Greater),
            (ExtendedReal::PosInfinity, ExtendedReal::PosInfinity) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(x) => write!(f, "{x:?}"),
            ExtendedReal::PosInfinity => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(x) => s.serialize_f64(*x),
            ExtendedReal::PosInfinity => s.serialize_str("inf"),
        }
    }
}

impl From<ExtendedReal> for ScanValue {
    fn from(x: ExtendedReal) -> Self {
        ScanValue::Real(x.to_f64())
    }
}

/// `∫ ρ log ρ` for a density, `+∞` as soon as there is an atom.
pub fn entropy_of_measure(mu: &Measure1D) -> ExtendedReal {
    match mu {
        Measure1D::Density(d) => ExtendedReal::Finite(
            d.cells()
                .filter(|(_, _, h)| *h > 0.0)
                .map(|(lo, hi, h)| h * h.ln() * (hi - lo))
                .sum(),
        ),
        Measure1D::Atoms(_) | Measure1D::Mixed { .. } => ExtendedReal::PosInfinity,
    }
}

/// `−∫₀¹ log f′`, summed exactly as `−Σ lenᵢ log slopeᵢ`.
///
/// Any flat piece of positive length means `f_*Leb` has an atom, hence `+∞`.
/// Jumps are allowed: they only leave gaps in the support.
pub fn entropy_from_quantile(f: &QuantileFunction) -> ExtendedReal {
    let mut sum = 0.0;
    for seg in f.segments() {
        if seg.is_flat() {
            return ExtendedReal::PosInfinity;
        }
        // len·log(len / rise) keeps tiny slopes accurate.
        sum += seg.len() * (seg.len().ln() - (seg.v1 - seg.v0).ln());
    }
    ExtendedReal::Finite(sum)
}

fn check_t(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::DomainError(format!(
            "geodesic parameter {t} outside [0, 1]"
        )))
    }
}

/// The chord side `t·Ent(μ₁) + (1−t)·Ent(μ₀)` of the convexity inequality.
fn chord(ent0: ExtendedReal, ent1: ExtendedReal, t: f64) -> ExtendedReal {
    ent1.scale(t) + ent0.scale(1.0 - t)
}

/// `t·Ent(μ₁) + (1−t)·Ent(μ₀) − (K/2)·t(1−t)·d(μ₀,μ₁)² − Ent(μ_t)`.
///
/// Nonnegative exactly when the `K`-displacement-convexity inequality holds
/// at `t`. A `+∞` chord gives `+∞`; the endpoints give 0.
pub fn convexity_deficiency(
    mu0: &Measure1D,
    mu1: &Measure1D,
    t: f64,
    k: f64,
) -> Result<ExtendedReal> {
    check_t(t)?;
    if t == 0.0 || t == 1.0 {
        return Ok(ExtendedReal::Finite(0.0));
    }
    let bound = chord(entropy_of_measure(mu0), entropy_of_measure(mu1), t);
    let Some(bound) = bound.finite() else {
        return Ok(ExtendedReal::PosInfinity);
    };
    let curvature = 0.5 * k * t * (1.0 - t) * wasserstein2_squared(mu0, mu1);
    let mid = entropy_of_measure(&geodesic_point(mu0, mu1, t)?);
    Ok(ExtendedReal::Finite(bound - curvature - mid.to_f64()))
}

/// Rows `(t, Ent(μ_t), chord, deficiency at K = 0)` along the geodesic.
/// Columns `t,entropy,chord,deficiency`.
pub fn entropy_scan(mu0: &Measure1D, mu1: &Measure1D, grid: &[f64]) -> Result<ScanSeries> {
    let mut series = ScanSeries::new(["t", "entropy", "chord", "deficiency"]);
    let (ent0, ent1) = (entropy_of_measure(mu0), entropy_of_measure(mu1));
    for &t in grid {
        check_t(t)?;
        let ent = entropy_of_measure(&geodesic_point(mu0, mu1, t)?);
        let deficiency = convexity_deficiency(mu0, mu1, t, 0.0)?;
        series.push(vec![
            t.into(),
            ent.into(),
            chord(ent0, ent1, t).into(),
            deficiency.into(),
        ]);
    }
    Ok(series)
}

/// Smallest `K` (to within `tol`) at which the deficiency turns negative
/// somewhere on `grid`, searched by bisection on `[0, k_max]`.
///
/// Returns `None` if the inequality still holds at `k_max` everywhere on the
/// grid (or the pair has infinite entropy).
pub fn critical_convexity_constant(
    mu0: &Measure1D,
    mu1: &Measure1D,
    grid: &[f64],
    k_max: f64,
    tol: f64,
) -> Result<Option<f64>> {
    let violated = |k: f64| -> Result<bool> {
        for &t in grid {
            if convexity_deficiency(mu0, mu1, t, k)? < ExtendedReal::Finite(0.0) {
                return Ok(true);
            }
        }
        Ok(false)
    };
    if !violated(k_max)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0, k_max);
    if violated(lo)? {
        return Ok(Some(0.0));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if violated(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// `Ent` of the measure whose quantile is `f`, through the density route.
pub fn entropy_via_density(f: &QuantileFunction) -> ExtendedReal {
    entropy_of_measure(&crate::quantile::psi(f))
}

/// `Ent` of `mu` through the quantile route.
pub fn entropy_via_quantile(mu: &Measure1D) -> ExtendedReal {
    entropy_from_quantile(&psi_inverse(mu))
}
