//! Step-function approximations of the quantile cone.
//!
//! A partition `0 = t₀ < t₁ < … < t_N < t_{N+1} = 1` turns the ordered
//! simplex `Σ_N = {0 < x₁ < … < x_N < 1}` into a metric space with
//! `d(x, y)² = Σ |xᵢ − yᵢ|² (tᵢ₊₁ − tᵢ)`, and `x ↦ Σ xᵢ χ_(tᵢ, tᵢ₊₁]` embeds
//! it isometrically among quantile functions. Every quantile function lies
//! within `√mesh` of the image, so the embedding is a `2√mesh`-isometry.

use serde::{Deserialize, Serialize};

use crate::quantile::{l2_distance, QuantileFunction};
use crate::{Error, Result};

/// Gap used to separate tied coordinates.
pub const TIE_GAP: f64 = 1e-12;

/// Interior points of a partition of `[0, 1]`; the endpoints are implicit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PartitionRepr", into = "PartitionRepr")]
pub struct Partition {
    interior: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct PartitionRepr {
    interior: Vec<f64>,
}

impl TryFrom<PartitionRepr> for Partition {
    type Error = Error;
    fn try_from(r: PartitionRepr) -> Result<Self> {
        Partition::new(r.interior)
    }
}

impl From<Partition> for PartitionRepr {
    fn from(p: Partition) -> Self {
        PartitionRepr {
            interior: p.interior,
        }
    }
}

impl Partition {
    pub fn new(interior: Vec<f64>) -> Result<Self> {
        if interior.is_empty() {
            return Err(Error::DomainError(
                "a partition needs at least one interior point".into(),
            ));
        }
        if interior.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
            return Err(Error::DomainError(
                "partition points must lie in (0, 1)".into(),
            ));
        }
        if interior.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::DomainError(
                "partition points must be strictly increasing".into(),
            ));
        }
        Ok(Self { interior })
    }

    /// The dyadic partition with interior points `k / 2^level`.
    pub fn standard(level: u32) -> Result<Self> {
        if level < 1 {
            return Err(Error::DomainError(
                "standard partition level must be at least 1".into(),
            ));
        }
        if level > 30 {
            return Err(Error::DomainError(format!(
                "standard partition level {level} is too fine"
            )));
        }
        let cells = 1u64 << level;
        Ok(Self {
            interior: (1..cells).map(|k| k as f64 / cells as f64).collect(),
        })
    }

    pub fn interior(&self) -> &[f64] {
        &self.interior
    }

    /// Number of interior points `N`.
    pub fn len(&self) -> usize {
        self.interior.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interior.is_empty()
    }

    /// `t₀ = 0, t₁, …, t_N, t_{N+1} = 1`.
    pub fn points(&self) -> Vec<f64> {
        let mut pts = Vec::with_capacity(self.interior.len() + 2);
        pts.push(0.0);
        pts.extend_from_slice(&self.interior);
        pts.push(1.0);
        pts
    }

    /// `tᵢ₊₁ − tᵢ` for `i = 0..=N`.
    pub fn widths(&self) -> Vec<f64> {
        self.points().windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Longest cell.
    pub fn mesh(&self) -> f64 {
        self.widths().into_iter().fold(0.0, f64::max)
    }

    /// Index `i` with `interior[i] == t`, if any.
    pub fn position_of(&self, t: f64) -> Option<usize> {
        self.interior.iter().position(|&p| p == t)
    }
}

/// A point of the ordered simplex `Σ_N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SimplexRepr", into = "SimplexRepr")]
pub struct SimplexPoint {
    coords: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SimplexRepr {
    coords: Vec<f64>,
}

impl TryFrom<SimplexRepr> for SimplexPoint {
    type Error = Error;
    fn try_from(r: SimplexRepr) -> Result<Self> {
        SimplexPoint::new(r.coords)
    }
}

impl From<SimplexPoint> for SimplexRepr {
    fn from(p: SimplexPoint) -> Self {
        SimplexRepr { coords: p.coords }
    }
}

impl SimplexPoint {
    /// Requires `0 < x₁ < … < x_N < 1`.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|x| !(*x > 0.0 && *x < 1.0)) {
            return Err(Error::DomainError(
                "simplex coordinates must lie in (0, 1)".into(),
            ));
        }
        if coords.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::NonMonotone(
                "simplex coordinates must be strictly increasing".into(),
            ));
        }
        Ok(Self { coords })
    }

    /// Pushes nondecreasing values in `[0, 1]` into the open simplex.
    ///
    /// Ties and boundary values are separated by [`TIE_GAP`]: a forward pass
    /// lifts each coordinate to at least `k·TIE_GAP` above its predecessor
    /// (`x₀ = 0`), a backward pass lowers it below its successor
    /// (`x_{N+1} = 1`). Coordinates already separated are left untouched.
    pub fn from_nondecreasing(mut coords: Vec<f64>) -> Self {
        let n = coords.len();
        debug_assert!((n as f64 + 2.0) * TIE_GAP < 1.0);
        let mut prev = 0.0;
        for x in coords.iter_mut() {
            if *x <= prev {
                *x = prev + TIE_GAP;
            }
            prev = *x;
        }
        let mut next = 1.0;
        for x in coords.iter_mut().rev() {
            if *x >= next {
                *x = next - TIE_GAP;
            }
            next = *x;
        }
        debug_assert!(SimplexPoint::new(coords.clone()).is_ok(), "{coords:?}");
        Self { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

fn check_shape(p: &Partition, x: &SimplexPoint) -> Result<()> {
    if p.len() != x.len() {
        Err(Error::ShapeMismatch {
            expected: p.len(),
            got: x.len(),
        })
    } else {
        Ok(())
    }
}

/// `Σ xᵢ χ_(tᵢ, tᵢ₊₁]`, with value 0 on `(0, t₁]`.
pub fn embed(p: &Partition, x: &SimplexPoint) -> Result<QuantileFunction> {
    check_shape(p, x)?;
    let mut values = Vec::with_capacity(x.len() + 1);
    values.push(0.0);
    values.extend_from_slice(x.coords());
    QuantileFunction::new(p.points(), values, crate::QuantileKind::Step)
}

/// `sqrt(Σ |xᵢ − yᵢ|² (tᵢ₊₁ − tᵢ))`.
pub fn finite_metric(p: &Partition, x: &SimplexPoint, y: &SimplexPoint) -> Result<f64> {
    check_shape(p, x)?;
    check_shape(p, y)?;
    let widths = p.widths();
    Ok(x.coords()
        .iter()
        .zip(y.coords())
        .zip(&widths[1..])
        .map(|((a, b), w)| (a - b) * (a - b) * w)
        .sum::<f64>()
        .sqrt())
}

/// The values `g(tᵢ+)` at the partition points, moved into the open simplex.
///
/// Right limits are used so that for nested dyadic partitions the snapshot
/// of a finer embedding reads back exactly the coordinates sitting at the
/// coarse points.
pub fn snapshot(p: &Partition, g: &QuantileFunction) -> SimplexPoint {
    let coords = p
        .interior()
        .iter()
        .map(|&t| g.right_limit(t).expect("partition points lie in (0, 1)"))
        .collect();
    SimplexPoint::from_nondecreasing(coords)
}

/// `2·sqrt(mesh)`.
pub fn epsilon_bound(p: &Partition) -> f64 {
    2.0 * p.mesh().sqrt()
}

/// Result of [`certify_epsilon_isometry`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsometryReport {
    pub samples: usize,
    pub mesh: f64,
    pub epsilon: f64,
    /// Largest `|‖embed x − embed y‖ − d(x, y)|` over sample pairs.
    pub max_distortion: f64,
    /// Largest `‖g − embed(snapshot g)‖` over samples.
    pub max_approximation: f64,
    /// Distortion below [`DISTORTION_TOLERANCE`].
    pub isometric: bool,
    /// Approximation within `√mesh` (hence within `epsilon`).
    pub dense: bool,
}

impl IsometryReport {
    pub fn passed(&self) -> bool {
        self.isometric && self.dense
    }
}

/// Tolerance for the isometry condition.
pub const DISTORTION_TOLERANCE: f64 = 1e-12;

/// Checks both ε-isometry conditions of the embedding on a sample of
/// quantile functions.
pub fn certify_epsilon_isometry(
    p: &Partition,
    samples: &[QuantileFunction],
) -> Result<IsometryReport> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let points: Vec<SimplexPoint> = samples.iter().map(|g| snapshot(p, g)).collect();
    let embedded: Vec<QuantileFunction> =
        points.iter().map(|x| embed(p, x)).collect::<Result<_>>()?;

    let mut max_distortion: f64 = 0.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let l2 = l2_distance(&embedded[i], &embedded[j]);
            let d = finite_metric(p, &points[i], &points[j])?;
            max_distortion = max_distortion.max((l2 - d).abs());
        }
    }
    let max_approximation = samples
        .iter()
        .zip(&embedded)
        .map(|(g, e)| l2_distance(g, e))
        .fold(0.0, f64::max);
    let mesh = p.mesh();
    Ok(IsometryReport {
        samples: samples.len(),
        mesh,
        epsilon: epsilon_bound(p),
        max_distortion,
        max_approximation,
        isometric: max_distortion < DISTORTION_TOLERANCE,
        // Squared form avoids rounding in the square root; the tie gaps
        // move coordinates by at most N·TIE_GAP.
        dense: max_approximation * max_approximation <= mesh + 1e-10,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_partitions() {
        let p = Partition::standard(1).unwrap();
        assert_eq!(p.interior(), &[0.5]);
        assert_eq!(p.mesh(), 0.5);
        assert_eq!(
            Partition::standard(2).unwrap().interior(),
            &[0.25, 0.5, 0.75]
        );
        assert!(Partition::standard(0).is_err());
    }

    #[test]
    fn rejects_invalid() {
        assert!(Partition::new(vec![]).is_err());
        assert!(Partition::new(vec![0.5, 0.5]).is_err());
        assert!(Partition::new(vec![0.0, 0.5]).is_err());
        assert!(SimplexPoint::new(vec![0.3, 0.2]).is_err());
        assert!(SimplexPoint::new(vec![0.0]).is_err());
        assert!(SimplexPoint::new(vec![0.5, 1.0]).is_err());
    }

    #[test]
    fn embed_example() {
        let p = Partition::new(vec![0.5]).unwrap();
        let x = SimplexPoint::new(vec![0.3]).unwrap();
        let f = embed(&p, &x).unwrap();
        assert_eq!(f.eval(0.25).unwrap(), 0.0);
        assert_eq!(f.eval(0.5).unwrap(), 0.0);
        assert_eq!(f.eval(0.75).unwrap(), 0.3);
        let y = SimplexPoint::new(vec![0.2, 0.3]).unwrap();
        assert_eq!(
            embed(&p, &y),
            Err(Error::ShapeMismatch {
                expected: 1,
                got: 2
            })
        );
    }

    #[test]
    fn metric_example() {
        let p = Partition::new(vec![1.0 / 3.0, 2.0 / 3.0]).unwrap();
        let x = SimplexPoint::new(vec![0.2, 0.6]).unwrap();
        let y = SimplexPoint::new(vec![0.4, 0.9]).unwrap();
        let d = finite_metric(&p, &x, &y).unwrap();
        assert!((d - (0.13f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((d - 0.20817).abs() < 1e-5);
        assert_eq!(finite_metric(&p, &x, &x).unwrap(), 0.0);
        let l2 = l2_distance(&embed(&p, &x).unwrap(), &embed(&p, &y).unwrap());
        assert!((l2 - d).abs() < 1e-15);
    }

    #[test]
    fn snapshot_examples() {
        let p = Partition::standard(2).unwrap();
        let s = snapshot(&p, &QuantileFunction::identity());
        assert_eq!(s.coords(), &[0.25, 0.5, 0.75]);
        let c = snapshot(&p, &QuantileFunction::constant(0.5).unwrap());
        assert_eq!(c.coords(), &[0.5, 0.5 + TIE_GAP, 0.5 + 2.0 * TIE_GAP]);
        let top = snapshot(&p, &QuantileFunction::constant(1.0).unwrap());
        assert!(top.coords().iter().all(|x| *x < 1.0));
        let bottom = snapshot(&p, &QuantileFunction::constant(0.0).unwrap());
        assert!(bottom.coords()[0] > 0.0);
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon_bound(&Partition::standard(4).unwrap()), 0.5);
        assert_eq!(epsilon_bound(&Partition::standard(2).unwrap()), 1.0);
        let eps: Vec<f64> = (1..10)
            .map(|n| epsilon_bound(&Partition::standard(n).unwrap()))
            .collect();
        assert!(eps.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn certify_identity() {
        let p = Partition::standard(3).unwrap();
        let report = certify_epsilon_isometry(&p, &[QuantileFunction::identity()]).unwrap();
        // ∫ over each cell of (t − tᵢ)² is width³/3.
        let expected = (8.0 * (0.125f64).powi(3) / 3.0).sqrt();
        assert!((report.max_approximation - expected).abs() < 1e-15);
        assert!(report.passed());
        assert!(report.max_approximation <= p.mesh().sqrt());
        assert_eq!(certify_epsilon_isometry(&p, &[]), Err(Error::EmptySample));
    }

    #[test]
    fn nested_snapshot_reads_even_coordinates() {
        let fine = Partition::standard(3).unwrap();
        let coarse = Partition::standard(2).unwrap();
        let x = SimplexPoint::new((1..8).map(|k| (k as f64 / 8.0).powi(2)).collect()).unwrap();
        let s = snapshot(&coarse, &embed(&fine, &x).unwrap());
        let evens: Vec<f64> = x.coords().iter().skip(1).step_by(2).copied().collect();
        assert_eq!(s.coords(), evens.as_slice());
    }
}
