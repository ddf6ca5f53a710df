use serde::{Deserialize, Serialize};

use super::function::QuantileFunction;
use crate::{Error, Result};

/// Tolerance on the total mass of a probability measure.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A point mass.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(rename = "x")]
    pub position: f64,
    #[serde(rename = "w")]
    pub weight: f64,
}

impl Atom {
    pub fn new(position: f64, weight: f64) -> Self {
        Self { position, weight }
    }
}

/// A piecewise-constant density on a grid spanning `[0, 1]`.
///
/// The total mass is not required to be one: densities also describe the
/// absolutely continuous part of a mixed measure and inputs to
/// [`pushforward_density`](super::pushforward_density).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityRepr", into = "DensityRepr")]
pub struct Density {
    grid: Vec<f64>,
    heights: Vec<f64>,
    total_mass: f64,
}

#[derive(Serialize, Deserialize)]
struct DensityRepr {
    grid: Vec<f64>,
    heights: Vec<f64>,
}

impl TryFrom<DensityRepr> for Density {
    type Error = Error;
    fn try_from(r: DensityRepr) -> Result<Self> {
        Density::new(r.grid, r.heights)
    }
}

impl From<Density> for DensityRepr {
    fn from(d: Density) -> Self {
        DensityRepr {
            grid: d.grid,
            heights: d.heights,
        }
    }
}

impl Density {
    pub fn new(grid: Vec<f64>, heights: Vec<f64>) -> Result<Self> {
        if grid.len() < 2 || grid.len() != heights.len() + 1 {
            return Err(Error::InvalidMeasure(format!(
                "density grid of {} points needs {} heights, got {}",
                grid.len(),
                grid.len().saturating_sub(1),
                heights.len()
            )));
        }
        if grid[0] != 0.0 || grid[grid.len() - 1] != 1.0 {
            return Err(Error::InvalidMeasure(
                "density grid must span [0, 1]".into(),
            ));
        }
        if grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidMeasure(
                "density grid not strictly increasing".into(),
            ));
        }
        if let Some(h) = heights.iter().find(|h| !(h.is_finite() && **h >= 0.0)) {
            return Err(Error::InvalidMeasure(format!(
                "density height {h} is not a nonnegative real"
            )));
        }
        Ok(Self::from_parts(grid, heights))
    }

    pub(crate) fn from_parts(grid: Vec<f64>, heights: Vec<f64>) -> Self {
        let total_mass = grid
            .windows(2)
            .zip(&heights)
            .map(|(w, h)| h * (w[1] - w[0]))
            .sum();
        Self {
            grid,
            heights,
            total_mass,
        }
    }

    /// Height one on `[0, 1]`.
    pub fn uniform() -> Self {
        Self::from_parts(vec![0.0, 1.0], vec![1.0])
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// `(lo, hi, height)` for every cell.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.grid
            .windows(2)
            .zip(&self.heights)
            .map(|(w, &h)| (w[0], w[1], h))
    }

    /// Mass of `[0, x]`.
    pub fn mass_below(&self, x: f64) -> f64 {
        self.cells()
            .take_while(|(lo, _, _)| *lo < x)
            .map(|(lo, hi, h)| h * (hi.min(x) - lo))
            .sum()
    }
}

/// A probability measure on `[0, 1]`.
///
/// Serializes as `{"atoms":[{"x":..,"w":..}]}`, `{"density":{"grid":[..],
/// "heights":[..]}}`, or `{"mixed":{"atoms":[..],"density":{..}}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub enum Measure1D {
    Atoms(Vec<Atom>),
    Density(Density),
    /// Atomic part plus a density carrying the remaining mass.
    Mixed {
        atoms: Vec<Atom>,
        density: Density,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum MeasureRepr {
    Atoms(Vec<Atom>),
    Density(Density),
    Mixed { atoms: Vec<Atom>, density: Density },
}

impl TryFrom<MeasureRepr> for Measure1D {
    type Error = Error;
    fn try_from(r: MeasureRepr) -> Result<Self> {
        match r {
            MeasureRepr::Atoms(a) => Measure1D::from_atoms(a),
            MeasureRepr::Density(d) => Measure1D::from_density(d),
            MeasureRepr::Mixed { atoms, density } => Measure1D::mixed(atoms, density),
        }
    }
}

impl From<Measure1D> for MeasureRepr {
    fn from(m: Measure1D) -> Self {
        match m {
            Measure1D::Atoms(a) => MeasureRepr::Atoms(a),
            Measure1D::Density(d) => MeasureRepr::Density(d),
            Measure1D::Mixed { atoms, density } => MeasureRepr::Mixed { atoms, density },
        }
    }
}

fn check_atoms(atoms: &[Atom]) -> Result<f64> {
    for a in atoms {
        if !(0.0..=1.0).contains(&a.position) {
            return Err(Error::InvalidMeasure(format!(
                "atom position {} outside [0, 1]",
                a.position
            )));
        }
        if !(a.weight.is_finite() && a.weight > 0.0) {
            return Err(Error::InvalidMeasure(format!(
                "atom weight {} is not positive",
                a.weight
            )));
        }
    }
    if let Some(w) = atoms.windows(2).find(|w| !(w[0].position < w[1].position)) {
        return Err(Error::InvalidMeasure(format!(
            "atom positions not strictly increasing: {} then {}",
            w[0].position, w[1].position
        )));
    }
    Ok(atoms.iter().map(|a| a.weight).sum())
}

fn check_mass(mass: f64) -> Result<()> {
    if (mass - 1.0).abs() > MASS_TOLERANCE {
        Err(Error::InvalidMeasure(format!(
            "total mass {mass} differs from 1"
        )))
    } else {
        Ok(())
    }
}

impl Measure1D {
    pub fn from_atoms(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        check_mass(check_atoms(&atoms)?)?;
        Ok(Measure1D::Atoms(atoms))
    }

    /// Atoms from `(position, weight)` pairs in increasing position order.
    pub fn atomic(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::from_atoms(pairs.iter().map(|&(x, w)| Atom::new(x, w)).collect())
    }

    pub fn from_density(density: Density) -> Result<Self> {
        check_mass(density.total_mass())?;
        Ok(Measure1D::Density(density))
    }

    pub fn density(grid: Vec<f64>, heights: Vec<f64>) -> Result<Self> {
        Self::from_density(Density::new(grid, heights)?)
    }

    pub fn mixed(atoms: Vec<Atom>, density: Density) -> Result<Self> {
        if atoms.is_empty() {
            return Self::from_density(density);
        }
        let atomic = check_atoms(&atoms)?;
        check_mass(atomic + density.total_mass())?;
        Ok(Measure1D::Mixed { atoms, density })
    }

    /// Lebesgue measure on `[0, 1]`.
    pub fn uniform() -> Self {
        Measure1D::Density(Density::uniform())
    }

    /// The point mass `δ_x`.
    pub fn dirac(x: f64) -> Result<Self> {
        Self::atomic(&[(x, 1.0)])
    }

    pub fn atoms(&self) -> &[Atom] {
        match self {
            Measure1D::Atoms(a) | Measure1D::Mixed { atoms: a, .. } => a,
            Measure1D::Density(_) => &[],
        }
    }

    pub fn density_part(&self) -> Option<&Density> {
        match self {
            Measure1D::Density(d) | Measure1D::Mixed { density: d, .. } => Some(d),
            Measure1D::Atoms(_) => None,
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Measure1D::Atoms(_))
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms().iter().map(|a| a.weight).sum::<f64>()
            + self.density_part().map_or(0.0, Density::total_mass)
    }

    /// `μ([0, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        let atomic: f64 = self
            .atoms()
            .iter()
            .filter(|a| a.position <= x)
            .map(|a| a.weight)
            .sum();
        atomic + self.density_part().map_or(0.0, |d| d.mass_below(x))
    }

    /// `μ([0, x))`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        let atomic: f64 = self
            .atoms()
            .iter()
            .filter(|a| a.position < x)
            .map(|a| a.weight)
            .sum();
        atomic + self.density_part().map_or(0.0, |d| d.mass_below(x))
    }

    /// Sup-norm distance of the distribution functions, evaluated on both
    /// sides of every atom and grid point (exact for these representations).
    pub fn cdf_distance(&self, other: &Self) -> f64 {
        let mut knots: Vec<f64> = [self, other]
            .iter()
            .flat_map(|m| {
                m.atoms()
                    .iter()
                    .map(|a| a.position)
                    .chain(
                        m.density_part()
                            .into_iter()
                            .flat_map(|d| d.grid().iter().copied()),
                    )
                    .collect::<Vec<_>>()
            })
            .collect();
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        knots
            .iter()
            .map(|&x| {
                let right = (self.cdf(x) - other.cdf(x)).abs();
                let left = (self.cdf_left(x) - other.cdf_left(x)).abs();
                right.max(left)
            })
            .fold(0.0, f64::max)
    }

    /// Equality up to `tol` in distribution function.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.cdf_distance(other) <= tol
    }
}

enum Piece {
    Atom { x: f64, mass: f64 },
    Cell { lo: f64, hi: f64, mass: f64 },
}

impl Piece {
    fn mass(&self) -> f64 {
        match self {
            Piece::Atom { mass, .. } | Piece::Cell { mass, .. } => *mass,
        }
    }
}

/// Pieces of a measure in increasing position order; density cells are
/// split at interior atoms.
fn pieces(mu: &Measure1D) -> Vec<Piece> {
    let atoms = mu.atoms();
    let mut out = Vec::new();
    let mut k = 0;
    if let Some(d) = mu.density_part() {
        for (lo, hi, h) in d.cells() {
            let mut start = lo;
            while k < atoms.len() && atoms[k].position <= start {
                out.push(Piece::Atom {
                    x: atoms[k].position,
                    mass: atoms[k].weight,
                });
                k += 1;
            }
            while k < atoms.len() && atoms[k].position < hi {
                let x = atoms[k].position;
                if h > 0.0 {
                    out.push(Piece::Cell {
                        lo: start,
                        hi: x,
                        mass: h * (x - start),
                    });
                }
                out.push(Piece::Atom {
                    x,
                    mass: atoms[k].weight,
                });
                start = x;
                k += 1;
            }
            if h > 0.0 {
                out.push(Piece::Cell {
                    lo: start,
                    hi,
                    mass: h * (hi - start),
                });
            }
        }
    }
    for a in &atoms[k..] {
        out.push(Piece::Atom {
            x: a.position,
            mass: a.weight,
        });
    }
    out
}

/// `Ψ⁻¹`: the inverse distribution function `g(t) = inf{s : μ([0,s]) > t}`.
///
/// Atoms become flat pieces, density cells become linear pieces and
/// massless gaps become jumps. Breakpoints are the cumulative masses,
/// normalised so the last one is exactly 1.
pub fn psi_inverse(mu: &Measure1D) -> QuantileFunction {
    let pieces = pieces(mu);
    let total: f64 = pieces.iter().map(Piece::mass).sum();
    let mut bps = vec![0.0];
    let mut ends = Vec::with_capacity(pieces.len());
    let mut cumulative = 0.0;
    for p in &pieces {
        cumulative += p.mass();
        let t = if std::ptr::eq(p, pieces.last().unwrap()) {
            1.0
        } else {
            (cumulative / total).min(1.0)
        };
        if t <= *bps.last().unwrap() {
            continue;
        }
        ends.push(match *p {
            Piece::Atom { x, .. } => [x, x],
            Piece::Cell { lo, hi, .. } => [lo, hi],
        });
        bps.push(t);
    }
    // A piece too light to open its own cell can leave the last breakpoint
    // short of 1; the final piece always claims the remainder.
    if *bps.last().unwrap() < 1.0 {
        *bps.last_mut().unwrap() = 1.0;
    }
    QuantileFunction::from_parts(bps, ends)
}

/// `Ψ`: the pushforward of Lebesgue measure on `[0, 1]` by `f`.
///
/// Flat pieces give atoms weighted by their length; increasing pieces give
/// density `len / (v1 − v0)` on their image.
pub fn psi(f: &QuantileFunction) -> Measure1D {
    let mut atoms: Vec<Atom> = Vec::new();
    let mut grid = vec![0.0];
    let mut heights = Vec::new();
    for seg in f.segments() {
        if seg.is_flat() {
            match atoms.last_mut() {
                Some(a) if a.position == seg.v0 => a.weight += seg.len(),
                _ => atoms.push(Atom::new(seg.v0, seg.len())),
            }
            continue;
        }
        let cursor = *grid.last().unwrap();
        if seg.v0 > cursor {
            grid.push(seg.v0);
            heights.push(0.0);
        }
        grid.push(seg.v1);
        heights.push(seg.len() / (seg.v1 - seg.v0));
    }
    if heights.is_empty() {
        return Measure1D::Atoms(atoms);
    }
    if *grid.last().unwrap() < 1.0 {
        grid.push(1.0);
        heights.push(0.0);
    }
    let density = Density::from_parts(grid, heights);
    if atoms.is_empty() {
        Measure1D::Density(density)
    } else {
        Measure1D::Mixed { atoms, density }
    }
}
