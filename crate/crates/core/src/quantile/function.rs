use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// How a [`QuantileFunction`] is laid out between its breakpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantileKind {
    /// `f = Σ vᵢ χ_(tᵢ, tᵢ₊₁]`, one value per segment.
    Step,
    /// Continuous piecewise-linear interpolation, one value per breakpoint.
    Linear,
    /// Affine on each segment with jumps allowed at breakpoints, one
    /// `[left, right]` pair per segment.
    Piecewise,
}

/// One affine piece of a quantile function: on `[t0, t1]` the value runs
/// from `v0` to `v1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub t0: f64,
    pub t1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Segment {
    #[inline]
    pub fn len(&self) -> f64 {
        self.t1 - self.t0
    }

    #[inline]
    pub fn is_flat(&self) -> bool {
        self.v0 == self.v1
    }

    #[inline]
    pub fn slope(&self) -> f64 {
        (self.v1 - self.v0) / (self.t1 - self.t0)
    }

    /// Value of the affine piece at `t`, clamped to the segment's range.
    #[inline]
    pub fn at(&self, t: f64) -> f64 {
        if self.v0 == self.v1 {
            return self.v0;
        }
        if t <= self.t0 {
            return self.v0;
        }
        if t >= self.t1 {
            return self.v1;
        }
        let v = self.v0 + (self.v1 - self.v0) * ((t - self.t0) / (self.t1 - self.t0));
        v.clamp(self.v0, self.v1)
    }
}

/// A nondecreasing map `[0,1] → [0,1]`, stored piecewise.
///
/// Values are stored as `[left, right]` pairs per segment regardless of
/// [`QuantileKind`]; the kind only records which layout the function was
/// built from and how it serializes.
///
/// Evaluation follows the `χ_(tᵢ, tᵢ₊₁]` convention of step functions: at an
/// interior breakpoint the value of the segment ending there is returned,
/// `f(0)` is the first segment's left value and `f(1)` the last value. Two
/// quantile functions that agree Lebesgue-a.e. describe the same measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QuantileRepr", into = "QuantileRepr")]
pub struct QuantileFunction {
    kind: QuantileKind,
    breakpoints: Vec<f64>,
    ends: Vec<[f64; 2]>,
}

impl QuantileFunction {
    /// Validates and builds a quantile function.
    ///
    /// `values` holds one entry per segment for [`QuantileKind::Step`] and
    /// one per breakpoint for [`QuantileKind::Linear`]. Use
    /// [`QuantileFunction::from_segments`] for the piecewise layout.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>, kind: QuantileKind) -> Result<Self> {
        check_breakpoints(&breakpoints)?;
        let segments = breakpoints.len() - 1;
        let ends: Vec<[f64; 2]> = match kind {
            QuantileKind::Step => {
                if values.len() != segments {
                    return Err(Error::DomainError(format!(
                        "step quantile needs {segments} values for {} breakpoints, got {}",
                        breakpoints.len(),
                        values.len()
                    )));
                }
                values.iter().map(|&v| [v, v]).collect()
            }
            QuantileKind::Linear => {
                if values.len() != breakpoints.len() {
                    return Err(Error::DomainError(format!(
                        "linear quantile needs one value per breakpoint ({}), got {}",
                        breakpoints.len(),
                        values.len()
                    )));
                }
                values.windows(2).map(|w| [w[0], w[1]]).collect()
            }
            QuantileKind::Piecewise => {
                return Err(Error::DomainError(
                    "piecewise quantiles take [left, right] pairs; use from_segments".into(),
                ))
            }
        };
        check_values(&ends)?;
        Ok(Self {
            kind,
            breakpoints,
            ends,
        })
    }

    /// Builds a piecewise-affine quantile from per-segment `[left, right]`
    /// values. Jumps at breakpoints are allowed, decreases are not.
    pub fn from_segments(breakpoints: Vec<f64>, ends: Vec<[f64; 2]>) -> Result<Self> {
        check_breakpoints(&breakpoints)?;
        if ends.len() + 1 != breakpoints.len() {
            return Err(Error::DomainError(format!(
                "piecewise quantile needs {} value pairs, got {}",
                breakpoints.len() - 1,
                ends.len()
            )));
        }
        check_values(&ends)?;
        Ok(Self {
            kind: QuantileKind::Piecewise,
            breakpoints,
            ends,
        }
        .canonical())
    }

    /// `f(t) = t`.
    pub fn identity() -> Self {
        Self {
            kind: QuantileKind::Linear,
            breakpoints: vec![0.0, 1.0],
            ends: vec![[0.0, 1.0]],
        }
    }

    /// The constant map, i.e. the quantile of a point mass.
    pub fn constant(value: f64) -> Result<Self> {
        Self::new(vec![0.0, 1.0], vec![value], QuantileKind::Step)
    }

    /// Assembles already-validated pieces (monotone, in range, breakpoints
    /// strictly increasing from 0 to 1) and picks the tightest kind.
    pub(crate) fn from_parts(breakpoints: Vec<f64>, ends: Vec<[f64; 2]>) -> Self {
        debug_assert!(check_breakpoints(&breakpoints).is_ok());
        debug_assert!(check_values(&ends).is_ok(), "{ends:?}");
        Self {
            kind: QuantileKind::Piecewise,
            breakpoints,
            ends,
        }
        .canonical()
    }

    /// Merges neighbouring flat segments with equal values and reports the
    /// tightest kind that represents the function.
    fn canonical(mut self) -> Self {
        let mut bps = Vec::with_capacity(self.breakpoints.len());
        let mut ends: Vec<[f64; 2]> = Vec::with_capacity(self.ends.len());
        bps.push(self.breakpoints[0]);
        for (i, e) in self.ends.iter().enumerate() {
            let right = self.breakpoints[i + 1];
            if let Some(last) = ends.last() {
                if last[0] == last[1] && e[0] == e[1] && last[1] == e[0] {
                    *bps.last_mut().unwrap() = right;
                    continue;
                }
            }
            ends.push(*e);
            bps.push(right);
        }
        self.kind = if ends.iter().all(|e| e[0] == e[1]) {
            QuantileKind::Step
        } else if ends.windows(2).all(|w| w[0][1] == w[1][0]) {
            QuantileKind::Linear
        } else {
            QuantileKind::Piecewise
        };
        self.breakpoints = bps;
        self.ends = ends;
        self
    }

    pub fn kind(&self) -> QuantileKind {
        self.kind
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn segment_count(&self) -> usize {
        self.ends.len()
    }

    pub fn segment(&self, i: usize) -> Segment {
        Segment {
            t0: self.breakpoints[i],
            t1: self.breakpoints[i + 1],
            v0: self.ends[i][0],
            v1: self.ends[i][1],
        }
    }

    pub fn segments(&self) -> impl ExactSizeIterator<Item = Segment> + '_ {
        (0..self.ends.len()).map(move |i| self.segment(i))
    }

    /// Values in the layout of [`Self::kind`]: per segment for step, per
    /// breakpoint for linear, flattened pairs for piecewise.
    pub fn values(&self) -> Vec<f64> {
        match self.kind {
            QuantileKind::Step => self.ends.iter().map(|e| e[0]).collect(),
            QuantileKind::Linear => std::iter::once(self.ends[0][0])
                .chain(self.ends.iter().map(|e| e[1]))
                .collect(),
            QuantileKind::Piecewise => self.ends.iter().flat_map(|e| [e[0], e[1]]).collect(),
        }
    }

    /// Whether no segment of positive length is flat.
    pub fn is_strictly_increasing(&self) -> bool {
        self.ends.iter().all(|e| e[0] < e[1])
    }

    /// Evaluates `f(t)`; see the type docs for the breakpoint convention.
    pub fn eval(&self, t: f64) -> Result<f64> {
        check_unit(t)?;
        // First breakpoint index >= t, i.e. t ∈ (b[i-1], b[i]].
        let i = self.breakpoints.partition_point(|&b| b < t);
        let seg = i.saturating_sub(1).min(self.ends.len() - 1);
        Ok(self.segment(seg).at(t))
    }

    /// The right limit `f(t+)`, with `f(1+) := f(1)`.
    pub fn right_limit(&self, t: f64) -> Result<f64> {
        check_unit(t)?;
        // Last segment whose start is <= t.
        let i = self.breakpoints.partition_point(|&b| b <= t);
        let seg = i.saturating_sub(1).min(self.ends.len() - 1);
        Ok(self.segment(seg).at(t))
    }

    /// Pointwise `(1 − t)·self + t·other` on the merged breakpoints.
    pub fn interpolate(&self, other: &Self, t: f64) -> Result<Self> {
        check_unit(t)?;
        let s = 1.0 - t;
        let mut bps = vec![0.0];
        let mut ends = Vec::new();
        for cell in merged_cells(self, other) {
            let f = self.segment(cell.left);
            let g = other.segment(cell.right);
            let lo = (s * f.at(cell.t0) + t * g.at(cell.t0)).clamp(0.0, 1.0);
            let hi = (s * f.at(cell.t1) + t * g.at(cell.t1)).clamp(0.0, 1.0);
            ends.push([lo, hi.max(lo)]);
            bps.push(cell.t1);
        }
        Ok(Self::from_parts(bps, ends))
    }
}

/// A cell of the common refinement of two breakpoint grids, with the index
/// of the segment of each function that covers it.
#[derive(Clone, Copy, Debug)]
pub(crate) struct MergedCell {
    pub t0: f64,
    pub t1: f64,
    pub left: usize,
    pub right: usize,
}

pub(crate) fn merged_cells(f: &QuantileFunction, g: &QuantileFunction) -> Vec<MergedCell> {
    merge_grids(f.breakpoints(), g.breakpoints())
}

/// Common refinement of two grids over the same interval.
pub(crate) fn merge_grids(a: &[f64], b: &[f64]) -> Vec<MergedCell> {
    let mut cells = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut t0 = a[0].max(b[0]);
    while i + 1 < a.len() && j + 1 < b.len() {
        let t1 = a[i + 1].min(b[j + 1]);
        if t1 > t0 {
            cells.push(MergedCell {
                t0,
                t1,
                left: i,
                right: j,
            });
            t0 = t1;
        }
        if a[i + 1] <= t1 {
            i += 1;
        }
        if b[j + 1] <= t1 {
            j += 1;
        }
    }
    cells
}

/// `‖f − g‖_{L²[0,1]}`, integrated exactly cell by cell on the merged grid.
pub fn l2_distance(f: &QuantileFunction, g: &QuantileFunction) -> f64 {
    l2_distance_squared(f, g).sqrt()
}

pub fn l2_distance_squared(f: &QuantileFunction, g: &QuantileFunction) -> f64 {
    merged_cells(f, g)
        .into_iter()
        .map(|c| {
            let (fs, gs) = (f.segment(c.left), g.segment(c.right));
            let d0 = fs.at(c.t0) - gs.at(c.t0);
            let d1 = fs.at(c.t1) - gs.at(c.t1);
            // ∫ of a squared affine function over the cell.
            (c.t1 - c.t0) * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0
        })
        .sum()
}

fn check_unit(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::DomainError(format!("argument {t} outside [0, 1]")))
    }
}

fn check_breakpoints(bps: &[f64]) -> Result<()> {
    if bps.len() < 2 {
        return Err(Error::DomainError("need at least two breakpoints".into()));
    }
    if bps[0] != 0.0 || bps[bps.len() - 1] != 1.0 {
        return Err(Error::DomainError(
            "breakpoints must start at 0 and end at 1".into(),
        ));
    }
    if let Some(w) = bps.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(Error::DomainError(format!(
            "breakpoints not strictly increasing: {} then {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

fn check_values(ends: &[[f64; 2]]) -> Result<()> {
    for e in ends {
        for v in e {
            if !(0.0..=1.0).contains(v) {
                return Err(Error::DomainError(format!("value {v} outside [0, 1]")));
            }
        }
    }
    let mut prev = f64::NEG_INFINITY;
    for e in ends {
        if e[0] < prev || e[1] < e[0] {
            return Err(Error::NonMonotone(format!(
                "values decrease: {} then {}",
                prev.max(e[0]),
                if e[0] < prev { e[0] } else { e[1] }
            )));
        }
        prev = e[1];
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ValuesRepr {
    Flat(Vec<f64>),
    Pairs(Vec<[f64; 2]>),
}

#[derive(Serialize, Deserialize)]
struct QuantileRepr {
    kind: QuantileKind,
    breakpoints: Vec<f64>,
    values: ValuesRepr,
}

impl TryFrom<QuantileRepr> for QuantileFunction {
    type Error = Error;

    fn try_from(r: QuantileRepr) -> Result<Self> {
        match (r.kind, r.values) {
            (QuantileKind::Piecewise, ValuesRepr::Pairs(p)) => {
                Self::from_segments(r.breakpoints, p)
            }
            (QuantileKind::Piecewise, ValuesRepr::Flat(v)) if v.len() % 2 == 0 => {
                let pairs = v.chunks(2).map(|c| [c[0], c[1]]).collect();
                Self::from_segments(r.breakpoints, pairs)
            }
            (kind, ValuesRepr::Flat(v)) if kind != QuantileKind::Piecewise => {
                Self::new(r.breakpoints, v, kind)
            }
            (kind, _) => Err(Error::DomainError(format!(
                "values do not match kind {kind:?}"
            ))),
        }
    }
}

impl From<QuantileFunction> for QuantileRepr {
    fn from(q: QuantileFunction) -> Self {
        let values = match q.kind {
            QuantileKind::Piecewise => ValuesRepr::Pairs(q.ends.clone()),
            _ => ValuesRepr::Flat(q.values()),
        };
        QuantileRepr {
            kind: q.kind,
            breakpoints: q.breakpoints,
            values,
        }
    }
}
