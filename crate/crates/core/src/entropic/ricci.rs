use serde::Serialize;

use super::special::reg_incomplete_beta_upper;
use crate::scan::{ScanSeries, ScanValue};
use crate::{Error, Result};

fn check_open_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::DomainError(format!(
            "{name} must lie in (0, 1), got {v}"
        )))
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(Error::DomainError(format!(
            "beta must be positive, got {beta}"
        )))
    }
}

/// `ℚ(g(s) > 1/2)`, with `g(s) ~ Beta(βs, β(1−s))`.
pub fn prob_as(s: f64, beta: f64) -> Result<f64> {
    check_open_unit("s", s)?;
    check_beta(beta)?;
    reg_incomplete_beta_upper(0.5, beta * s, beta * (1.0 - s))
}

/// `ℚ(g(s) > t/2)`. Equals 1 at `t = 0` and [`prob_as`] at `t = 1`.
pub fn prob_cst(s: f64, t: f64, beta: f64) -> Result<f64> {
    check_open_unit("s", s)?;
    check_beta(beta)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::DomainError(format!("t must lie in [0, 1], got {t}")));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    reg_incomplete_beta_upper(t / 2.0, beta * s, beta * (1.0 - s))
}

/// `R(s, t) = ℚ(C_s(t)) / ℚ(A_s)^{1−t}`.
///
/// `C_s(t)` is the `t`-interpolation between `A_s` and the full space, so a
/// measure that is `K`-log-concave would keep `R` above
/// `exp(K t(1−t) d²/2)`. `R → 0` as `s → 0`.
pub fn log_concavity_ratio(s: f64, t: f64, beta: f64) -> Result<f64> {
    check_open_unit("t", t)?;
    let c = prob_cst(s, t, beta)?;
    let a = prob_as(s, beta)?;
    Ok((c.ln() - (1.0 - t) * a.ln()).exp())
}

/// Lower bound on `R` forced by `K`-log-concavity, at the value of
/// `d² ∈ [0, 1]` least favourable to falsification.
pub fn ricci_threshold(k: f64, t: f64) -> f64 {
    let d2 = if k >= 0.0 { 0.0 } else { 1.0 };
    (k * t * (1.0 - t) / 2.0 * d2).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RicciRow {
    pub s: f64,
    pub ratio: f64,
    pub threshold: f64,
    pub violated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RicciReport {
    pub k: f64,
    pub t: f64,
    pub beta: f64,
    pub rows: Vec<RicciRow>,
    /// First grid point, in grid order, where `R` falls below the threshold.
    pub witness: Option<f64>,
    pub inconclusive: bool,
}

impl RicciReport {
    pub fn to_series(&self) -> ScanSeries {
        let mut series = ScanSeries::new(["s", "ratio", "threshold", "violated"]);
        for r in &self.rows {
            series.push(vec![
                ScanValue::Real(r.s),
                ScanValue::Real(r.ratio),
                ScanValue::Real(r.threshold),
                ScanValue::Flag(r.violated),
            ]);
        }
        series
    }
}

/// Scans `R(s, t, β)` over `s_grid` against the threshold for `K`.
/// An empty grid, or one with no violation, leaves the report inconclusive.
pub fn falsify_ricci(k: f64, t: f64, beta: f64, s_grid: &[f64]) -> Result<RicciReport> {
    check_open_unit("t", t)?;
    check_beta(beta)?;
    if !k.is_finite() {
        return Err(Error::DomainError(format!("K must be finite, got {k}")));
    }
    let threshold = ricci_threshold(k, t);
    let rows = s_grid
        .iter()
        .map(|&s| {
            let ratio = log_concavity_ratio(s, t, beta)?;
            Ok(RicciRow {
                s,
                ratio,
                threshold,
                violated: ratio < threshold,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let witness = rows.iter().find(|r| r.violated).map(|r| r.s);
    Ok(RicciReport {
        k,
        t,
        beta,
        rows,
        witness,
        inconclusive: witness.is_none(),
    })
}

/// `10^{-1}, …, 10^{-decades}`.
pub fn decade_grid(decades: u32) -> Vec<f64> {
    (1..=decades as i32).map(|k| 10f64.powi(-k)).collect()
}
