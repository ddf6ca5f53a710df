//! Random instances and numerical oracles shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use wot1d::{Atom, Density, Measure1D, QuantileFunction, QuantileKind};

/// `n` distinct sorted points in `(0, 1)` at least `gap` apart.
pub fn sorted_points<R: Rng>(rng: &mut R, n: usize, gap: f64) -> Vec<f64> {
    loop {
        let mut pts: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        pts.sort_by(f64::total_cmp);
        let ok = pts.first().is_some_and(|&p| p > gap)
            && pts.last().is_some_and(|&p| p < 1.0 - gap)
            && pts.windows(2).all(|w| w[1] - w[0] > gap);
        if ok || n == 0 {
            return pts;
        }
    }
}

fn normalized<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|w| w / total).collect()
}

pub fn random_atomic<R: Rng>(rng: &mut R, max_atoms: usize) -> Measure1D {
    let n = rng.random_range(1..=max_atoms);
    let xs: Vec<f64> = loop {
        let mut xs: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        if xs.len() == n {
            break xs;
        }
    };
    let ws = normalized(rng, n);
    Measure1D::from_atoms(
        xs.into_iter()
            .zip(ws)
            .map(|(x, w)| Atom::new(x, w))
            .collect(),
    )
    .unwrap()
}

/// A piecewise-constant density with `cells` cells; `zero_prob` of the cells
/// are empty.
pub fn random_density_part<R: Rng>(
    rng: &mut R,
    cells: usize,
    zero_prob: f64,
    mass: f64,
) -> Density {
    let mut grid = vec![0.0];
    grid.extend(sorted_points(rng, cells - 1, 1e-3));
    grid.push(1.0);
    let mut heights: Vec<f64> = (0..cells)
        .map(|_| {
            if rng.random_bool(zero_prob) {
                0.0
            } else {
                rng.random_range(0.1..3.0)
            }
        })
        .collect();
    if heights.iter().all(|&h| h == 0.0) {
        heights[cells / 2] = 1.0;
    }
    let total: f64 = grid
        .windows(2)
        .zip(&heights)
        .map(|(w, h)| h * (w[1] - w[0]))
        .sum();
    let heights = heights.iter().map(|h| h * mass / total).collect();
    Density::new(grid, heights).unwrap()
}

pub fn random_density<R: Rng>(rng: &mut R, max_cells: usize, zero_prob: f64) -> Measure1D {
    let cells = rng.random_range(1..=max_cells);
    Measure1D::from_density(random_density_part(rng, cells, zero_prob, 1.0)).unwrap()
}

/// Atomic, absolutely continuous or mixed, with equal odds.
pub fn random_measure<R: Rng>(rng: &mut R) -> Measure1D {
    match rng.random_range(0..3) {
        0 => random_atomic(rng, 6),
        1 => random_density(rng, 6, 0.2),
        _ => {
            let atomic_mass = rng.random_range(0.1..0.9);
            let atoms = match random_atomic(rng, 3) {
                Measure1D::Atoms(a) => a,
                _ => unreachable!(),
            };
            let atoms = atoms
                .into_iter()
                .map(|a| Atom::new(a.position, a.weight * atomic_mass))
                .collect();
            let cells = rng.random_range(1..=4);
            Measure1D::mixed(
                atoms,
                random_density_part(rng, cells, 0.0, 1.0 - atomic_mass),
            )
            .unwrap()
        }
    }
}

/// A strictly increasing continuous piecewise-linear map `[0,1] → [0,1]`.
pub fn random_increasing_linear<R: Rng>(rng: &mut R, max_pieces: usize) -> QuantileFunction {
    let pieces = rng.random_range(1..=max_pieces);
    let mut bps = vec![0.0];
    bps.extend(sorted_points(rng, pieces - 1, 1e-3));
    bps.push(1.0);
    let lo = rng.random_range(0.0..0.3);
    let hi = rng.random_range(0.7..=1.0);
    let mut vals = vec![lo];
    vals.extend(
        sorted_points(rng, pieces - 1, 1e-3)
            .into_iter()
            .map(|v| lo + v * (hi - lo)),
    );
    vals.push(hi);
    QuantileFunction::new(bps, vals, QuantileKind::Linear).unwrap()
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `eps`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, eps: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
                + step(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, eps, 48)
}

/// `∫ₐᵇ (t−a)^{α−1}(b−t)^{β−1} dt` by quadrature, after rescaling to
/// `(b−a)^{α+β−1} ∫₀¹ x^{α−1}(1−x)^{β−1} dx`. `eps` is the absolute tolerance
/// on the unit integral. For exponents below one each half is integrated
/// after `u = x^α` (resp. `(1−x)^β`), which removes the endpoint singularity.
pub fn beta_quadrature(a: f64, b: f64, alpha: f64, beta: f64, eps: f64) -> f64 {
    let scale = (b - a).powf(alpha + beta - 1.0);
    let unit = if alpha >= 1.0 && beta >= 1.0 {
        let f = |x: f64| x.powf(alpha - 1.0) * (1.0 - x).powf(beta - 1.0);
        adaptive_simpson(&f, 0.0, 1.0, eps)
    } else {
        let left = |u: f64| (1.0 - u.powf(1.0 / alpha)).powf(beta - 1.0) / alpha;
        let right = |v: f64| (1.0 - v.powf(1.0 / beta)).powf(alpha - 1.0) / beta;
        adaptive_simpson(&left, 0.0, 0.5f64.powf(alpha), eps)
            + adaptive_simpson(&right, 0.0, 0.5f64.powf(beta), eps)
    };
    scale * unit
}

/// Kolmogorov–Smirnov distance between a sample and the uniform law.
pub fn ks_uniform(mut sample: Vec<f64>) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).max((i + 1) as f64 / n - x))
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}
