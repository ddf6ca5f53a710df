//! Deterministic inputs for the criterion benchmarks in `benches/`.

use wot1d::{Atom, Measure1D};

/// `n` atoms at `(i + shift) / n` with weights proportional to `1 + i mod 3`.
pub fn comb(n: usize, shift: f64) -> Measure1D {
    let raw: Vec<f64> = (0..n).map(|i| 1.0 + (i % 3) as f64).collect();
    let total: f64 = raw.iter().sum();
    let atoms = raw
        .iter()
        .enumerate()
        .map(|(i, w)| Atom::new((i as f64 + shift) / n as f64, w / total))
        .collect();
    Measure1D::from_atoms(atoms).expect("comb weights sum to one")
}

/// Density on `n` equal cells with heights alternating around one.
pub fn ripple(n: usize) -> Measure1D {
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let heights: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.5 } else { 0.5 }).collect();
    let total: f64 = heights.iter().sum::<f64>() / n as f64;
    Measure1D::density(grid, heights.iter().map(|h| h / total).collect())
        .expect("ripple has unit mass")
}
