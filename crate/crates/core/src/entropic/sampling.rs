use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Open01};
use rayon::prelude::*;
use serde::Serialize;

use crate::gh::{embed, Partition, SimplexPoint};
use crate::quantile::QuantileFunction;
use crate::{Error, Result};

/// Seeded random stream. Equal `(seed, stream)` pairs replay equal draws;
/// distinct streams of one seed are independent.
#[derive(Clone, Debug)]
pub struct RngState {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// The finite-dimensional marginal of the entropic measure on a partition:
/// increments `(x₁, x₂ − x₁, …, 1 − x_N)` are Dirichlet with parameters
/// `β(tᵢ₊₁ − tᵢ)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DirichletSpec {
    beta: f64,
    partition: Partition,
}

impl DirichletSpec {
    pub fn new(beta: f64, partition: Partition) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::DomainError(format!(
                "beta must be positive, got {beta}"
            )));
        }
        Ok(Self { beta, partition })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    /// `β(tᵢ₊₁ − tᵢ)` for `i = 0..=N`.
    pub fn alphas(&self) -> Vec<f64> {
        self.partition
            .widths()
            .into_iter()
            .map(|w| self.beta * w)
            .collect()
    }
}

/// Draws from a fixed [`DirichletSpec`]; reusable across draws.
#[derive(Clone, Debug)]
pub struct MarginalSampler {
    shapes: Vec<f64>,
    boosted: Vec<Gamma<f64>>,
}

impl MarginalSampler {
    pub fn new(spec: &DirichletSpec) -> Self {
        let shapes = spec.alphas();
        let boosted = shapes
            .iter()
            .map(|&a| Gamma::new(a + 1.0, 1.0).expect("shape is positive"))
            .collect();
        Self { shapes, boosted }
    }

    /// `ln G` for `G ~ Gamma(shape, 1)`, using `G = G' · U^{1/shape}` with
    /// `G' ~ Gamma(shape + 1, 1)` so small shapes do not underflow.
    fn ln_gamma_variate<R: Rng + ?Sized>(&self, i: usize, rng: &mut R) -> f64 {
        let g: f64 = self.boosted[i].sample(rng);
        let u: f64 = Open01.sample(rng);
        g.ln() + u.ln() / self.shapes[i]
    }

    /// One draw of `(g(t₁), …, g(t_N))`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SimplexPoint {
        let logs: Vec<f64> = (0..self.shapes.len())
            .map(|i| self.ln_gamma_variate(i, rng))
            .collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let coords = weights[..weights.len() - 1]
            .iter()
            .map(|w| {
                acc += w / total;
                acc.min(1.0)
            })
            .collect();
        SimplexPoint::from_nondecreasing(coords)
    }
}

/// One draw from the marginal law on `Σ_N`.
pub fn sample_marginal(spec: &DirichletSpec, rng: &mut RngState) -> SimplexPoint {
    MarginalSampler::new(spec).sample(rng.rng())
}

/// One draw from the level-`level` approximation of the entropic measure:
/// a marginal on the standard dyadic partition, embedded as a step quantile.
pub fn sample_quantile(level: u32, beta: f64, rng: &mut RngState) -> Result<QuantileFunction> {
    let partition = Partition::standard(level)?;
    let spec = DirichletSpec::new(beta, partition)?;
    let x = sample_marginal(&spec, rng);
    embed(spec.partition(), &x)
}

/// Couples a level-`N+1` point with its level-`N` coarsening.
///
/// For `x = (x₁, …, x_{2^{N+1}−1})` the coarse point keeps the coordinates at
/// the coarse partition points, `(x₂, x₄, …, x_{2^{N+1}−2})`. Fine cell `2k`
/// carries the same value in both step functions and fine cell `2k+1`
/// differs by `x_{2k+1} − x_{2k}` (`x₀ = 0`), so
/// `‖f^N(coarse) − f^{N+1}(x)‖² = 2^{−(N+1)} Σ_{k=0}^{2^N−1} (x_{2k+1} − x_{2k})²`,
/// which is at most `2^{−(N+1)}`.
pub fn refinement_coupling(x: &SimplexPoint) -> Result<(SimplexPoint, f64)> {
    let len = x.len();
    let cells = len + 1;
    if len < 3 || !cells.is_power_of_two() {
        let expected = cells.next_power_of_two().max(4) - 1;
        return Err(Error::ShapeMismatch { expected, got: len });
    }
    let c = x.coords();
    let coarse = SimplexPoint::new(c.iter().skip(1).step_by(2).copied().collect())?;
    // With x₀ = 0, the odd coordinates are c[2k] and their left neighbours c[2k − 1].
    let sum: f64 = (0..cells / 2)
        .map(|k| {
            let left = if k == 0 { 0.0 } else { c[2 * k - 1] };
            let d = c[2 * k] - left;
            d * d
        })
        .sum();
    Ok((coarse, sum / cells as f64))
}

/// A Monte-Carlo frequency with its binomial standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub draws: u64,
}

impl McEstimate {
    pub fn from_count(hits: u64, draws: u64) -> Self {
        let p = hits as f64 / draws as f64;
        Self {
            estimate: p,
            stderr: (p * (1.0 - p) / draws as f64).sqrt(),
            draws,
        }
    }
}

fn marginal_index(spec: &DirichletSpec, s: f64) -> Result<usize> {
    spec.partition()
        .position_of(s)
        .ok_or(Error::PartitionMismatch(s))
}

/// Frequency of `g(s) > level` over `n` marginal draws. `s` must be a
/// partition point so that `g(s)` is one of the sampled coordinates.
pub fn mc_set_probability(
    s: f64,
    level: f64,
    spec: &DirichletSpec,
    n: u64,
    rng: &mut RngState,
) -> Result<McEstimate> {
    let idx = marginal_index(spec, s)?;
    if n == 0 {
        return Err(Error::DomainError("need at least one draw".into()));
    }
    let sampler = MarginalSampler::new(spec);
    let hits = (0..n)
        .filter(|_| sampler.sample(rng.rng()).coords()[idx] > level)
        .count() as u64;
    Ok(McEstimate::from_count(hits, n))
}

/// Draws per stream in the parallel estimators.
pub const CHUNK_DRAWS: u64 = 1 << 16;

/// Counts `g(s) > level` for each level over `n` draws, split into chunks of
/// [`CHUNK_DRAWS`]. Chunk `k` uses stream `base_stream + k` of `seed`, so the
/// result does not depend on `jobs`.
pub fn count_exceedances(
    spec: &DirichletSpec,
    s: f64,
    levels: &[f64],
    n: u64,
    seed: u64,
    base_stream: u64,
    jobs: usize,
) -> Result<Vec<u64>> {
    let idx = marginal_index(spec, s)?;
    if n == 0 {
        return Err(Error::DomainError("need at least one draw".into()));
    }
    let sampler = MarginalSampler::new(spec);
    let chunks = n.div_ceil(CHUNK_DRAWS);
    let work = |k: u64| {
        let mut rng = RngState::new(seed, base_stream + k);
        let draws = CHUNK_DRAWS.min(n - k * CHUNK_DRAWS);
        let mut hits = vec![0u64; levels.len()];
        for _ in 0..draws {
            let g = sampler.sample(rng.rng()).coords()[idx];
            for (h, &level) in hits.iter_mut().zip(levels) {
                if g > level {
                    *h += 1;
                }
            }
        }
        hits
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::DomainError(format!("thread pool: {e}")))?;
    let per_chunk: Vec<Vec<u64>> = pool.install(|| (0..chunks).into_par_iter().map(work).collect());
    Ok(per_chunk
        .into_iter()
        .fold(vec![0; levels.len()], |mut acc, h| {
            acc.iter_mut().zip(h).for_each(|(a, b)| *a += b);
            acc
        }))
}

/// Parallel form of [`mc_set_probability`] over disjoint streams.
pub fn mc_set_probability_parallel(
    s: f64,
    level: f64,
    spec: &DirichletSpec,
    n: u64,
    seed: u64,
    jobs: usize,
) -> Result<McEstimate> {
    let hits = count_exceedances(spec, s, &[level], n, seed, 0, jobs)?;
    Ok(McEstimate::from_count(hits[0], n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_stream() {
        let spec = DirichletSpec::new(1.0, Partition::standard(3).unwrap()).unwrap();
        let a = sample_marginal(&spec, &mut RngState::new(42, 0));
        let b = sample_marginal(&spec, &mut RngState::new(42, 0));
        let c = sample_marginal(&spec, &mut RngState::new(42, 1));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn tiny_shapes_stay_in_the_open_simplex() {
        let spec = DirichletSpec::new(0.01, Partition::standard(8).unwrap()).unwrap();
        let mut rng = RngState::new(3, 0);
        for _ in 0..50 {
            let x = sample_marginal(&spec, &mut rng);
            assert_eq!(x.len(), 255);
            assert!(SimplexPoint::new(x.coords().to_vec()).is_ok());
        }
    }

    #[test]
    fn rejects_bad_beta() {
        let p = Partition::standard(1).unwrap();
        assert!(DirichletSpec::new(0.0, p.clone()).is_err());
        assert!(DirichletSpec::new(f64::NAN, p).is_err());
    }

    #[test]
    fn coupling_shapes() {
        let x = SimplexPoint::new(vec![0.1, 0.2]).unwrap();
        assert_eq!(
            refinement_coupling(&x).unwrap_err(),
            Error::ShapeMismatch {
                expected: 3,
                got: 2
            }
        );
        let x = SimplexPoint::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(
            refinement_coupling(&x).unwrap_err(),
            Error::ShapeMismatch {
                expected: 7,
                got: 4
            }
        );
        let x = SimplexPoint::new(vec![0.1]).unwrap();
        assert!(refinement_coupling(&x).is_err());
    }

    #[test]
    fn partition_mismatch() {
        let spec = DirichletSpec::new(1.0, Partition::new(vec![0.5]).unwrap()).unwrap();
        let err = mc_set_probability(1.0 / 3.0, 0.5, &spec, 10, &mut RngState::new(0, 0));
        assert_eq!(err, Err(Error::PartitionMismatch(1.0 / 3.0)));
    }

    #[test]
    fn level_zero_always_exceeded() {
        let spec = DirichletSpec::new(0.5, Partition::new(vec![0.5]).unwrap()).unwrap();
        let est = mc_set_probability(0.5, 0.0, &spec, 1000, &mut RngState::new(0, 0)).unwrap();
        assert_eq!(est.estimate, 1.0);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn parallel_result_ignores_job_count() {
        let spec = DirichletSpec::new(1.0, Partition::new(vec![0.3]).unwrap()).unwrap();
        let one = count_exceedances(&spec, 0.3, &[0.2, 0.5], 200_000, 9, 0, 1).unwrap();
        let four = count_exceedances(&spec, 0.3, &[0.2, 0.5], 200_000, 9, 0, 4).unwrap();
        assert_eq!(one, four);
        assert!(one[0] >= one[1]);
    }
}
