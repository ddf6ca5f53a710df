mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use wot1d::entropic::{
    beta_integral, count_exceedances, mc_set_probability, prob_as, refinement_coupling,
    sample_marginal, DirichletSpec, RngState,
};
use wot1d::entropy::{entropy_from_quantile, entropy_of_measure, ExtendedReal};
use wot1d::gh::{certify_epsilon_isometry, embed, finite_metric, snapshot, Partition};
use wot1d::quantile::{l2_distance, pushforward_density};
use wot1d::wasserstein::{geodesic_point, optimal_plan, wasserstein2, wasserstein2_squared};
use wot1d::{psi, psi_inverse};

fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn psi_round_trip(seed in any::<u64>()) {
        let mu = random_measure(&mut rng_from(seed));
        let back = psi(&psi_inverse(&mu));
        prop_assert!(back.cdf_distance(&mu) < 1e-12, "{mu:?} vs {back:?}");
    }

    #[test]
    fn quantile_round_trip(seed in any::<u64>()) {
        let f = random_increasing_linear(&mut rng_from(seed), 6);
        let g = psi_inverse(&psi(&f));
        prop_assert!(l2_distance(&f, &g) < 1e-12);
    }

    #[test]
    fn metric_axioms(seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        let (a, b, c) = (random_measure(&mut rng), random_measure(&mut rng), random_measure(&mut rng));
        prop_assert!(wasserstein2(&a, &a) < 1e-12);
        prop_assert!((wasserstein2(&a, &b) - wasserstein2(&b, &a)).abs() < 1e-12);
        prop_assert!(wasserstein2(&a, &c) <= wasserstein2(&a, &b) + wasserstein2(&b, &c) + 1e-12);
        prop_assert!(wasserstein2(&a, &b) <= 1.0 + 1e-12);
    }

    #[test]
    fn geodesics_have_constant_speed(seed in any::<u64>(), s in 0.0..=1.0f64, t in 0.0..=1.0f64) {
        let mut rng = rng_from(seed);
        let (a, b) = (random_measure(&mut rng), random_measure(&mut rng));
        let d = wasserstein2(&a, &b);
        let gs = geodesic_point(&a, &b, s).unwrap();
        let gt = geodesic_point(&a, &b, t).unwrap();
        prop_assert!((wasserstein2(&gs, &gt) - (s - t).abs() * d).abs() < 1e-9);
    }

    #[test]
    fn plan_cost_is_squared_distance(seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        let (a, b) = (random_measure(&mut rng), random_measure(&mut rng));
        let plan = optimal_plan(&a, &b);
        prop_assert!((plan.cost() - wasserstein2_squared(&a, &b)).abs() < 1e-12);
        if a.is_atomic() && b.is_atomic() {
            let discrete = plan.to_discrete().unwrap();
            prop_assert!((discrete.cost() - plan.cost()).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_routes_agree(seed in any::<u64>()) {
        let f = random_increasing_linear(&mut rng_from(seed), 8);
        let q = entropy_from_quantile(&f).finite().unwrap();
        let m = entropy_of_measure(&psi(&f)).finite().unwrap();
        prop_assert!((q - m).abs() < 1e-9);
    }

    #[test]
    fn atoms_have_infinite_entropy(seed in any::<u64>()) {
        let mu = random_atomic(&mut rng_from(seed), 5);
        prop_assert_eq!(entropy_of_measure(&mu), ExtendedReal::PosInfinity);
        prop_assert_eq!(entropy_from_quantile(&psi_inverse(&mu)), ExtendedReal::PosInfinity);
    }

    #[test]
    fn pushforward_conserves_mass(seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        let f = random_increasing_linear(&mut rng, 6);
        let rho = random_density_part(&mut rng, 5, 0.2, 1.0);
        let image = pushforward_density(&f, &rho).unwrap();
        prop_assert!((image.total_mass() - rho.total_mass()).abs() < 1e-10);
    }

    #[test]
    fn embedding_is_isometric(level in 1u32..=7, seed in any::<u64>()) {
        let p = Partition::standard(level).unwrap();
        let spec = DirichletSpec::new(1.0, p.clone()).unwrap();
        let mut rng = RngState::new(seed, 0);
        let (x, y) = (sample_marginal(&spec, &mut rng), sample_marginal(&spec, &mut rng));
        let lhs = l2_distance(&embed(&p, &x).unwrap(), &embed(&p, &y).unwrap());
        prop_assert!((lhs - finite_metric(&p, &x, &y).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn snapshot_approximation_within_mesh(level in 1u32..=8, seed in any::<u64>()) {
        let p = Partition::standard(level).unwrap();
        let g = psi_inverse(&random_measure(&mut rng_from(seed)));
        let err = l2_distance(&g, &embed(&p, &snapshot(&p, &g)).unwrap());
        prop_assert!(err * err <= p.mesh() + 1e-12);
        let report = certify_epsilon_isometry(&p, &[g]).unwrap();
        prop_assert!(report.passed());
    }

    #[test]
    fn coupling_bound_is_exact(level in 1u32..=6, seed in any::<u64>(), beta in 0.1..5.0f64) {
        let fine = Partition::standard(level + 1).unwrap();
        let coarse = Partition::standard(level).unwrap();
        let x = sample_marginal(&DirichletSpec::new(beta, fine.clone()).unwrap(), &mut RngState::new(seed, 0));
        let (y, bound) = refinement_coupling(&x).unwrap();
        let direct = l2_distance(&embed(&coarse, &y).unwrap(), &embed(&fine, &x).unwrap());
        prop_assert!((direct * direct - bound).abs() < 1e-14);
        prop_assert!(bound <= 0.5f64.powi(level as i32 + 1) + 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn beta_integral_smooth_exponents(alpha in 1.0..=10.0f64, beta in 1.0..=10.0f64, a in -2.0..2.0f64, len in 0.1..3.0f64) {
        let exact = beta_integral(a, a + len, alpha, beta).unwrap();
        let quad = beta_quadrature(a, a + len, alpha, beta, 1e-15);
        prop_assert!(((exact - quad) / exact).abs() < 1e-8, "{exact} vs {quad}");
    }

    #[test]
    fn beta_integral_singular_exponents(alpha in 0.01..1.0f64, beta in 0.01..1.0f64, a in -2.0..2.0f64, len in 0.1..3.0f64) {
        let exact = beta_integral(a, a + len, alpha, beta).unwrap();
        let quad = beta_quadrature(a, a + len, alpha, beta, 1e-13);
        prop_assert!(((exact - quad) / exact).abs() < 1e-6, "{exact} vs {quad}");
    }
}

/// Integrating out a new partition point must leave the law of `g(s)`
/// unchanged.
#[test]
fn marginal_consistency_under_refinement() {
    use rand::Rng;
    let mut rng = rng_from(7);
    let n = 40_000;
    for case in 0..20 {
        let s: f64 = rng.random_range(0.1..0.9);
        let level = rng.random_range(0.05..0.95);
        let beta = rng.random_range(0.3..4.0);
        let extra: f64 = rng.random_range(0.02..0.98);
        if (extra - s).abs() < 1e-3 {
            continue;
        }
        let coarse = DirichletSpec::new(beta, Partition::new(vec![s]).unwrap()).unwrap();
        let mut pts = vec![s, extra];
        pts.sort_by(f64::total_cmp);
        let fine = DirichletSpec::new(beta, Partition::new(pts).unwrap()).unwrap();
        let a = mc_set_probability(s, level, &coarse, n, &mut RngState::new(case, 0)).unwrap();
        let b = mc_set_probability(s, level, &fine, n, &mut RngState::new(case, 1)).unwrap();
        let se = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
        assert!(
            (a.estimate - b.estimate).abs() <= 3.0 * se.max(1e-9),
            "case {case}: {a:?} vs {b:?}"
        );
    }
}

#[test]
fn exact_probability_matches_monte_carlo() {
    use rand::Rng;
    let mut rng = rng_from(11);
    let n = 20_000;
    let mut agree = 0;
    for run in 0..100 {
        let s = rng.random_range(0.05..0.95);
        let beta = rng.random_range(0.2..5.0);
        let spec = DirichletSpec::new(beta, Partition::new(vec![s]).unwrap()).unwrap();
        let hits = count_exceedances(&spec, s, &[0.5], n, 1000 + run, 0, 2).unwrap()[0];
        let p = hits as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        if (p - prob_as(s, beta).unwrap()).abs() <= 3.0 * se {
            agree += 1;
        }
    }
    assert!(agree >= 99, "{agree}/100 runs within 3 standard errors");
}

proptest! {
    #[test]
    fn entropy_is_nonnegative(seed in any::<u64>()) {
        let mu = random_measure(&mut rng_from(seed));
        prop_assert!(entropy_of_measure(&mu) >= ExtendedReal::Finite(-1e-12));
    }
}

/// Translating a uniform block keeps the entropy constant along the
/// geodesic, so any `K > 0` breaks the convexity inequality.
#[test]
fn zero_is_the_sharp_convexity_constant() {
    use wot1d::entropy::critical_convexity_constant;
    use wot1d::Measure1D;
    let grid: Vec<f64> = (1..10).map(|k| k as f64 / 10.0).collect();
    for a in [0.1, 0.25, 0.4] {
        let left = Measure1D::density(vec![0.0, a, 1.0], vec![1.0 / a, 0.0]).unwrap();
        let right = Measure1D::density(vec![0.0, 1.0 - a, 1.0], vec![0.0, 1.0 / a]).unwrap();
        let k = critical_convexity_constant(&left, &right, &grid, 10.0, 1e-9)
            .unwrap()
            .unwrap();
        assert!(k <= 1e-8, "a = {a}: {k}");
    }

    let uniform = Measure1D::uniform();
    let half = Measure1D::density(vec![0.0, 0.5, 1.0], vec![2.0, 0.0]).unwrap();
    let k = critical_convexity_constant(&uniform, &half, &grid, 100.0, 1e-6).unwrap();
    // Reported only: this pair is strictly more than 0-convex.
    println!("critical K for uniform -> density2-left: {k:?}");
    assert!(k.is_some_and(|k| k > 0.0));
}
