//! Property suites: algebraic identities checked against the quadrature
//! oracle, structural invariants under random inputs, and the statistical
//! behavior of the generator family.

use igci::counting::{count_monotone, likelihood_ratio, CountModel};
use igci::inference::{
    igci_slope_score, infer_direction, Direction, Method, OrderingMode, Reference, TIE_EPSILON,
};
use igci::oracle::{integrate_midpoint, MIDPOINT_NODES};
use igci::synth::{random_density, random_diffeomorphism, sample_pair, GeneratorConfig};
use igci::typicality::log_jacobian_score;
use igci::{
    kl_divergence, log_slope_covariance, normalize, Axis, GridDensity, MonotoneMap, SamplePair,
};
use num_bigint::BigUint;
use proptest::prelude::*;
use rayon::prelude::*;

fn density_from_gaps(weights: &[f64]) -> GridDensity {
    GridDensity::from_weights(weights, 0.0, 1.0).unwrap()
}

/// Strategy: strictly increasing interior knots from positive gaps.
fn monotone_knots(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-3..1.0f64, len).prop_map(|gaps| {
        let total: f64 = gaps.iter().sum();
        let mut acc = 0.0;
        let mut knots = vec![0.0];
        for g in &gaps {
            acc += g;
            knots.push(acc / total);
        }
        let last = knots.len() - 1;
        knots[last] = 1.0;
        knots
    })
}

proptest! {
    #[test]
    fn kl_is_nonnegative_and_zero_only_on_equality(
        wp in prop::collection::vec(0.05..5.0f64, 16),
        wq in prop::collection::vec(0.05..5.0f64, 16),
    ) {
        let p = density_from_gaps(&wp);
        let q = density_from_gaps(&wq);
        let d = kl_divergence(&p, &q).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        let linf = p
            .masses()
            .iter()
            .zip(q.masses())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if d == 0.0 {
            prop_assert!(linf < 1e-9);
        }
    }

    #[test]
    fn normalize_is_idempotent_and_order_preserving(
        xs in prop::collection::vec(-1e3..1e3f64, 8),
        ys in prop::collection::vec(-1e3..1e3f64, 8),
    ) {
        let Ok(s) = SamplePair::new(xs, ys) else { return Ok(()) };
        let Ok(n1) = normalize(&s) else { return Ok(()) };
        let n2 = normalize(&n1).unwrap();
        prop_assert_eq!(&n1, &n2);
        for w in n1.xs().windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        prop_assert_eq!(n1.xs()[0], 0.0);
        prop_assert_eq!(*n1.xs().last().unwrap(), 1.0);
    }

    #[test]
    fn slope_scores_are_antisymmetric_on_monotone_data(
        knots_x in monotone_knots(12),
        knots_y in monotone_knots(12),
    ) {
        let s = SamplePair::new(knots_x, knots_y).unwrap();
        let v = infer_direction(&s, Method::Slope, OrderingMode::Deterministic).unwrap();
        prop_assert!((v.score_xy + v.score_yx).abs() < 1e-10);
        let sx = igci_slope_score(&s, Axis::X).unwrap();
        let sy = igci_slope_score(&s, Axis::Y).unwrap();
        prop_assert!((sx + sy).abs() < 1e-10);
    }

    #[test]
    fn monotone_map_inverse_round_trips(
        knots_x in monotone_knots(9),
        knots_y in monotone_knots(9),
        t in 0.0..1.0f64,
    ) {
        let f = MonotoneMap::new(knots_x, knots_y).unwrap();
        prop_assert!((f.eval_inverse(f.eval(t)) - t).abs() < 1e-10);
        prop_assert!((f.inverse().eval(f.eval(t)) - t).abs() < 1e-10);
    }

    #[test]
    fn verdict_is_affine_invariant(
        scale_x in 0.01..100.0f64,
        shift_x in -50.0..50.0f64,
        scale_y in 0.01..100.0f64,
        shift_y in -50.0..50.0f64,
    ) {
        let cfg = GeneratorConfig::with_seed(7);
        let p = random_density(&cfg).unwrap();
        let f = random_diffeomorphism(&cfg).unwrap();
        let s = sample_pair(&p, &f, 200, 0.0, 7).unwrap();
        let base = infer_direction(&s, Method::Slope, OrderingMode::Deterministic).unwrap();
        let xs: Vec<f64> = s.xs().iter().map(|x| scale_x * x + shift_x).collect();
        let ys: Vec<f64> = s.ys().iter().map(|y| scale_y * y + shift_y).collect();
        let moved = infer_direction(
            &SamplePair::new(xs, ys).unwrap(),
            Method::Slope,
            OrderingMode::Deterministic,
        )
        .unwrap();
        prop_assert_eq!(base.direction, moved.direction);
        prop_assert!((base.score_xy - moved.score_xy).abs() < 1e-9);
        prop_assert!((base.confidence - moved.confidence).abs() < 1e-9);
    }
}

/// D(p || image of uniform under f^{-1}) decomposes as
/// D(p || u) + D(u || back-image) - Delta, with Delta the log-slope
/// covariance; every term is evaluated by the midpoint quadrature oracle.
#[test]
fn relative_entropy_decomposition_matches_quadrature() {
    for seed in 0..20u64 {
        let cfg = GeneratorConfig::with_seed(100 + seed);
        let p = random_density(&cfg).unwrap();
        let f = random_diffeomorphism(&cfg).unwrap();
        // Densities in closed form: p from bins, back-image density f'(x).
        let d_p_back = integrate_midpoint(
            |x| p.density_at(x) * (p.density_at(x) / f.slope_at(x)).ln(),
            0.0,
            1.0,
            MIDPOINT_NODES,
        );
        let d_p_u = integrate_midpoint(
            |x| p.density_at(x) * p.density_at(x).ln(),
            0.0,
            1.0,
            MIDPOINT_NODES,
        );
        let d_u_back = integrate_midpoint(|x| -f.slope_at(x).ln(), 0.0, 1.0, MIDPOINT_NODES);
        let delta = log_slope_covariance(&p, &f).unwrap();
        let lhs = d_p_back;
        let rhs = d_p_u + d_u_back - delta;
        assert!(
            (lhs - rhs).abs() < 1e-6,
            "seed {seed}: {lhs} vs {rhs} (delta {delta})"
        );
    }
}

/// Population-level score: the exact integral of ln f' is strictly negative
/// for every non-identity map, zero only for the identity.
#[test]
fn population_score_is_negative_for_non_identity_maps() {
    assert_eq!(MonotoneMap::identity().log_slope_integral(), 0.0);
    for seed in 0..100u64 {
        let cfg = GeneratorConfig::with_seed(200 + seed);
        let f = random_diffeomorphism(&cfg).unwrap();
        let exact = f.log_slope_integral();
        assert!(exact < 0.0, "seed {seed}: integral {exact}");
        // Cross-check the exact segment sum against the quadrature oracle.
        if seed < 5 {
            let quad = integrate_midpoint(|x| f.slope_at(x).ln(), 0.0, 1.0, MIDPOINT_NODES);
            assert!((exact - quad).abs() < 1e-6);
        }
    }
}

/// Relative entropy to the uniform reference is conserved by pushforward,
/// up to grid re-binning.
#[test]
fn conservation_under_bijections_at_grid_resolution() {
    let worst = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let cfg = GeneratorConfig {
                bins: 1000,
                ..GeneratorConfig::with_seed(300 + seed)
            };
            let p = random_density(&cfg).unwrap();
            let f = random_diffeomorphism(&cfg).unwrap();
            igci::learning::conservation_gap(&p, &f).unwrap()
        })
        .reduce(|| 0.0f64, f64::max);
    assert!(worst < 5e-3, "worst conservation gap {worst}");
}

/// Empirical slope score converges to the population integral; at n = 10^4
/// the gap stays below 0.02 on smooth cases.
#[test]
fn slope_score_converges_to_the_population_integral() {
    let worst = (0..10u64)
        .into_par_iter()
        .map(|seed| {
            let cfg = GeneratorConfig {
                map_roughness: 0.2,
                density_roughness: 0.2,
                ..GeneratorConfig::with_seed(400 + seed)
            };
            let p = random_density(&cfg).unwrap();
            let f = random_diffeomorphism(&cfg).unwrap();
            let s = sample_pair(&p, &f, 10_000, 0.0, cfg.seed).unwrap();
            let v = infer_direction(&s, Method::Slope, OrderingMode::Deterministic).unwrap();
            let population = f.log_slope_integral() + log_slope_covariance(&p, &f).unwrap();
            (v.score_xy - population).abs()
        })
        .reduce(|| 0.0f64, f64::max);
    assert!(worst < 0.02, "worst convergence gap {worst}");
}

/// The slope and Gaussian-reference entropy methods point the same way on
/// the synthetic benchmark.
#[test]
fn slope_and_entropy_methods_agree_in_sign() {
    let agreements = (0..200u64)
        .into_par_iter()
        .filter(|&t| {
            let cfg = GeneratorConfig::with_seed(500 + t);
            let p = random_density(&cfg).unwrap();
            let f = random_diffeomorphism(&cfg).unwrap();
            let s = sample_pair(&p, &f, 1000, 0.0, cfg.seed).unwrap();
            let slope = infer_direction(&s, Method::Slope, OrderingMode::Deterministic).unwrap();
            let entropy = infer_direction(
                &s,
                Method::Entropy(Reference::Gaussian),
                OrderingMode::Deterministic,
            )
            .unwrap();
            slope.direction == entropy.direction
        })
        .count();
    let rate = agreements as f64 / 200.0;
    assert!(rate >= 0.95, "sign agreement rate {rate}");
}

/// Spec'd pairing: x uniform, y = x^3 must be called X -> Y by both methods
/// on essentially every seed.
#[test]
fn cubic_mechanism_is_recognized_by_both_methods() {
    let agree = (0..100u64)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = igci::rng::rng_from_seed(600 + t);
            let xs: Vec<f64> = (0..10_000).map(|_| igci::rng::next_u01(&mut rng)).collect();
            let ys: Vec<f64> = xs.iter().map(|x| x.powi(3)).collect();
            let s = SamplePair::new(xs, ys).unwrap();
            let slope = infer_direction(&s, Method::Slope, OrderingMode::Deterministic).unwrap();
            let entropy = infer_direction(
                &s,
                Method::Entropy(Reference::Gaussian),
                OrderingMode::Deterministic,
            )
            .unwrap();
            slope.direction == Direction::XCausesY && entropy.direction == Direction::XCausesY
        })
        .count();
    assert!(agree >= 99, "agreement {agree}/100");
}

/// Independence made quantitative: over many independent (p, f) draws the
/// log-slope covariance is centered at zero (mean within 3 standard errors,
/// sign counts consistent with a fair coin at the 1% level).
#[test]
fn generator_densities_and_maps_are_uncorrelated() {
    let deltas: Vec<f64> = (0..500u64)
        .into_par_iter()
        .map(|t| {
            let cfg = GeneratorConfig::with_seed(700 + t);
            let p = random_density(&cfg).unwrap();
            let f = random_diffeomorphism(&cfg).unwrap();
            log_slope_covariance(&p, &f).unwrap()
        })
        .collect();
    let n = deltas.len() as f64;
    let mean = deltas.iter().sum::<f64>() / n;
    let var = deltas.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n;
    let stderr = (var / n).sqrt();
    assert!(
        mean.abs() <= 3.0 * stderr,
        "covariance mean {mean} exceeds 3 x {stderr}"
    );
    let positives = deltas.iter().filter(|&&d| d > 0.0).count() as f64;
    // Two-sided sign test at the 1% level: |k - n/2| <= 2.576 sqrt(n/4).
    assert!(
        (positives - n / 2.0).abs() <= 2.576 * (n / 4.0).sqrt(),
        "sign counts {positives}/{n}"
    );
}

/// Default-roughness maps are non-identity: the exact integral of ln f'
/// sits below -1e-4 on at least 99% of seeds.
#[test]
fn generated_maps_are_non_identity() {
    let below = (0..200u64)
        .filter(|&t| {
            let cfg = GeneratorConfig::with_seed(800 + t);
            random_diffeomorphism(&cfg).unwrap().log_slope_integral() < -1e-4
        })
        .count();
    assert!(below >= 198, "only {below}/200 seeds below -1e-4");
}

/// The empirical Y -> X score and the log-Jacobian of the y-tuple under
/// f^{-1} are the same quantity up to sampling: correlation above 0.99
/// across draws.
#[test]
fn reverse_score_tracks_the_inverse_log_jacobian() {
    let pairs: Vec<(f64, f64)> = (0..100u64)
        .into_par_iter()
        .map(|t| {
            let cfg = GeneratorConfig::with_seed(900 + t);
            let p = random_density(&cfg).unwrap();
            let f = random_diffeomorphism(&cfg).unwrap();
            let s = sample_pair(&p, &f, 1000, 0.0, cfg.seed).unwrap();
            let v = infer_direction(&s, Method::Slope, OrderingMode::Deterministic).unwrap();
            let flipped = SamplePair::new(s.ys().to_vec(), s.xs().to_vec()).unwrap();
            let jacobian = log_jacobian_score(&flipped, &f.inverse());
            ((s.n() - 1) as f64 * v.score_yx, jacobian)
        })
        .collect();
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let cov = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / n;
    let vx = pairs.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>() / n;
    let vy = pairs.iter().map(|p| (p.1 - my).powi(2)).sum::<f64>() / n;
    let corr = cov / (vx * vy).sqrt();
    assert!(corr > 0.99, "correlation {corr}");
}

/// Eq-10 ratio law, exact over the full a, b <= 50 range.
#[test]
fn count_ratio_law_is_exact_up_to_50() {
    for a in 1..=50u64 {
        for b in 1..=50u64 {
            let lhs = count_monotone(a, b).unwrap() * BigUint::from(b);
            let rhs = count_monotone(b, a).unwrap() * BigUint::from(a);
            assert_eq!(lhs, rhs, "ratio law failed at ({a}, {b})");
        }
    }
}

/// Refining the grid leaves the continuum score untouched and makes the
/// full log-likelihood ratio converge (successive differences shrink).
#[test]
fn grid_refinement_converges() {
    let base = CountModel::new(12, 9, vec![(0, 0), (3, 2), (7, 6), (12, 9)]).unwrap();
    let mut previous: Option<f64> = None;
    let mut diffs = Vec::new();
    for scale in [1u64, 2, 4, 8, 16] {
        let points: Vec<(u64, u64)> = base
            .points()
            .iter()
            .map(|&(x, y)| (x * scale, y * scale))
            .collect();
        let m = CountModel::new(12 * scale, 9 * scale, points).unwrap();
        assert_eq!(
            igci::counting::continuum_score(&m),
            igci::counting::continuum_score(&base)
        );
        let lr = likelihood_ratio(&m).log_ratio;
        if let Some(prev) = previous {
            diffs.push((lr - prev).abs());
        }
        previous = Some(lr);
    }
    for w in diffs.windows(2) {
        assert!(w[1] < w[0], "log-ratio differences not shrinking: {diffs:?}");
    }
}

/// Identity data sits inside the undecided band for every method.
#[test]
fn identity_relation_is_undecided_for_all_methods() {
    let xs: Vec<f64> = (0..200).map(|i| (i as f64 / 199.0).powf(1.3)).collect();
    let s = SamplePair::new(xs.clone(), xs).unwrap();
    for method in [
        Method::Slope,
        Method::Entropy(Reference::Uniform),
        Method::Entropy(Reference::Gaussian),
    ] {
        let v = infer_direction(&s, method, OrderingMode::Deterministic).unwrap();
        assert_eq!(v.direction, Direction::Undecided, "method {method}");
        assert!(v.confidence <= TIE_EPSILON);
    }
}
