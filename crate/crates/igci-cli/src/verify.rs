//! The `verify` subcommand: runs the oracle-equivalence, tail-bound, and
//! conservation suites and reports pass/fail with measured margins.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use igci::counting::{brute_force_enumerate, count_interpolants, count_monotone};
use igci::learning::{
    conservation_gap, permutation_equivalence_experiment, unsupervised_error, DiscreteFunction,
};
use igci::rng::{next_range, rng_from_seed, substream_seed};
use igci::synth::{random_count_model, random_density, random_diffeomorphism, GeneratorConfig};
use igci::typicality::{inverse_slope_expectation, verify_markov_bound};
use igci::{log_slope_covariance, Axis};
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::report;
use crate::{EXIT_FAILURE, EXIT_OK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Counting,
    Typicality,
    Learning,
    All,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo trials per tail-bound check (minimum 10000).
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// Also write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// One verified invariant: `margin` is the measured quantity, compared
/// against `tolerance` in the direction explained by `detail`.
#[derive(Serialize)]
struct InvariantResult {
    name: String,
    cases: u64,
    passed: bool,
    margin: f64,
    tolerance: f64,
    detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    failing_case: Option<String>,
}

impl InvariantResult {
    fn leq(
        name: &str,
        cases: u64,
        margin: f64,
        tolerance: f64,
        detail: &str,
        failing_case: Option<String>,
    ) -> Self {
        Self {
            name: name.into(),
            cases,
            passed: margin <= tolerance,
            margin,
            tolerance,
            detail: detail.into(),
            failing_case: if margin <= tolerance { None } else { failing_case },
        }
    }
}

#[derive(Serialize)]
struct VerifyPayload {
    suite: String,
    seed: u64,
    trials: u64,
    invariants: Vec<InvariantResult>,
    all_passed: bool,
}

pub fn run(args: &VerifyArgs) -> i32 {
    let mut invariants = Vec::new();
    if matches!(args.suite, SuiteArg::Counting | SuiteArg::All) {
        invariants.extend(counting_suite(args.seed));
    }
    if matches!(args.suite, SuiteArg::Typicality | SuiteArg::All) {
        invariants.extend(typicality_suite(args.seed, args.trials));
    }
    if matches!(args.suite, SuiteArg::Learning | SuiteArg::All) {
        invariants.extend(learning_suite(args.seed));
    }
    let all_passed = invariants.iter().all(|r| r.passed);
    for r in &invariants {
        eprintln!(
            "{}: {} (measured {:.3e}, tolerance {:.3e}, {} cases)",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.margin,
            r.tolerance,
            r.cases
        );
    }
    let suite = format!("{:?}", args.suite).to_lowercase();
    let payload = VerifyPayload {
        suite,
        seed: args.seed,
        trials: args.trials,
        invariants,
        all_passed,
    };
    match report::render("verify", payload).and_then(|text| report::emit(&text, args.out.as_deref()))
    {
        Ok(()) if all_passed => EXIT_OK,
        Ok(()) => EXIT_FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

fn counting_suite(seed: u64) -> Vec<InvariantResult> {
    let stream = substream_seed(seed, 101);
    let mismatch: Option<u64> = (0..500u64)
        .into_par_iter()
        .filter(|&i| {
            let m = random_count_model(stream.wrapping_add(i), 400).unwrap();
            brute_force_enumerate(&m).unwrap() != count_interpolants(&m, Axis::X)
                || brute_force_enumerate(&m.transposed()).unwrap()
                    != count_interpolants(&m, Axis::Y)
        })
        .min();
    let oracle = InvariantResult::leq(
        "counting/oracle_equivalence",
        500,
        mismatch.map_or(0.0, |_| 1.0),
        0.0,
        "interpolant counts equal exhaustive enumeration exactly",
        mismatch.map(|i| format!("model seed {}", stream.wrapping_add(i))),
    );
    let mut ratio_failures = 0u64;
    let mut first_failure = None;
    for a in 1..=50u64 {
        for b in 1..=50u64 {
            let lhs = count_monotone(a, b).unwrap() * BigUint::from(b);
            let rhs = count_monotone(b, a).unwrap() * BigUint::from(a);
            if lhs != rhs {
                ratio_failures += 1;
                first_failure.get_or_insert(format!("(a, b) = ({a}, {b})"));
            }
        }
    }
    let ratio = InvariantResult::leq(
        "counting/ratio_law",
        2500,
        ratio_failures as f64,
        0.0,
        "N(a,b) * b equals N(b,a) * a exactly for all a, b <= 50",
        first_failure,
    );
    vec![oracle, ratio]
}

fn typicality_suite(seed: u64, trials: u64) -> Vec<InvariantResult> {
    let c_grid = [0.25, 0.5, 1.0, 2.0, 3.0];
    let stream = substream_seed(seed, 102);
    let margins: Vec<(u64, f64)> = (0..500u64)
        .into_par_iter()
        .map(|i| {
            let cfg = GeneratorConfig::with_seed(stream.wrapping_add(i));
            let f = random_diffeomorphism(&cfg).unwrap();
            let report = verify_markov_bound(&f, &c_grid, trials, cfg.seed).unwrap();
            (i, report.worst_margin())
        })
        .collect();
    let (worst_map, worst_margin) = margins
        .iter()
        .fold((0, f64::NEG_INFINITY), |acc, &(i, m)| {
            if m > acc.1 {
                (i, m)
            } else {
                acc
            }
        });
    let tail = InvariantResult::leq(
        "typicality/markov_tail_bound",
        500 * c_grid.len() as u64,
        worst_margin,
        0.0,
        "empirical tail mass minus (bound + 3-sigma slack), worst over maps and thresholds",
        Some(format!("map seed {}", stream.wrapping_add(worst_map))),
    );

    let stats: Vec<(f64, f64)> = (0..500u64)
        .into_par_iter()
        .map(|i| {
            let cfg = GeneratorConfig::with_seed(stream.wrapping_add(i));
            let f = random_diffeomorphism(&cfg).unwrap();
            inverse_slope_expectation(&f, trials, cfg.seed ^ 0x5EED)
        })
        .collect();
    let pooled_mean = stats.iter().map(|s| s.0).sum::<f64>() / stats.len() as f64;
    let pooled_se = stats.iter().map(|s| s.1 * s.1).sum::<f64>().sqrt() / stats.len() as f64;
    let expectation = InvariantResult::leq(
        "typicality/unit_expectation",
        500,
        (pooled_mean - 1.0).abs(),
        3.0 * pooled_se,
        "pooled mean of 1/f' under the image measure, distance from 1 vs 3 pooled standard errors",
        None,
    );
    vec![tail, expectation]
}

fn learning_suite(seed: u64) -> Vec<InvariantResult> {
    let stream = substream_seed(seed, 103);
    let gaps: Vec<(u64, f64)> = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let cfg = GeneratorConfig {
                bins: 1000,
                ..GeneratorConfig::with_seed(stream.wrapping_add(i))
            };
            let p = random_density(&cfg).unwrap();
            let f = random_diffeomorphism(&cfg).unwrap();
            (i, conservation_gap(&p, &f).unwrap())
        })
        .collect();
    let (worst_case, worst_gap) = gaps.iter().fold((0, 0.0), |acc, &(i, g)| {
        if g > acc.1 {
            (i, g)
        } else {
            acc
        }
    });
    let conservation = InvariantResult::leq(
        "learning/entropy_conservation",
        200,
        worst_gap,
        5e-3,
        "worst |D(p_Y || image of uniform) - D(p_X || uniform)| at M = 1000",
        Some(format!("pair seed {}", stream.wrapping_add(worst_case))),
    );

    // Near-orthogonal pairs are rare; scan a wide seed range for them.
    let candidates: Vec<u64> = (0..20_000u64)
        .into_par_iter()
        .filter(|&i| {
            let cfg = GeneratorConfig {
                bins: 1000,
                ..GeneratorConfig::with_seed(stream.wrapping_add(1_000_000 + i))
            };
            let p = random_density(&cfg).unwrap();
            let f = random_diffeomorphism(&cfg).unwrap();
            log_slope_covariance(&p, &f).unwrap().abs() < 1e-3
        })
        .collect();
    let violation: Option<u64> = candidates
        .par_iter()
        .filter(|&&i| {
            let cfg = GeneratorConfig {
                bins: 1000,
                ..GeneratorConfig::with_seed(stream.wrapping_add(1_000_000 + i))
            };
            let p = random_density(&cfg).unwrap();
            let f = random_diffeomorphism(&cfg).unwrap();
            let (anticausal, causal) = unsupervised_error(&p, &f).unwrap();
            anticausal > causal + 1e-2
        })
        .min()
        .copied();
    let inequality = InvariantResult::leq(
        "learning/anticausal_inequality",
        candidates.len() as u64,
        violation.map_or(0.0, |_| 1.0),
        0.0,
        "violations of anticausal_error <= causal_error + 1e-2 among near-orthogonal pairs",
        violation.map(|i| format!("pair seed {}", stream.wrapping_add(1_000_000 + i))),
    );

    let f = DiscreteFunction::random_surjection(200, 20, stream.wrapping_add(7)).unwrap();
    let mut rng = rng_from_seed(stream.wrapping_add(8));
    let n = 10_000u64;
    let mut freq = vec![0.0; f.ell()];
    for _ in 0..n {
        let x = 1 + next_range(&mut rng, f.k());
        freq[f.apply(x).unwrap() as usize - 1] += 1.0 / n as f64;
    }
    let fraction =
        permutation_equivalence_experiment(&f, &freq, 1000, stream.wrapping_add(9)).unwrap();
    let permutation = InvariantResult::leq(
        "learning/permutation_win_fraction",
        1000,
        -fraction,
        -0.95,
        "negated fraction of permutations beaten by the true function (target >= 0.95)",
        None,
    );
    vec![conservation, inequality, permutation]
}
