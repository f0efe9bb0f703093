//! The `benchmark` subcommand: decision accuracy of every method/ordering
//! combination on synthetic draws, per noise level, plus the rate at which
//! the anticausal-error inequality holds.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;
use igci::inference::{infer_direction, Direction, Method, OrderingMode, Reference};
use igci::learning::unsupervised_error;
use igci::rng::{substream_seed, trial_seed, STREAM_TRIAL};
use igci::synth::{random_density, random_diffeomorphism, sample_pair, GeneratorConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::report;
use crate::{EXIT_FAILURE, EXIT_OK, EXIT_USAGE};

const COMBOS: [(Method, OrderingMode); 4] = [
    (Method::Slope, OrderingMode::Deterministic),
    (Method::Slope, OrderingMode::Noisy),
    (Method::Entropy(Reference::Gaussian), OrderingMode::Deterministic),
    (Method::Entropy(Reference::Gaussian), OrderingMode::Noisy),
];

/// Slack used when judging the anticausal <= causal inequality; covers the
/// grid re-binning error of both relative entropies.
const EQ_INEQUALITY_SLACK: f64 = 1e-2;

#[derive(Args)]
pub struct BenchmarkArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub trials: u64,
    /// Observations per trial.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Comma-separated noise levels.
    #[arg(long, default_value = "0", value_delimiter = ',')]
    pub noise: Vec<f64>,
    #[arg(long, default_value_t = 512)]
    pub bins: usize,
    #[arg(long, default_value_t = 1.0)]
    pub map_roughness: f64,
    #[arg(long, default_value_t = 1.0)]
    pub density_roughness: f64,
    /// Also write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Default)]
struct ComboOutcome {
    correct: bool,
    errored: bool,
    score_xy: f64,
    score_yx: f64,
}

struct TrialResult {
    inequality_ok: bool,
    per_noise: Vec<[ComboOutcome; 4]>,
}

#[derive(Serialize)]
struct ComboSummary {
    accuracy: f64,
    errors: u64,
    mean_score_xy: f64,
    mean_score_yx: f64,
}

#[derive(Serialize)]
struct NoiseSummary {
    noise: f64,
    combos: BTreeMap<String, ComboSummary>,
}

#[derive(Serialize)]
struct BenchmarkPayload {
    seed: u64,
    trials: u64,
    n: usize,
    bins: usize,
    map_roughness: f64,
    density_roughness: f64,
    noise_levels: Vec<NoiseSummary>,
    anticausal_inequality_rate: f64,
}

pub fn run(args: &BenchmarkArgs) -> i32 {
    if args.trials < 1 {
        eprintln!("error: --trials must be at least 1");
        return EXIT_USAGE;
    }
    if args.noise.is_empty() || args.noise.iter().any(|&v| !(v.is_finite() && v >= 0.0)) {
        eprintln!("error: --noise levels must be non-negative");
        return EXIT_USAGE;
    }
    let stream = substream_seed(args.seed, STREAM_TRIAL);
    let results: Vec<TrialResult> = (0..args.trials)
        .into_par_iter()
        .map(|t| run_trial(args, trial_seed(stream, t)))
        .collect();

    let trials = args.trials as f64;
    let inequality_rate =
        results.iter().filter(|r| r.inequality_ok).count() as f64 / trials;
    let mut noise_levels = Vec::new();
    for (noise_idx, &noise) in args.noise.iter().enumerate() {
        let mut combos = BTreeMap::new();
        for (combo_idx, &(method, ordering)) in COMBOS.iter().enumerate() {
            let outcomes: Vec<ComboOutcome> = results
                .iter()
                .map(|r| r.per_noise[noise_idx][combo_idx])
                .collect();
            let correct = outcomes.iter().filter(|o| o.correct).count() as f64;
            let errors = outcomes.iter().filter(|o| o.errored).count() as u64;
            let ok: Vec<&ComboOutcome> = outcomes.iter().filter(|o| !o.errored).collect();
            let denom = ok.len().max(1) as f64;
            combos.insert(
                format!("{method}_{ordering}"),
                ComboSummary {
                    accuracy: correct / trials,
                    errors,
                    mean_score_xy: ok.iter().map(|o| o.score_xy).sum::<f64>() / denom,
                    mean_score_yx: ok.iter().map(|o| o.score_yx).sum::<f64>() / denom,
                },
            );
        }
        noise_levels.push(NoiseSummary { noise, combos });
    }
    let payload = BenchmarkPayload {
        seed: args.seed,
        trials: args.trials,
        n: args.n,
        bins: args.bins,
        map_roughness: args.map_roughness,
        density_roughness: args.density_roughness,
        noise_levels,
        anticausal_inequality_rate: inequality_rate,
    };
    match report::render("benchmark", payload)
        .and_then(|text| report::emit(&text, args.out.as_deref()))
    {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

fn run_trial(args: &BenchmarkArgs, seed: u64) -> TrialResult {
    let cfg = GeneratorConfig {
        seed,
        map_roughness: args.map_roughness,
        density_roughness: args.density_roughness,
        bins: args.bins,
        noise_level: 0.0,
    };
    let p = random_density(&cfg).expect("valid generator config");
    let f = random_diffeomorphism(&cfg).expect("valid generator config");
    let (anticausal, causal) = unsupervised_error(&p, &f).expect("unit-interval density");
    let inequality_ok = anticausal <= causal + EQ_INEQUALITY_SLACK;

    let per_noise = args
        .noise
        .iter()
        .enumerate()
        .map(|(noise_idx, &noise)| {
            let sample_seed = trial_seed(seed, noise_idx as u64);
            let sample = sample_pair(&p, &f, args.n, noise, sample_seed)
                .expect("n >= 3 and finite noise");
            let mut outcomes = [ComboOutcome::default(); 4];
            for (combo_idx, &(method, ordering)) in COMBOS.iter().enumerate() {
                outcomes[combo_idx] = match infer_direction(&sample, method, ordering) {
                    Ok(v) => ComboOutcome {
                        correct: v.direction == Direction::XCausesY,
                        errored: false,
                        score_xy: v.score_xy,
                        score_yx: v.score_yx,
                    },
                    Err(_) => ComboOutcome {
                        correct: false,
                        errored: true,
                        score_xy: 0.0,
                        score_yx: 0.0,
                    },
                };
            }
            outcomes
        })
        .collect();
    TrialResult {
        inequality_ok,
        per_noise,
    }
}
