//! Untypical points: log-Jacobian scores and Monte Carlo verification of the
//! Markov tail bound.
//!
//! For a monotone bijection f of [0, 1], the set of points where ln f'(x)
//! exceeds c has Lebesgue measure at most e^{-c}: the reciprocal Jacobian is
//! a non-negative random variable with expectation 1 under the image
//! measure, so Markov's inequality applies. A sample whose summed
//! log-Jacobian is large is therefore untypical for the map, which is the
//! ground for rejecting the corresponding causal hypothesis.

use rayon::prelude::*;

use crate::density::{MonotoneMap, SamplePair};
use crate::error::{Error, Result};
use crate::rng::{next_u01, rng_from_seed, trial_seed};

/// Tail-bound measurements for one map across a grid of thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct TypicalityReport {
    /// Thresholds c > 0, as given.
    pub thresholds: Vec<f64>,
    /// Measured probability of ln f'(x) >= c per threshold.
    pub empirical_mass: Vec<f64>,
    /// exp(-c) per threshold.
    pub bounds: Vec<f64>,
    /// Monte Carlo slack: 3 binomial standard deviations of the bound.
    pub slack: Vec<f64>,
    /// Number of Monte Carlo trials behind each mass.
    pub trials: u64,
    /// Summed log-Jacobian of an observed tuple, when one is under scrutiny.
    pub sample_score: Option<f64>,
}

impl TypicalityReport {
    /// True when every empirical mass respects its bound plus slack.
    pub fn all_within_slack(&self) -> bool {
        self.worst_margin() <= 0.0
    }

    /// Largest excess of empirical mass over bound + slack; <= 0 means pass.
    pub fn worst_margin(&self) -> f64 {
        self.empirical_mass
            .iter()
            .zip(&self.bounds)
            .zip(&self.slack)
            .map(|((&m, &b), &s)| m - b - s)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn with_sample_score(mut self, score: f64) -> Self {
        self.sample_score = Some(score);
        self
    }
}

/// Summed log-Jacobian of the observed x-tuple under f.
///
/// Points sitting exactly on a knot use the right-continuous slope.
pub fn log_jacobian_score(s: &SamplePair, f: &MonotoneMap) -> f64 {
    s.xs().iter().map(|&x| f.slope_at(x).ln()).sum()
}

/// Measure the tail mass of ln f'(x) >= c for uniform x, per threshold, and
/// pair it with the Markov bound e^{-c}.
///
/// Trial t draws its point from a counter-derived seed, so the result is
/// identical for a fixed seed no matter how the trials are scheduled.
pub fn verify_markov_bound(
    f: &MonotoneMap,
    c_grid: &[f64],
    trials: u64,
    seed: u64,
) -> Result<TypicalityReport> {
    if trials < 10_000 {
        return Err(Error::InvalidArgument(format!(
            "need at least 10000 trials for a meaningful tail estimate, got {trials}"
        )));
    }
    for &c in c_grid {
        if c.is_nan() || c <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "thresholds must be positive, got {c}"
            )));
        }
    }
    let counts = (0..trials)
        .into_par_iter()
        .fold(
            || vec![0u64; c_grid.len()],
            |mut acc, t| {
                let u = (trial_seed(seed, t) >> 11) as f64 / (1u64 << 53) as f64;
                let score = f.slope_at(u).ln();
                for (i, &c) in c_grid.iter().enumerate() {
                    if score >= c {
                        acc[i] += 1;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; c_grid.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    let empirical_mass: Vec<f64> = counts.iter().map(|&c| c as f64 / trials as f64).collect();
    let bounds: Vec<f64> = c_grid.iter().map(|&c| (-c).exp()).collect();
    let slack: Vec<f64> = bounds
        .iter()
        .map(|&b| 3.0 * (b / trials as f64).sqrt())
        .collect();
    Ok(TypicalityReport {
        thresholds: c_grid.to_vec(),
        empirical_mass,
        bounds,
        slack,
        trials,
        sample_score: None,
    })
}

/// Monte Carlo estimate of the volume of the n-cube where the component-wise
/// map has summed log-Jacobian >= c, paired with the bound e^{-c}.
pub fn product_map_bound(
    f: &MonotoneMap,
    n: usize,
    c: f64,
    trials: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    if n < 1 {
        return Err(Error::InvalidArgument("need n >= 1 components".into()));
    }
    if c.is_nan() || c <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "threshold must be positive, got {c}"
        )));
    }
    if trials < 1 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_from_seed(trial_seed(seed, t));
            let score: f64 = (0..n).map(|_| f.slope_at(next_u01(&mut rng)).ln()).sum();
            u64::from(score >= c)
        })
        .sum();
    Ok((hits as f64 / trials as f64, (-c).exp()))
}

/// Monte Carlo mean and standard error of 1/f'(x) with x distributed as the
/// image of uniform under f^{-1}; the expectation underlying the tail bound
/// is exactly 1.
pub fn inverse_slope_expectation(f: &MonotoneMap, trials: u64, seed: u64) -> (f64, f64) {
    const CHUNK: u64 = 1 << 14;
    let chunks = trials.div_ceil(CHUNK);
    // Fixed chunk boundaries with an ordered collect keep the float sums
    // independent of the worker count.
    let partials: Vec<(f64, f64, u64)> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * CHUNK;
            let hi = ((chunk + 1) * CHUNK).min(trials);
            let mut sum = 0.0;
            let mut sq = 0.0;
            for t in lo..hi {
                let mut rng = rng_from_seed(trial_seed(seed, t));
                let v = next_u01(&mut rng);
                let x = f.eval_inverse(v);
                let w = 1.0 / f.slope_at(x);
                sum += w;
                sq += w * w;
            }
            (sum, sq, hi - lo)
        })
        .collect();
    let (sum, sq) = partials
        .iter()
        .fold((0.0, 0.0), |(s, q), &(ps, pq, _)| (s + ps, q + pq));
    let n = trials as f64;
    let mean = sum / n;
    let var = (sq / n - mean * mean).max(0.0);
    (mean, (var / n).sqrt())
}
