//! Unsupervised and semi-supervised prediction of the cause from the effect.
//!
//! The effect marginal p_Y carries usable information about the inverse
//! mechanism: its CDF maps p_Y to uniform and therefore recovers f^{-1}
//! exactly when the cause was uniformly distributed. Relative entropy is
//! conserved under bijections, which turns that statement into an error
//! bound: unsupervised prediction in the causal direction always errs at
//! least as much as in the anticausal direction.
//!
//! The discrete half of the module works on the grid {1..k} x {1..l} with
//! monotone surjections, where the posterior over functions is an explicit
//! sum of log pushforward probabilities and permutation-equivalent functions
//! can be compared head to head.

use rayon::prelude::*;

use crate::density::{cdf, kl_divergence, pushforward, GridDensity, MonotoneMap};
use crate::error::{Error, Result};
use crate::rng::{next_range, rng_from_seed, shuffle, substream_seed, trial_seed, STREAM_PERMUTATION};

/// Tolerance below which permutation scores are considered tied; ties count
/// as "not less" (conservative for the win fraction).
const PERMUTATION_TIE_EPSILON: f64 = 1e-12;

/// A monotone surjection {1..k} -> {1..l}, stored as its preimage counts
/// |f^{-1}(1)|, ..., |f^{-1}(l)|. Monotonicity makes the list a unique
/// description; surjectivity means every count is >= 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteFunction {
    counts: Vec<u64>,
    k: u64,
}

impl DiscreteFunction {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidArgument("need at least one level".into()));
        }
        if counts.contains(&0) {
            return Err(Error::InvalidArgument(
                "every level needs a preimage (surjectivity)".into(),
            ));
        }
        let k = counts.iter().sum();
        Ok(Self { counts, k })
    }

    /// Domain size k.
    pub fn k(&self) -> u64 {
        self.k
    }

    /// Range size l.
    pub fn ell(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Image of the uniform distribution: p(y) = |f^{-1}(y)| / k.
    pub fn pushforward_probs(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.k as f64)
            .collect()
    }

    /// Apply the function to x in 1..=k (1-based levels on both sides).
    pub fn apply(&self, x: u64) -> Result<u64> {
        if x < 1 || x > self.k {
            return Err(Error::InvalidArgument(format!(
                "x = {x} outside the domain 1..={}",
                self.k
            )));
        }
        let mut acc = 0;
        for (y, &c) in self.counts.iter().enumerate() {
            acc += c;
            if x <= acc {
                return Ok(y as u64 + 1);
            }
        }
        unreachable!("counts sum to k");
    }

    /// The permutation-equivalent function f_pi with pushforward
    /// p_{f_pi}(y) = p_f(pi^{-1}(y)); `perm` maps level i to level
    /// `perm[i]`, 0-based.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let ell = self.counts.len();
        if perm.len() != ell {
            return Err(Error::InvalidArgument(format!(
                "permutation length {} does not match l = {ell}",
                perm.len()
            )));
        }
        let mut new_counts = vec![0u64; ell];
        for (i, &target) in perm.iter().enumerate() {
            if target >= ell || new_counts[target] != 0 {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
            new_counts[target] = self.counts[i];
        }
        Self::new(new_counts)
    }

    /// Uniform draw from the set of monotone surjections {1..k} -> {1..l}:
    /// a uniformly random composition of k into l positive parts.
    pub fn random_surjection(k: u64, ell: usize, seed: u64) -> Result<Self> {
        if ell == 0 || (ell as u64) > k {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= l <= k, got l = {ell}, k = {k}"
            )));
        }
        let mut rng = rng_from_seed(seed);
        // l-1 distinct cut positions among the k-1 gaps.
        let mut cuts = std::collections::BTreeSet::new();
        while cuts.len() < ell - 1 {
            cuts.insert(1 + next_range(&mut rng, k - 1));
        }
        let mut counts = Vec::with_capacity(ell);
        let mut prev = 0;
        for &c in &cuts {
            counts.push(c - prev);
            prev = c;
        }
        counts.push(k - prev);
        Self::new(counts)
    }
}

/// The unsupervised estimator of f^{-1}: the CDF of the effect marginal.
///
/// Maps p_Y to uniform; if the cause was uniform this equals f^{-1} at grid
/// resolution.
pub fn unsupervised_estimator(p_y: &GridDensity) -> Result<MonotoneMap> {
    cdf(p_y)
}

/// Unsupervised prediction errors (anticausal, causal):
/// D(p_Y || image of uniform under f) and D(p_X || image of uniform under
/// f^{-1}).
///
/// The anticausal error equals D(p_X || uniform) by conservation of relative
/// entropy under bijections, up to re-binning; `conservation_gap` measures
/// the discrepancy.
pub fn unsupervised_error(p_x: &GridDensity, f: &MonotoneMap) -> Result<(f64, f64)> {
    let uniform = GridDensity::uniform(p_x.len());
    let p_y = pushforward(p_x, f)?;
    let forward = pushforward(&uniform, f)?;
    let backward = pushforward(&uniform, &f.inverse())?;
    let anticausal = kl_divergence(&p_y, &forward)?;
    let causal = kl_divergence(p_x, &backward)?;
    Ok((anticausal, causal))
}

/// |D(p_Y || image of uniform) - D(p_X || uniform)|: the measured deviation
/// from exact conservation, due to grid re-binning only.
pub fn conservation_gap(p_x: &GridDensity, f: &MonotoneMap) -> Result<f64> {
    let uniform = GridDensity::uniform(p_x.len());
    let p_y = pushforward(p_x, f)?;
    let forward = pushforward(&uniform, f)?;
    let anticausal = kl_divergence(&p_y, &forward)?;
    let direct = kl_divergence(p_x, &uniform)?;
    Ok((anticausal - direct).abs())
}

/// A semi-supervised task: a few labeled (y, x) pairs plus the effect
/// marginal as the infinite-unlabeled-data idealization.
#[derive(Debug, Clone, PartialEq)]
pub struct SSLProblem {
    labeled: Vec<(f64, f64)>,
    density: GridDensity,
}

impl SSLProblem {
    /// Labeled pairs are given as (y, x) and sorted by y internally; they
    /// must be co-monotone or the monotone-model assumption is violated.
    pub fn new(labeled: Vec<(f64, f64)>, unlabeled_density: GridDensity) -> Result<Self> {
        if labeled.len() < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: labeled.len(),
            });
        }
        if !unlabeled_density.is_unit_interval() {
            return Err(Error::InvalidDensity(
                "unlabeled density must live on [0, 1]".into(),
            ));
        }
        let mut labeled = labeled;
        labeled.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in labeled.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::DegenerateData(format!(
                    "duplicate label position y = {}",
                    w[1].0
                )));
            }
            if w[1].1 <= w[0].1 {
                return Err(Error::DegenerateData(format!(
                    "labels not co-monotone at y = {}",
                    w[1].0
                )));
            }
        }
        Ok(Self {
            labeled,
            density: unlabeled_density,
        })
    }

    /// Build the unlabeled density by histogramming finite samples.
    pub fn from_unlabeled_samples(
        labeled: Vec<(f64, f64)>,
        unlabeled_ys: &[f64],
        bins: usize,
    ) -> Result<Self> {
        let density = GridDensity::from_samples_smoothed(unlabeled_ys, bins)?;
        Self::new(labeled, density)
    }

    pub fn labeled(&self) -> &[(f64, f64)] {
        &self.labeled
    }

    pub fn unlabeled_density(&self) -> &GridDensity {
        &self.density
    }
}

/// Interpolate between the bracketing labels using the mass of the effect
/// marginal:
///
///   x_j + (x_{j+1} - x_j) * mass(y_j, y) / mass(y_j, y_{j+1}).
///
/// Continuous and monotone in y, exact at the labels. Queries outside the
/// labeled range are refused.
pub fn ssl_interpolate(prob: &SSLProblem, y: f64) -> Result<f64> {
    let labeled = &prob.labeled;
    let (y_first, y_last) = (labeled[0].0, labeled[labeled.len() - 1].0);
    if y < y_first || y > y_last {
        return Err(Error::Extrapolation {
            y,
            lo: y_first,
            hi: y_last,
        });
    }
    let j = labeled
        .partition_point(|&(yj, _)| yj <= y)
        .saturating_sub(1)
        .min(labeled.len() - 2);
    let (y_lo, x_lo) = labeled[j];
    let (y_hi, x_hi) = labeled[j + 1];
    let num = prob.density.interval_mass(y_lo, y);
    let den = prob.density.interval_mass(y_lo, y_hi);
    Ok(x_lo + (x_hi - x_lo) * num / den)
}

/// Log posterior of a discrete function given observed effect levels, up to
/// an additive constant:
///
///   sum_j ln( |f^{-1}(y_j)| / k ).
///
/// The y-dependent constant of the full posterior is excluded; differences
/// between functions are what matter.
pub fn discrete_log_posterior(f: &DiscreteFunction, y_tuple: &[u64]) -> Result<f64> {
    let ell = f.ell() as u64;
    let mut total = 0.0;
    for (j, &y) in y_tuple.iter().enumerate() {
        if y < 1 || y > ell {
            return Err(Error::InvalidArgument(format!(
                "observation {j}: level {y} outside 1..={ell}"
            )));
        }
        total += (f.counts[y as usize - 1] as f64 / f.k as f64).ln();
    }
    Ok(total)
}

/// Continuous analogue of the discrete log posterior, up to its additive
/// constant: mu * integral of p(y) ln (f^{-1})'(y) dy.
///
/// The prefactor mu plays the role of the observation count in the discrete
/// derivation; callers typically pass mu = n.
pub fn continuous_log_posterior(p_y: &GridDensity, f: &MonotoneMap, mu: f64) -> Result<f64> {
    if !p_y.is_unit_interval() {
        return Err(Error::InvalidDensity(
            "continuous posterior requires a density on [0, 1]".into(),
        ));
    }
    // Exact overlay integration: p is constant per bin, ln (f^{-1})' is
    // constant per y-segment of f.
    let m = p_y.len();
    let width = 1.0 / m as f64;
    let ys = f.knots_y();
    let xs = f.knots_x();
    let mut total = 0.0;
    let mut bin = 0usize;
    let mut seg = 0usize;
    let mut y = 0.0;
    while y < 1.0 {
        let bin_end = (bin as f64 + 1.0) * width;
        let seg_end = ys[seg + 1];
        let next = bin_end.min(seg_end);
        let len = next - y;
        if len > 0.0 {
            let dens = p_y.masses()[bin] * m as f64;
            let inv_slope = (xs[seg + 1] - xs[seg]) / (ys[seg + 1] - ys[seg]);
            total += len * dens * inv_slope.ln();
        }
        if next >= bin_end && bin + 1 < m {
            bin += 1;
        }
        if next >= seg_end && seg + 2 < ys.len() {
            seg += 1;
        }
        if next <= y {
            break;
        }
        y = next;
    }
    Ok(mu * total)
}

/// Fraction of sampled permutations pi whose function f_pi scores strictly
/// below the true function under the empirical effect distribution:
///
///   sum_y p(y) ln p_{f_pi}(y)  <  sum_y p(y) ln p_f(y).
///
/// Ties count as "not less". A fraction near 1 means the true function beats
/// the overwhelming majority of its permutation-equivalence class.
pub fn permutation_equivalence_experiment(
    f: &DiscreteFunction,
    p_y: &[f64],
    num_permutations: u64,
    seed: u64,
) -> Result<f64> {
    let ell = f.ell();
    if p_y.len() != ell {
        return Err(Error::InvalidArgument(format!(
            "distribution over {} levels does not match l = {ell}",
            p_y.len()
        )));
    }
    let total: f64 = p_y.iter().sum();
    if p_y.iter().any(|&p| !(p.is_finite() && p >= 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(
            "p_y must be a probability distribution".into(),
        ));
    }
    if num_permutations < 1_000 {
        return Err(Error::InvalidArgument(format!(
            "need at least 1000 permutations, got {num_permutations}"
        )));
    }
    let log_probs: Vec<f64> = f
        .counts
        .iter()
        .map(|&c| (c as f64 / f.k as f64).ln())
        .collect();
    let true_score: f64 = p_y.iter().zip(&log_probs).map(|(&p, &lp)| p * lp).sum();
    let stream = substream_seed(seed, STREAM_PERMUTATION);
    let wins: u64 = (0..num_permutations)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_from_seed(trial_seed(stream, t));
            // pi uniform iff pi^{-1} uniform, so sample the displacement
            // sigma = pi^{-1} directly: score = sum_y p(y) log_probs[sigma(y)].
            let mut sigma: Vec<usize> = (0..ell).collect();
            shuffle(&mut rng, &mut sigma);
            let score: f64 = p_y
                .iter()
                .zip(&sigma)
                .map(|(&p, &s)| p * log_probs[s])
                .sum();
            u64::from(score < true_score - PERMUTATION_TIE_EPSILON)
        })
        .sum();
    Ok(wins as f64 / num_permutations as f64)
}
