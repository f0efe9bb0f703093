//! Numerical substrate: grid densities, piecewise-linear monotone maps,
//! pushforwards, CDFs, relative entropy, and differential-entropy estimation.
//!
//! Densities are piecewise constant on a uniform grid; maps are piecewise
//! linear bijections of [0, 1]. Both choices give closed-form pushforwards
//! and exact CDFs, so the conservation laws tested elsewhere in this crate
//! hold up to re-binning error only.

use crate::error::{Error, Result};

/// Absolute tolerance on the total mass of a density.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Strictly positive probability mass function on a uniform grid over a
/// closed interval.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    bins: Vec<f64>,
    lo: f64,
    hi: f64,
}

impl GridDensity {
    /// Build a density from bin masses that already sum to one.
    pub fn new(bins: Vec<f64>, lo: f64, hi: f64) -> Result<Self> {
        if bins.len() < 2 {
            return Err(Error::InvalidDensity(format!(
                "need at least 2 bins, got {}",
                bins.len()
            )));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidDensity(format!(
                "invalid domain [{lo}, {hi}]"
            )));
        }
        for (i, &b) in bins.iter().enumerate() {
            if !(b.is_finite() && b > 0.0) {
                return Err(Error::InvalidDensity(format!(
                    "bin {i} has non-positive mass {b}"
                )));
            }
        }
        let sum: f64 = bins.iter().sum();
        if (sum - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDensity(format!(
                "masses sum to {sum}, expected 1 within {MASS_TOLERANCE:e}"
            )));
        }
        Ok(Self { bins, lo, hi })
    }

    /// Build a density from positive weights, normalizing them to unit mass.
    pub fn from_weights(weights: &[f64], lo: f64, hi: f64) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum.is_finite() && sum > 0.0) {
            return Err(Error::InvalidDensity(format!(
                "weights sum to {sum}, cannot normalize"
            )));
        }
        let bins = weights.iter().map(|w| w / sum).collect();
        Self::new(bins, lo, hi)
    }

    /// The uniform density on [0, 1] with `m` bins.
    pub fn uniform(m: usize) -> Self {
        let mass = 1.0 / m as f64;
        Self {
            bins: vec![mass; m],
            lo: 0.0,
            hi: 1.0,
        }
    }

    /// Histogram of samples in [0, 1], mixed with 5% uniform mass so that
    /// every bin stays strictly positive (floor 0.05/M per bin).
    pub fn from_samples_smoothed(samples: &[f64], bins: usize) -> Result<Self> {
        if bins < 2 {
            return Err(Error::InvalidDensity(format!(
                "need at least 2 bins, got {bins}"
            )));
        }
        if samples.is_empty() {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        let mut counts = vec![0u64; bins];
        for (i, &s) in samples.iter().enumerate() {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::InvalidArgument(format!(
                    "sample {i} = {s} outside [0, 1]"
                )));
            }
            let idx = ((s * bins as f64) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        let n = samples.len() as f64;
        let uniform = 1.0 / bins as f64;
        let masses: Vec<f64> = counts
            .iter()
            .map(|&c| 0.95 * c as f64 / n + 0.05 * uniform)
            .collect();
        Self::from_weights(&masses, 0.0, 1.0)
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn masses(&self) -> &[f64] {
        &self.bins
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.bins.len() as f64
    }

    /// Density value on bin `i` (mass divided by bin width).
    pub fn density(&self, i: usize) -> f64 {
        self.bins[i] / self.bin_width()
    }

    /// Density value at a point of the domain.
    pub fn density_at(&self, x: f64) -> f64 {
        self.density(self.bin_index(x))
    }

    fn bin_index(&self, x: f64) -> usize {
        let m = self.bins.len();
        let t = (x - self.lo) / (self.hi - self.lo);
        ((t * m as f64) as usize).min(m - 1)
    }

    /// Cumulative masses at the m+1 bin edges; first entry 0, last the total.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut cum = Vec::with_capacity(self.bins.len() + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        for &b in &self.bins {
            acc += b;
            cum.push(acc);
        }
        cum
    }

    /// Exact piecewise-linear CDF evaluated at `x`.
    pub fn cdf_at(&self, x: f64) -> f64 {
        if x <= self.lo {
            return 0.0;
        }
        if x >= self.hi {
            return self.bins.iter().sum();
        }
        let i = self.bin_index(x);
        let edge = self.lo + i as f64 * self.bin_width();
        let below: f64 = self.bins[..i].iter().sum();
        below + self.bins[i] * (x - edge) / self.bin_width()
    }

    /// Exact mass of the interval [a, b].
    pub fn interval_mass(&self, a: f64, b: f64) -> f64 {
        self.cdf_at(b) - self.cdf_at(a)
    }

    /// Inverse CDF: the point x with CDF(x) = u, for u in [0, 1].
    pub fn quantile(&self, u: f64) -> f64 {
        let cum = self.cumulative();
        self.quantile_with(&cum, u)
    }

    /// Inverse CDF against a precomputed cumulative vector (for sampling loops).
    pub fn quantile_with(&self, cum: &[f64], u: f64) -> f64 {
        let m = self.bins.len();
        let u = u.clamp(0.0, cum[m]);
        // First bin whose upper cumulative reaches u.
        let i = cum[1..=m].partition_point(|&c| c < u).min(m - 1);
        let within = (u - cum[i]) / self.bins[i];
        self.lo + (i as f64 + within) * self.bin_width()
    }

    pub fn is_unit_interval(&self) -> bool {
        self.lo == 0.0 && self.hi == 1.0
    }

    fn require_unit(&self, op: &str) -> Result<()> {
        if !self.is_unit_interval() {
            return Err(Error::InvalidDensity(format!(
                "{op} requires a density on [0, 1], got [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }
}

/// Strictly increasing piecewise-linear bijection of [0, 1].
///
/// Knots are shared between the map and its inverse, so `inverse` is exact
/// and `eval_inverse(eval(t)) = t` up to float rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneMap {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl MonotoneMap {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidMap(format!(
                "knot lists differ in length: {} vs {}",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::InvalidMap("need at least 2 knots".into()));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::InvalidMap("non-finite knot".into()));
        }
        if xs[0] != 0.0 || ys[0] != 0.0 || *xs.last().unwrap() != 1.0 || *ys.last().unwrap() != 1.0
        {
            return Err(Error::InvalidMap(
                "endpoints must be (0,0) and (1,1)".into(),
            ));
        }
        for w in xs.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidMap(format!(
                    "x-knots not strictly increasing at {} -> {}",
                    w[0], w[1]
                )));
            }
        }
        for w in ys.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidMap(format!(
                    "y-knots not strictly increasing at {} -> {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self { xs, ys })
    }

    pub fn identity() -> Self {
        Self {
            xs: vec![0.0, 1.0],
            ys: vec![0.0, 1.0],
        }
    }

    pub fn knots_x(&self) -> &[f64] {
        &self.xs
    }

    pub fn knots_y(&self) -> &[f64] {
        &self.ys
    }

    /// Index of the segment containing `x`, using the right-continuous
    /// convention at knots; x = 1 falls in the last segment.
    fn segment_index(&self, x: f64) -> usize {
        let i = self.xs.partition_point(|&k| k <= x);
        i.saturating_sub(1).min(self.xs.len() - 2)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.segment_index(x);
        self.ys[i] + (x - self.xs[i]) * self.slope_of(i)
    }

    pub fn eval_inverse(&self, y: f64) -> f64 {
        let i = self
            .ys
            .partition_point(|&k| k <= y)
            .saturating_sub(1)
            .min(self.ys.len() - 2);
        self.xs[i] + (y - self.ys[i]) / self.slope_of(i)
    }

    /// The inverse bijection (knot lists swapped).
    pub fn inverse(&self) -> MonotoneMap {
        MonotoneMap {
            xs: self.ys.clone(),
            ys: self.xs.clone(),
        }
    }

    fn slope_of(&self, i: usize) -> f64 {
        (self.ys[i + 1] - self.ys[i]) / (self.xs[i + 1] - self.xs[i])
    }

    /// Slope at `x` under the right-continuous convention: at a knot, the
    /// slope of the segment starting there.
    pub fn slope_at(&self, x: f64) -> f64 {
        self.slope_of(self.segment_index(x))
    }

    /// Segments as (x_start, x_end, slope) triples.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.xs.len() - 1).map(|i| (self.xs[i], self.xs[i + 1], self.slope_of(i)))
    }

    /// Exact value of the integral of ln f' over [0, 1].
    ///
    /// By Jensen this is <= 0, with equality only for the identity.
    pub fn log_slope_integral(&self) -> f64 {
        self.segments()
            .map(|(a, b, s)| (b - a) * s.ln())
            .sum()
    }

    /// Sup distance to another map, exact for piecewise-linear functions
    /// (the maximum is attained at a knot of either map).
    pub fn sup_distance(&self, other: &MonotoneMap) -> f64 {
        let mut worst: f64 = 0.0;
        for &x in self.xs.iter().chain(other.xs.iter()) {
            worst = worst.max((self.eval(x) - other.eval(x)).abs());
        }
        worst
    }
}

/// Sorted paired observations with tie metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePair {
    xs: Vec<f64>,
    ys: Vec<f64>,
    x_ties: bool,
    y_ties: bool,
}

impl SamplePair {
    /// Build from raw observations; pairs are sorted by x (ties by y).
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidArgument(format!(
                "coordinate lists differ in length: {} vs {}",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 3 {
            return Err(Error::InsufficientData {
                needed: 3,
                got: xs.len(),
            });
        }
        for (i, (&x, &y)) in xs.iter().zip(&ys).enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "non-finite observation at index {i}: ({x}, {y})"
                )));
            }
        }
        let mut pairs: Vec<(f64, f64)> = xs.into_iter().zip(ys).collect();
        pairs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let x_ties = pairs.windows(2).any(|w| w[0].0 == w[1].0);
        let mut sorted_y: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        sorted_y.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let y_ties = sorted_y.windows(2).any(|w| w[0] == w[1]);
        let (xs, ys) = pairs.into_iter().unzip();
        Ok(Self {
            xs,
            ys,
            x_ties,
            y_ties,
        })
    }

    pub fn n(&self) -> usize {
        self.xs.len()
    }

    /// x coordinates, ascending.
    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    /// y coordinates, paired with `xs` (ascending only for monotone data).
    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn has_x_ties(&self) -> bool {
        self.x_ties
    }

    pub fn has_y_ties(&self) -> bool {
        self.y_ties
    }

    /// Pairs re-sorted by y (ties by x).
    pub fn pairs_sorted_by_y(&self) -> Vec<(f64, f64)> {
        let mut pairs: Vec<(f64, f64)> = self.ys.iter().copied().zip(self.xs.iter().copied()).collect();
        pairs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pairs
    }
}

/// Relative entropy D(p || q) in nats.
///
/// Both densities must live on the same grid; the strict-positivity
/// invariant of `GridDensity` rules out infinities.
pub fn kl_divergence(p: &GridDensity, q: &GridDensity) -> Result<f64> {
    if p.len() != q.len() || p.lo != q.lo || p.hi != q.hi {
        return Err(Error::GridMismatch {
            left: p.len(),
            left_lo: p.lo,
            left_hi: p.hi,
            right: q.len(),
            right_lo: q.lo,
            right_hi: q.hi,
        });
    }
    let sum: f64 = p
        .bins
        .iter()
        .zip(&q.bins)
        .map(|(&pi, &qi)| pi * (pi / qi).ln())
        .sum();
    // Gibbs: the true value is >= 0; tiny negatives are float round-off.
    if sum > -1e-12 {
        Ok(sum.max(0.0))
    } else {
        Ok(sum)
    }
}

/// Image of `p` under `f`, re-binned to the same grid.
///
/// Mass transfer is exact interval intersection: output bin j receives the
/// p-mass of f^{-1}(bin j), computed through the exact piecewise-linear CDF
/// of p. No sampling is involved.
pub fn pushforward(p: &GridDensity, f: &MonotoneMap) -> Result<GridDensity> {
    p.require_unit("pushforward")?;
    let m = p.len();
    let cum = p.cumulative();
    let mut edges_cdf = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let y = j as f64 / m as f64;
        let x = f.eval_inverse(y);
        edges_cdf.push(cdf_from_cumulative(p, &cum, x));
    }
    let bins: Vec<f64> = edges_cdf
        .windows(2)
        .map(|w| (w[1] - w[0]).max(f64::MIN_POSITIVE))
        .collect();
    GridDensity::from_weights(&bins, 0.0, 1.0)
}

fn cdf_from_cumulative(p: &GridDensity, cum: &[f64], x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let m = p.len();
    if x >= 1.0 {
        return cum[m];
    }
    let i = ((x * m as f64) as usize).min(m - 1);
    cum[i] + p.bins[i] * (x * m as f64 - i as f64)
}

/// The piecewise-linear CDF of `p` as a monotone bijection of [0, 1].
///
/// Its slope on bin i equals p_i * M, so it maps `p` to the uniform
/// distribution.
pub fn cdf(p: &GridDensity) -> Result<MonotoneMap> {
    p.require_unit("cdf")?;
    let m = p.len();
    let mut xs = Vec::with_capacity(m + 1);
    let mut ys = p.cumulative();
    for i in 0..=m {
        xs.push(i as f64 / m as f64);
    }
    *xs.last_mut().unwrap() = 1.0;
    // Total mass is 1 within MASS_TOLERANCE; pin the endpoint exactly.
    *ys.last_mut().unwrap() = 1.0;
    MonotoneMap::new(xs, ys)
}

/// Covariance-style gap between the p-weighted and unweighted averages of
/// ln f': the integral of (p(x) - 1) ln f'(x) over [0, 1].
///
/// Computed exactly on the overlay partition of bin edges and map knots, so
/// it vanishes identically for uniform p or for the identity map.
pub fn log_slope_covariance(p: &GridDensity, f: &MonotoneMap) -> Result<f64> {
    p.require_unit("log_slope_covariance")?;
    let m = p.len();
    let width = 1.0 / m as f64;
    let mut delta = 0.0;
    let mut bin = 0usize;
    let mut seg = 0usize;
    let mut x = 0.0;
    let xs = f.knots_x();
    while x < 1.0 {
        let bin_end = (bin as f64 + 1.0) * width;
        let seg_end = xs[seg + 1];
        let next = bin_end.min(seg_end);
        let len = next - x;
        if len > 0.0 {
            let dens = p.bins[bin] * m as f64;
            let slope = (f.knots_y()[seg + 1] - f.knots_y()[seg]) / (xs[seg + 1] - xs[seg]);
            delta += len * (dens - 1.0) * slope.ln();
        }
        if next >= bin_end && bin + 1 < m {
            bin += 1;
        }
        if next >= seg_end && seg + 2 < xs.len() {
            seg += 1;
        }
        if next <= x {
            break;
        }
        x = next;
    }
    Ok(delta)
}

/// Kozachenko-Leonenko 1-nearest-neighbor estimate of differential entropy
/// in nats.
///
/// Requires at least 10 distinct values. Exact duplicates are handled by
/// flooring the neighbor distance at 1e-12 of the sample range, which keeps
/// the estimate finite (and strongly negative, as an atomic distribution
/// deserves).
pub fn differential_entropy_kl(samples: &[f64]) -> Result<f64> {
    let n = samples.len();
    let mut sorted = samples.to_vec();
    if sorted.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite sample".into()));
    }
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let distinct = 1 + sorted.windows(2).filter(|w| w[1] > w[0]).count();
    if n < 10 || distinct < 10 {
        return Err(Error::InsufficientData {
            needed: 10,
            got: distinct.min(n),
        });
    }
    let range = sorted[n - 1] - sorted[0];
    let floor = range * 1e-12;
    let mut log_sum = 0.0;
    for i in 0..n {
        let left = if i > 0 { sorted[i] - sorted[i - 1] } else { f64::INFINITY };
        let right = if i + 1 < n {
            sorted[i + 1] - sorted[i]
        } else {
            f64::INFINITY
        };
        let rho = left.min(right).max(floor);
        log_sum += rho.ln();
    }
    // psi(n) - psi(1) telescopes to the harmonic number H_{n-1}.
    let harmonic: f64 = (1..n).rev().map(|k| 1.0 / k as f64).sum();
    Ok(harmonic + std::f64::consts::LN_2 + log_sum / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{integrate_midpoint, MIDPOINT_NODES};
    use crate::rng::{next_standard_normal, next_u01, rng_from_seed};

    fn unit(bins: &[f64]) -> GridDensity {
        GridDensity::new(bins.to_vec(), 0.0, 1.0).unwrap()
    }

    /// Fine piecewise-linear approximation of sqrt on [0, 1], parametrized
    /// by uniform y-knots so the inverse is the exact interpolant of y^2.
    fn sqrt_map(knots: usize) -> MonotoneMap {
        let mut xs = Vec::with_capacity(knots + 1);
        let mut ys = Vec::with_capacity(knots + 1);
        for i in 0..=knots {
            let y = i as f64 / knots as f64;
            xs.push(y * y);
            ys.push(y);
        }
        MonotoneMap::new(xs, ys).unwrap()
    }

    #[test]
    fn density_invariants_are_enforced() {
        assert!(GridDensity::new(vec![1.0], 0.0, 1.0).is_err());
        assert!(GridDensity::new(vec![0.5, 0.5, 0.0], 0.0, 1.0).is_err());
        assert!(GridDensity::new(vec![0.6, 0.6], 0.0, 1.0).is_err());
        assert!(GridDensity::new(vec![0.5, 0.5], 1.0, 0.0).is_err());
        assert!(GridDensity::new(vec![0.5, 0.5], 0.0, 1.0).is_ok());
    }

    #[test]
    fn kl_of_identical_distributions_is_zero() {
        let p = unit(&[0.5, 0.5]);
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn kl_matches_direct_evaluation() {
        let p = unit(&[0.75, 0.25]);
        let q = unit(&[0.5, 0.5]);
        let expected = 0.75 * 1.5f64.ln() + 0.25 * 0.5f64.ln();
        assert!((kl_divergence(&p, &q).unwrap() - expected).abs() < 1e-12);
        assert!((kl_divergence(&p, &q).unwrap() - 0.130812).abs() < 1e-6);
        // Asymmetry witness.
        assert!((kl_divergence(&q, &p).unwrap() - 0.143841).abs() < 1e-6);
    }

    #[test]
    fn kl_rejects_mismatched_grids() {
        let p = unit(&[0.5, 0.5]);
        let q = GridDensity::uniform(4);
        assert!(matches!(
            kl_divergence(&p, &q),
            Err(Error::GridMismatch { .. })
        ));
        let r = GridDensity::new(vec![0.5, 0.5], 0.0, 2.0).unwrap();
        assert!(kl_divergence(&p, &r).is_err());
    }

    #[test]
    fn pushforward_of_uniform_under_identity_is_uniform() {
        let p = GridDensity::uniform(64);
        let out = pushforward(&p, &MonotoneMap::identity()).unwrap();
        for &b in out.masses() {
            assert!((b - 1.0 / 64.0).abs() < 1e-14);
        }
    }

    #[test]
    fn pushforward_of_uniform_under_sqrt_has_linear_density() {
        let m = 1000;
        let p = GridDensity::uniform(m);
        let f = sqrt_map(1000);
        let out = pushforward(&p, &f).unwrap();
        let mut worst: f64 = 0.0;
        for j in 0..m {
            let y = (j as f64 + 0.5) / m as f64;
            worst = worst.max((out.density(j) - 2.0 * y).abs());
        }
        assert!(worst < 2e-2, "max deviation {worst}");
    }

    #[test]
    fn pushforward_round_trip_is_exact_for_grid_compatible_maps() {
        // A bin-preserving zigzag: non-identity slopes, but each grid cell
        // maps onto itself, so no re-binning information is lost.
        let m = 1000;
        let mut xs = vec![0.0];
        let mut ys = vec![0.0];
        for i in 0..m {
            let lo = i as f64 / m as f64;
            let hi = (i + 1) as f64 / m as f64;
            let mid = lo + 0.5 / m as f64;
            xs.push(mid);
            ys.push(lo + 0.75 / m as f64);
            xs.push(hi);
            ys.push(hi);
        }
        let f = MonotoneMap::new(xs, ys).unwrap();
        let weights: Vec<f64> = (0..m).map(|i| 1.0 + 0.5 * (6.0 * i as f64 / m as f64).sin()).collect();
        let p = GridDensity::from_weights(&weights, 0.0, 1.0).unwrap();
        let back = pushforward(&pushforward(&p, &f).unwrap(), &f.inverse()).unwrap();
        let l1: f64 = p
            .masses()
            .iter()
            .zip(back.masses())
            .map(|(a, b)| (a - b).abs())
            .sum();
        assert!(l1 < 1e-6, "L1 distance {l1}");
    }

    #[test]
    fn pushforward_round_trip_on_generic_smooth_map_loses_only_rebinning_mass() {
        let m = 1000;
        let f = sqrt_map(1000);
        let weights: Vec<f64> = (0..m).map(|i| 1.0 + 0.8 * (3.0 * i as f64 / m as f64).cos()).collect();
        let p = GridDensity::from_weights(&weights, 0.0, 1.0).unwrap();
        let back = pushforward(&pushforward(&p, &f).unwrap(), &f.inverse()).unwrap();
        let l1: f64 = p
            .masses()
            .iter()
            .zip(back.masses())
            .map(|(a, b)| (a - b).abs())
            .sum();
        assert!(l1 < 2e-3, "L1 distance {l1}");
    }

    #[test]
    fn cdf_of_uniform_is_identity() {
        let map = cdf(&GridDensity::uniform(8)).unwrap();
        for i in 0..=16 {
            let t = i as f64 / 16.0;
            assert!((map.eval(t) - t).abs() < 1e-12);
        }
    }

    #[test]
    fn cdf_knots_are_cumulative_sums() {
        let p = unit(&[0.8, 0.2]);
        let map = cdf(&p).unwrap();
        assert_eq!(map.knots_x(), &[0.0, 0.5, 1.0]);
        assert!((map.knots_y()[1] - 0.8).abs() < 1e-15);
        assert_eq!(map.knots_y()[2], 1.0);
    }

    #[test]
    fn cdf_of_linear_density_is_quadratic() {
        let m = 1000;
        let weights: Vec<f64> = (0..m)
            .map(|i| {
                let a = i as f64 / m as f64;
                let b = (i + 1) as f64 / m as f64;
                b * b - a * a
            })
            .collect();
        let p = GridDensity::from_weights(&weights, 0.0, 1.0).unwrap();
        let map = cdf(&p).unwrap();
        for i in 0..=50 {
            let y = i as f64 / 50.0;
            assert!((map.eval(y) - y * y).abs() < 1e-9);
        }
    }

    #[test]
    fn cdf_pushforward_consistency() {
        let weights: Vec<f64> = (0..1000).map(|i| 1.0 + 0.9 * (11.0 * i as f64 / 1000.0).sin()).collect();
        let p = GridDensity::from_weights(&weights, 0.0, 1.0).unwrap();
        let map = cdf(&p).unwrap();
        let out = pushforward(&p, &map).unwrap();
        let l1: f64 = out
            .masses()
            .iter()
            .map(|&b| (b - 1e-3).abs())
            .sum();
        assert!(l1 < 1e-6, "L1 distance from uniform {l1}");
    }

    #[test]
    fn log_slope_covariance_vanishes_for_identity_and_uniform() {
        let p = unit(&[0.8, 0.2]);
        assert_eq!(
            log_slope_covariance(&p, &MonotoneMap::identity()).unwrap(),
            0.0
        );
        // Exactly representable uniform masses (M a power of two).
        let u = GridDensity::uniform(8);
        let f = MonotoneMap::new(vec![0.0, 0.25, 1.0], vec![0.0, 0.5, 1.0]).unwrap();
        assert_eq!(log_slope_covariance(&u, &f).unwrap(), 0.0);
    }

    #[test]
    fn log_slope_covariance_matches_quadrature_oracle() {
        let p = unit(&[0.8, 0.2]);
        let f = MonotoneMap::new(vec![0.0, 0.25, 1.0], vec![0.0, 0.5, 1.0]).unwrap();
        let oracle = integrate_midpoint(
            |x| (p.density_at(x) - 1.0) * f.slope_at(x).ln(),
            0.0,
            1.0,
            MIDPOINT_NODES,
        );
        let lib = log_slope_covariance(&p, &f).unwrap();
        assert!((lib - oracle).abs() < 1e-6, "lib {lib} vs oracle {oracle}");
        // Closed form for this instance: 0.15 * ln 3.
        assert!((lib - 0.15 * 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn entropy_estimator_matches_known_values() {
        let n = 100_000;
        let mut rng = rng_from_seed(2024);
        let unif: Vec<f64> = (0..n).map(|_| next_u01(&mut rng)).collect();
        let h = differential_entropy_kl(&unif).unwrap();
        assert!(h.abs() < 0.05, "uniform[0,1] entropy estimate {h}");

        let wide: Vec<f64> = unif.iter().map(|u| 2.0 * u).collect();
        let h2 = differential_entropy_kl(&wide).unwrap();
        assert!((h2 - std::f64::consts::LN_2).abs() < 0.05, "uniform[0,2] {h2}");

        let mut rng = rng_from_seed(77);
        let normal: Vec<f64> = (0..n).map(|_| next_standard_normal(&mut rng)).collect();
        let h3 = differential_entropy_kl(&normal).unwrap();
        let expected = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln();
        assert!((h3 - expected).abs() < 0.05, "gaussian {h3} vs {expected}");
    }

    #[test]
    fn entropy_estimator_rejects_too_few_distinct_values() {
        let samples = vec![1.0, 2.0, 3.0, 1.0, 2.0, 3.0, 1.0, 2.0, 3.0, 1.0, 2.0];
        assert!(matches!(
            differential_entropy_kl(&samples),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn sample_pair_sorts_and_flags_ties() {
        let s = SamplePair::new(vec![3.0, 1.0, 2.0], vec![30.0, 10.0, 20.0]).unwrap();
        assert_eq!(s.xs(), &[1.0, 2.0, 3.0]);
        assert_eq!(s.ys(), &[10.0, 20.0, 30.0]);
        assert!(!s.has_x_ties());
        let t = SamplePair::new(vec![1.0, 1.0, 2.0], vec![1.0, 2.0, 3.0]).unwrap();
        assert!(t.has_x_ties());
        assert!(!t.has_y_ties());
        assert!(SamplePair::new(vec![1.0, 2.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn monotone_map_round_trips_points() {
        let f = sqrt_map(200);
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            assert!((f.eval_inverse(f.eval(t)) - t).abs() < 1e-10);
            assert!((f.inverse().eval(f.eval(t)) - t).abs() < 1e-10);
        }
    }

    #[test]
    fn monotone_map_rejects_bad_knots() {
        assert!(MonotoneMap::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.0, 1.0]).is_err());
        assert!(MonotoneMap::new(vec![0.0, 1.0], vec![0.1, 1.0]).is_err());
        assert!(MonotoneMap::new(vec![0.0, 0.6, 0.5, 1.0], vec![0.0, 0.3, 0.6, 1.0]).is_err());
    }

    #[test]
    fn slope_uses_right_continuous_convention_at_knots() {
        let f = MonotoneMap::new(vec![0.0, 0.25, 1.0], vec![0.0, 0.75, 1.0]).unwrap();
        assert_eq!(f.slope_at(0.25), (1.0 - 0.75) / 0.75);
        assert_eq!(f.slope_at(0.0), 3.0);
        // x = 1 belongs to the final segment.
        assert_eq!(f.slope_at(1.0), (1.0 - 0.75) / 0.75);
    }
}
