//! Reproducible random generation of mechanisms, densities, and samples.
//!
//! "Chosen independently" is made operational here: the diffeomorphism and
//! the input density are drawn from disjoint substreams of one master seed,
//! so their only relation is the seed arithmetic. Maps are normalized
//! integrals of a positive bump mixture (logistic-derivative bumps over a
//! constant floor), densities are bump mixtures blended with 5% uniform
//! mass. Everything is deterministic per seed and free of global state.

use rand_chacha::ChaCha8Rng;

use crate::counting::{CountModel, ORACLE_AREA_LIMIT};
use crate::density::{GridDensity, MonotoneMap, SamplePair};
use crate::error::{Error, Result};
use crate::rng::{
    next_range, next_standard_normal, next_u01, rng_from_seed, substream_seed, STREAM_DENSITY,
    STREAM_MAP, STREAM_SAMPLE,
};

/// Parameters of the generator suite.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub seed: u64,
    /// Number/scale of slope bumps in generated maps.
    pub map_roughness: f64,
    /// Number/scale of bumps in generated densities.
    pub density_roughness: f64,
    /// Grid resolution for generated maps and densities.
    pub bins: usize,
    /// Additive noise level for sampled pairs.
    pub noise_level: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            map_roughness: 1.0,
            density_roughness: 1.0,
            bins: 512,
            noise_level: 0.0,
        }
    }
}

impl GeneratorConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.map_roughness.is_finite() && self.map_roughness > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "map_roughness must be positive, got {}",
                self.map_roughness
            )));
        }
        if !(self.density_roughness.is_finite() && self.density_roughness > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "density_roughness must be positive, got {}",
                self.density_roughness
            )));
        }
        if self.bins < 2 {
            return Err(Error::InvalidArgument(format!(
                "bins must be at least 2, got {}",
                self.bins
            )));
        }
        if !(self.noise_level.is_finite() && self.noise_level >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "noise_level must be non-negative, got {}",
                self.noise_level
            )));
        }
        Ok(())
    }

    /// Serialize as `key=value` lines (keys: seed, map_roughness,
    /// density_roughness, bins, noise_level).
    pub fn to_key_value_string(&self) -> String {
        format!(
            "seed={}\nmap_roughness={}\ndensity_roughness={}\nbins={}\nnoise_level={}\n",
            self.seed, self.map_roughness, self.density_roughness, self.bins, self.noise_level
        )
    }

    /// Parse `key=value` lines; missing keys keep their defaults, unknown
    /// keys are rejected. Blank lines and `#` comments are ignored.
    pub fn from_key_value_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidArgument(format!("line {}: expected key=value", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let parse_err = |what: &str| {
                Error::InvalidArgument(format!("line {}: bad {what}: {value}", lineno + 1))
            };
            match key {
                "seed" => cfg.seed = value.parse().map_err(|_| parse_err("seed"))?,
                "map_roughness" => {
                    cfg.map_roughness = value.parse().map_err(|_| parse_err("map_roughness"))?
                }
                "density_roughness" => {
                    cfg.density_roughness =
                        value.parse().map_err(|_| parse_err("density_roughness"))?
                }
                "bins" => cfg.bins = value.parse().map_err(|_| parse_err("bins"))?,
                "noise_level" => {
                    cfg.noise_level = value.parse().map_err(|_| parse_err("noise_level"))?
                }
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "line {}: unknown key {other}",
                        lineno + 1
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Logistic-derivative bump mixture over a constant floor.
struct BumpMixture {
    floor: f64,
    bumps: Vec<(f64, f64, f64)>, // (weight, center, width)
}

impl BumpMixture {
    /// Narrow bumps carry the asymmetry as local slope roughness rather
    /// Slope profile for generated maps. Narrow bumps carry the asymmetry
    /// as local slope roughness rather than global warp, which keeps the
    /// uniform- and Gaussian-reference scores pointing the same way.
    fn draw_for_map(rng: &mut ChaCha8Rng, roughness: f64) -> Self {
        let count = ((2.0 + 2.0 * roughness).round().max(1.0) as usize).min(64);
        Self::draw(rng, count, 1.4 * roughness, 0.10, 0.015, 0.06)
    }

    /// Density profile: wider, gentler bumps than the map profile, so grid
    /// re-binning error stays far below the conservation tolerances.
    fn draw_for_density(rng: &mut ChaCha8Rng, roughness: f64) -> Self {
        let count = ((2.0 + 2.0 * roughness).round().max(1.0) as usize).min(64);
        Self::draw(rng, count, 0.5 * roughness, 1.0, 0.06, 0.25)
    }

    fn draw(
        rng: &mut ChaCha8Rng,
        count: usize,
        weight_scale: f64,
        floor: f64,
        width_min: f64,
        width_spread: f64,
    ) -> Self {
        let bumps = (0..count)
            .map(|_| {
                let weight = weight_scale * (0.5 + next_u01(rng));
                // Centers may fall slightly outside [0, 1]; otherwise the
                // truncated bump mass would dip every draw near the domain
                // ends, correlating maps with densities through the shared
                // edge shape.
                let center = -0.15 + 1.3 * next_u01(rng);
                let width = width_min + width_spread * next_u01(rng).powi(2);
                (weight, center, width)
            })
            .collect();
        Self { floor, bumps }
    }

    /// Exact antiderivative at t: floor*t + sum_i w_i * sigma((t-c_i)/s_i),
    /// where sigma is the logistic function (each bump has unit mass).
    fn antiderivative(&self, t: f64) -> f64 {
        let sigma = |u: f64| 1.0 / (1.0 + (-u).exp());
        self.floor * t
            + self
                .bumps
                .iter()
                .map(|&(w, c, s)| w * (sigma((t - c) / s) - sigma(-c / s)))
                .sum::<f64>()
    }
}

/// Random strictly increasing piecewise-linear bijection of [0, 1]:
/// the normalized integral of a strictly positive bump mixture, discretized
/// to `bins` knots. Deterministic per seed; roughness -> 0 degenerates to
/// the identity.
pub fn random_diffeomorphism(cfg: &GeneratorConfig) -> Result<MonotoneMap> {
    cfg.validate()?;
    let mut rng = rng_from_seed(substream_seed(cfg.seed, STREAM_MAP));
    let mixture = BumpMixture::draw_for_map(&mut rng, cfg.map_roughness);
    let m = cfg.bins;
    let total = mixture.antiderivative(1.0);
    let mut xs = Vec::with_capacity(m + 1);
    let mut ys = Vec::with_capacity(m + 1);
    for i in 0..=m {
        let t = i as f64 / m as f64;
        xs.push(t);
        ys.push(mixture.antiderivative(t) / total);
    }
    ys[0] = 0.0;
    ys[m] = 1.0;
    MonotoneMap::new(xs, ys)
}

/// Random strictly positive density on [0, 1]: exact bin integrals of a bump
/// mixture, blended with 5% uniform mass so every bin carries at least
/// 0.05/M. Drawn from a substream disjoint from the map stream.
pub fn random_density(cfg: &GeneratorConfig) -> Result<GridDensity> {
    cfg.validate()?;
    let mut rng = rng_from_seed(substream_seed(cfg.seed, STREAM_DENSITY));
    let mixture = BumpMixture::draw_for_density(&mut rng, cfg.density_roughness);
    let m = cfg.bins;
    let total = mixture.antiderivative(1.0);
    let uniform = 1.0 / m as f64;
    let mut edges = Vec::with_capacity(m + 1);
    for i in 0..=m {
        edges.push(mixture.antiderivative(i as f64 / m as f64) / total);
    }
    let bins: Vec<f64> = edges
        .windows(2)
        .map(|w| 0.95 * (w[1] - w[0]) + 0.05 * uniform)
        .collect();
    GridDensity::from_weights(&bins, 0.0, 1.0)
}

/// Draw n observations: x by inverse-CDF sampling from p, y = f(x) plus
/// optional truncated-Gaussian noise re-clipped to [0, 1]. Sorted by x;
/// noise_level = 0 gives deterministic co-sorted data.
pub fn sample_pair(
    p: &GridDensity,
    f: &MonotoneMap,
    n: usize,
    noise_level: f64,
    seed: u64,
) -> Result<SamplePair> {
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    if !(noise_level.is_finite() && noise_level >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "noise_level must be non-negative, got {noise_level}"
        )));
    }
    let mut rng = rng_from_seed(substream_seed(seed, STREAM_SAMPLE));
    let cum = p.cumulative();
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let x = p.quantile_with(&cum, next_u01(&mut rng));
        let mut y = f.eval(x);
        if noise_level > 0.0 {
            y = (y + noise_level * next_standard_normal(&mut rng)).clamp(0.0, 1.0);
        }
        xs.push(x);
        ys.push(y);
    }
    SamplePair::new(xs, ys)
}

/// Random observation set on a lattice with k*l bounded by the brute-force
/// oracle limit; used by the counting verification suites.
pub fn random_count_model(seed: u64, max_area: u64) -> Result<CountModel> {
    let max_area = max_area.min(ORACLE_AREA_LIMIT);
    if max_area < 1 {
        return Err(Error::InvalidArgument("max_area must be positive".into()));
    }
    let mut rng = rng_from_seed(seed);
    let k = 1 + next_range(&mut rng, 20.min(max_area));
    let ell = 1 + next_range(&mut rng, (max_area / k).clamp(1, 60));
    let max_interior = (k.min(ell) - 1).min(6);
    let interior = if max_interior == 0 {
        0
    } else {
        next_range(&mut rng, max_interior + 1)
    };
    let draw_distinct = |rng: &mut ChaCha8Rng, upper: u64, count: u64| -> Vec<u64> {
        let mut set = std::collections::BTreeSet::new();
        while (set.len() as u64) < count {
            set.insert(1 + next_range(rng, upper - 1));
        }
        set.into_iter().collect()
    };
    let mut points = vec![(0, 0)];
    if interior > 0 {
        let xs = draw_distinct(&mut rng, k, interior);
        let ys = draw_distinct(&mut rng, ell, interior);
        points.extend(xs.into_iter().zip(ys));
    }
    points.push((k, ell));
    CountModel::new(k, ell, points)
}
