//! The inference method: empirical slope scores in both directions,
//! entropy-based scores under uniform or Gaussian reference measures, the
//! ordering modification for noisy data, and the decision rule.
//!
//! For x-sorted data (x_1 < ... < x_n) the slope score in the causal
//! direction is
//!
//!   C_xy = (1/(n-1)) * sum_j ln(|y_{j+1} - y_j| / |x_{j+1} - x_j|)
//!
//! and the direction with the smaller score is inferred as the cause. On
//! deterministic monotone data the two scores are exact negatives of each
//! other; with noise, each score is computed along its own axis ordering and
//! the antisymmetry is lost.

use crate::density::{differential_entropy_kl, SamplePair};
use crate::error::{Error, Result};
use crate::Axis;

/// Width of the undecided band on the score difference.
///
/// Score equality occurs only for the identity mechanism, so a tiny band
/// suffices to absorb float noise.
pub const TIE_EPSILON: f64 = 1e-9;

const CONFIDENCE_EPSILON: f64 = 1e-12;

/// Reference measure for the entropy-based score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    /// Min-max standardization to [0, 1]; compares against uniform.
    Uniform,
    /// Z-score standardization; compares against a moment-matched Gaussian.
    Gaussian,
}

/// Scoring method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Gap-based slope score (uniform reference).
    Slope,
    /// Differential-entropy score under the given reference.
    Entropy(Reference),
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Slope => write!(f, "slope_uniform"),
            Method::Entropy(Reference::Uniform) => write!(f, "entropy_uniform"),
            Method::Entropy(Reference::Gaussian) => write!(f, "entropy_gaussian"),
        }
    }
}

/// How the two sides of the comparison order the data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderingMode {
    /// Both scores over the x-sorted sequence; duplicates are rejected.
    Deterministic,
    /// Each score along its own axis; duplicates are collapsed by averaging
    /// the partner coordinate and zero gaps are dropped.
    Noisy,
}

impl std::fmt::Display for OrderingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OrderingMode::Deterministic => write!(f, "deterministic"),
            OrderingMode::Noisy => write!(f, "noisy"),
        }
    }
}

/// Inferred causal direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    XCausesY,
    YCausesX,
    Undecided,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Direction::XCausesY => write!(f, "X_causes_Y"),
            Direction::YCausesX => write!(f, "Y_causes_X"),
            Direction::Undecided => write!(f, "undecided"),
        }
    }
}

/// Direction decision with both scores and a confidence value.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalVerdict {
    pub score_xy: f64,
    pub score_yx: f64,
    pub direction: Direction,
    /// |score_xy - score_yx| / (|score_xy| + |score_yx| + eps), clipped to [0, 1].
    pub confidence: f64,
    pub method: Method,
    pub ordering: OrderingMode,
}

/// Affine rescaling of both axes to [0, 1]. Order-preserving and idempotent.
pub fn normalize(s: &SamplePair) -> Result<SamplePair> {
    let rescale = |values: &[f64], axis: &str| -> Result<Vec<f64>> {
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if hi <= lo {
            return Err(Error::DegenerateData(format!(
                "{axis} axis is constant at {lo}"
            )));
        }
        Ok(values.iter().map(|v| (v - lo) / (hi - lo)).collect())
    };
    SamplePair::new(rescale(s.xs(), "x")?, rescale(s.ys(), "y")?)
}

/// Mean log gap ratio along one axis: the empirical slope score of
/// the direction whose cause is `direction`.
///
/// Strict variant: any zero gap on either axis is an error. Sum is divided
/// by the number of gaps so scores are comparable across sample sizes.
pub fn igci_slope_score(s: &SamplePair, direction: Axis) -> Result<f64> {
    let pairs: Vec<(f64, f64)> = match direction {
        Axis::X => s.xs().iter().copied().zip(s.ys().iter().copied()).collect(),
        Axis::Y => s.pairs_sorted_by_y(),
    };
    let mut sum = 0.0;
    for (j, w) in pairs.windows(2).enumerate() {
        let d_along = w[1].0 - w[0].0;
        let d_partner = (w[1].1 - w[0].1).abs();
        if d_along <= 0.0 {
            return Err(Error::DegenerateData(format!(
                "zero gap along the sorted axis between observations {j} and {}",
                j + 1
            )));
        }
        if d_partner <= 0.0 {
            return Err(Error::DegenerateData(format!(
                "zero partner gap between observations {j} and {}",
                j + 1
            )));
        }
        sum += (d_partner / d_along).ln();
    }
    Ok(sum / (pairs.len() - 1) as f64)
}

/// Entropy-based score pair (C_xy, C_yx) = (H(y) - H(x), H(x) - H(y)) after
/// per-axis standardization; antisymmetric by construction.
pub fn igci_entropy_score(s: &SamplePair, reference: Reference) -> Result<(f64, f64)> {
    if s.n() < 10 {
        return Err(Error::InsufficientData {
            needed: 10,
            got: s.n(),
        });
    }
    let hx = differential_entropy_kl(&standardize(s.xs(), reference, "x")?)?;
    let hy = differential_entropy_kl(&standardize(s.ys(), reference, "y")?)?;
    Ok((hy - hx, hx - hy))
}

fn standardize(values: &[f64], reference: Reference, axis: &str) -> Result<Vec<f64>> {
    match reference {
        Reference::Uniform => {
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if hi <= lo {
                return Err(Error::DegenerateData(format!(
                    "{axis} axis is constant at {lo}"
                )));
            }
            Ok(values.iter().map(|v| (v - lo) / (hi - lo)).collect())
        }
        Reference::Gaussian => {
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            if var <= 0.0 {
                return Err(Error::DegenerateData(format!(
                    "{axis} axis has zero variance"
                )));
            }
            let std = var.sqrt();
            Ok(values.iter().map(|v| (v - mean) / std).collect())
        }
    }
}

/// Slope score over pairs sorted along the primary axis, with noisy-mode tie
/// handling: equal primary values are collapsed by averaging the partner
/// coordinate, and terms with a zero partner gap are dropped.
fn noisy_slope_score(pairs: &[(f64, f64)]) -> Result<f64> {
    let mut collapsed: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
    let mut i = 0;
    while i < pairs.len() {
        let mut j = i + 1;
        let mut partner_sum = pairs[i].1;
        while j < pairs.len() && pairs[j].0 == pairs[i].0 {
            partner_sum += pairs[j].1;
            j += 1;
        }
        collapsed.push((pairs[i].0, partner_sum / (j - i) as f64));
        i = j;
    }
    if collapsed.len() < 2 {
        return Err(Error::DegenerateData(
            "fewer than two distinct values along the sorted axis".into(),
        ));
    }
    let mut sum = 0.0;
    let mut kept = 0usize;
    for w in collapsed.windows(2) {
        let d_along = w[1].0 - w[0].0;
        let d_partner = (w[1].1 - w[0].1).abs();
        if d_partner > 0.0 {
            sum += (d_partner / d_along).ln();
            kept += 1;
        }
    }
    if kept == 0 {
        return Err(Error::DegenerateData(
            "all partner gaps vanish after tie collapsing".into(),
        ));
    }
    Ok(sum / kept as f64)
}

/// Run the inference rule on a sample pair.
///
/// Data is normalized internally, so the verdict is invariant under strictly
/// increasing affine transforms of either axis. The entropy method ignores
/// the ordering (no sequence structure enters the estimator).
pub fn infer_direction(
    s: &SamplePair,
    method: Method,
    ordering: OrderingMode,
) -> Result<CausalVerdict> {
    let s = normalize(s)?;
    let (score_xy, score_yx) = match method {
        Method::Slope => match ordering {
            OrderingMode::Deterministic => {
                if s.has_x_ties() {
                    return Err(Error::DegenerateData(
                        "duplicate x values: deterministic ordering assumes an invertible function"
                            .into(),
                    ));
                }
                if s.has_y_ties() {
                    return Err(Error::DegenerateData(
                        "duplicate y values: deterministic ordering assumes an invertible function"
                            .into(),
                    ));
                }
                // Both sides over the same x-sorted sequence (the orderings
                // coincide for monotone data), making the scores exact
                // negatives of each other.
                let pairs: Vec<(f64, f64)> =
                    s.xs().iter().copied().zip(s.ys().iter().copied()).collect();
                let mut sum_xy = 0.0;
                let mut sum_yx = 0.0;
                for (j, w) in pairs.windows(2).enumerate() {
                    let dx = w[1].0 - w[0].0;
                    let dy = (w[1].1 - w[0].1).abs();
                    if dx <= 0.0 || dy <= 0.0 {
                        return Err(Error::DegenerateData(format!(
                            "zero gap between observations {j} and {}",
                            j + 1
                        )));
                    }
                    sum_xy += (dy / dx).ln();
                    sum_yx += (dx / dy).ln();
                }
                let gaps = (pairs.len() - 1) as f64;
                (sum_xy / gaps, sum_yx / gaps)
            }
            OrderingMode::Noisy => {
                let by_x: Vec<(f64, f64)> =
                    s.xs().iter().copied().zip(s.ys().iter().copied()).collect();
                let by_y = s.pairs_sorted_by_y();
                (noisy_slope_score(&by_x)?, noisy_slope_score(&by_y)?)
            }
        },
        Method::Entropy(reference) => igci_entropy_score(&s, reference)?,
    };

    let gap = score_xy - score_yx;
    let direction = if gap < -TIE_EPSILON {
        Direction::XCausesY
    } else if gap > TIE_EPSILON {
        Direction::YCausesX
    } else {
        Direction::Undecided
    };
    let confidence =
        (gap.abs() / (score_xy.abs() + score_yx.abs() + CONFIDENCE_EPSILON)).clamp(0.0, 1.0);
    Ok(CausalVerdict {
        score_xy,
        score_yx,
        direction,
        confidence,
        method,
        ordering,
    })
}
