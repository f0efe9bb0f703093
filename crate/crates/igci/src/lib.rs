//! Information-geometric causal inference for bivariate data.
//!
//! Given paired observations of two variables related by a monotone
//! mechanism, this crate decides which variable is the cause by comparing
//! slope-weighted (or entropy-based) scores in the two directions, and ships
//! the three constructions that justify the decision rule:
//!
//! - [`typicality`]: per-sample log-Jacobian scores and the Markov tail
//!   bound showing that large scores mark untypical observations;
//! - [`counting`]: exact counting of monotone grid functions, the two
//!   generative-model likelihoods, and their continuum limit, which
//!   reproduces the empirical score;
//! - [`learning`]: unsupervised and semi-supervised prediction of the cause
//!   from the effect, with entropy-conservation error bounds.
//!
//! [`density`] provides the numerical substrate (grid densities and
//! piecewise-linear monotone bijections); [`synth`] generates reproducible
//! random mechanisms, densities, and samples for the verification suites.

pub mod counting;
pub mod density;
pub mod error;
pub mod inference;
pub mod learning;
pub mod oracle;
pub mod rng;
pub mod synth;
pub mod typicality;

pub use density::{
    cdf, differential_entropy_kl, kl_divergence, log_slope_covariance, pushforward, GridDensity,
    MonotoneMap, SamplePair,
};
pub use error::{Error, Result};
pub use inference::{
    igci_entropy_score, igci_slope_score, infer_direction, normalize, CausalVerdict, Direction,
    Method, OrderingMode, Reference,
};

/// Which variable plays the role of the (hypothesized) cause in a score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}
