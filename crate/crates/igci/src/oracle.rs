//! Independent reference implementations for the verification suites.
//!
//! Nothing in this module is used by the production code paths; the point is
//! that a value computed here reaches the same answer through different
//! arithmetic than the library routines it is checked against.

/// Number of midpoint nodes used by the reference quadrature.
pub const MIDPOINT_NODES: usize = 1_000_000;

/// Midpoint-rule quadrature of `f` over [lo, hi].
///
/// This is the reference integrator for every integral assertion in the test
/// suites: 10^6 nodes keep the error for the piecewise-smooth integrands in
/// this crate well below 1e-7.
pub fn integrate_midpoint(f: impl Fn(f64) -> f64, lo: f64, hi: f64, nodes: usize) -> f64 {
    assert!(nodes > 0 && hi > lo);
    let h = (hi - lo) / nodes as f64;
    let mut acc = 0.0;
    for i in 0..nodes {
        let x = lo + (i as f64 + 0.5) * h;
        acc += f(x);
    }
    acc * h
}
