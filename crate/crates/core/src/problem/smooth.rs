//! Exact values and smoothed derivatives of the nonsmooth building blocks
//! (`|t|`, `sign`, `|p|`, `min`) used by the benchmark Hamiltonians.
//!
//! Function values stay exact. Only derivatives are regularized, with
//! radius [`SIGMA`], so that the linearization is defined at kinks.

use crate::grid::Vec2;

pub const SIGMA: f64 = 1e-12;

/// `sign(t)` with `sign(0) = 0`.
pub fn sign(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `t / sqrt(t² + σ²)`, the smoothed derivative of `|t|`.
pub fn d_abs(t: f64) -> f64 {
    t / t.hypot(SIGMA)
}

pub fn norm(p: Vec2) -> f64 {
    p[0].hypot(p[1])
}

/// `p / sqrt(|p|² + σ²)`, the smoothed gradient of `|p|`.
pub fn d_norm(p: Vec2) -> Vec2 {
    let n = norm(p).hypot(SIGMA);
    [p[0] / n, p[1] / n]
}

/// Weights `(w_a, w_b)` of a smooth selector for `min(a, b)`:
/// `∇min ≈ w_a ∇a + w_b ∇b`.
pub fn d_min(a: f64, b: f64) -> (f64, f64) {
    let d = a - b;
    let wa = 0.5 * (1.0 - d / d.hypot(SIGMA));
    (wa, 1.0 - wa)
}
