//! Frozen regression constants and the small independent oracles used to
//! produce or cross-check them.
//!
//! The helpers here evaluate entropies with the textbook formulas and find
//! roots by plain scans and bisection, without touching the stable
//! reformulations used in the library.

#![allow(dead_code)]

/// `ln 3 - h_3(0.1)`: value of the curve at full rate, n = 3, α = 0.1.
/// Closed form, also reached by the identity representation.
pub const PHI_FULL_RATE_3_01: f64 = 0.4595804290;

/// `h_3(0.1)`, the entropy of a row of `H_{3,0.1}`.
pub const H3_01: f64 = 0.6390318597;

/// `φ(0.5·ln 3)` for n = 3, α = 0.1. Frozen 2026-10-19 from the ray scan of
/// the 1/400 simplex grid (`phi_bruteforce`, default config), which agreed
/// with the closed form to 1e-15.
pub const PHI_HALF_LOG3_3_01: f64 = 0.2622184989;

/// Inflection crossover for n = 3, α = 0.1. Frozen 2026-10-19 from
/// [`sign_scan_root`] of [`eta_direct`] over a 10^6-point β grid.
pub const BETA_S_3_01: f64 = 0.2606370881;
/// `ln 3 - h_3(β_s)`.
pub const R_S_3_01: f64 = 0.04505083709;

/// Tangent crossover and rate for n = 3, α = 0.1. Frozen 2026-10-19 from
/// `critical`; the hull of 400 sampled φ values puts the first vertex at
/// 0.07965 (within one rate spacing) and [`tangent_rate_by_ratio`] agrees
/// to 1e-8.
pub const BETA_C_3_01: f64 = 0.2356784495;
pub const R_C_3_01: f64 = 0.08038715572;
pub const ENVELOPE_SLOPE_3_01: f64 = 0.4966830417;

/// `ln(3/2)`: IB at full rate for n = 3, α = 1/2.
pub const LOG_THREE_HALVES: f64 = 0.4054651081;

/// Regression lower bound on `φ̄(R) - best |T| = 3` at n = 3, α = 0.1,
/// R = R_c/2. Measured 2026-10-19 as 1.646522e-5 with seed 1, 64
/// restarts, 4000 iterations; the same value to 7 digits with seed 7 and
/// 256 restarts, and with 20000 iterations.
pub const TIGHTNESS_GAP_MEASURED_3_01: f64 = 1.646522e-5;
pub const TIGHTNESS_GAP_LOWER_BOUND_3_01: f64 = 1.6e-5;

/// Largest `|best grid point - φ|` over 20 rates, n = 3, α = 0.1, plain 1/400
/// grid (no ray refinement), in units of the grid spacing. Calibrated
/// 2026-10-19 at 0.80.
pub const PLAIN_GRID_ERROR_CONSTANT: f64 = 1.0;

pub fn h_direct(n: usize, q: f64) -> f64 {
    let m = (n - 1) as f64;
    let diag = 1.0 - m * q;
    let xlogx = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
    -xlogx(diag) - m * xlogx(q)
}

/// `β ∈ [0, 1/n]` with `h_n(β) = ln n - r`, by bisection on [`h_direct`].
pub fn beta_direct(n: usize, r: f64) -> f64 {
    let target = (n as f64).ln() - r;
    let (mut lo, mut hi) = (0.0, 1.0 / n as f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h_direct(n, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn gamma_direct(n: usize, alpha: f64, beta: f64) -> f64 {
    // Off-diagonal entry of H_{n,α} H_{n,β}: one symbol kept by one channel
    // and moved by the other, or moved by both to the same place.
    let m = (n - 1) as f64;
    let (ka, kb) = (1.0 - m * alpha, 1.0 - m * beta);
    ka * beta + alpha * kb + (m - 1.0) * alpha * beta
}

pub fn phi_direct(n: usize, alpha: f64, r: f64) -> f64 {
    let g = gamma_direct(n, alpha, beta_direct(n, r));
    (n as f64).ln() - h_direct(n, g)
}

pub fn eta_direct(n: usize, alpha: f64, beta: f64) -> f64 {
    let m = (n - 1) as f64;
    let c = 1.0 - n as f64 * alpha;
    let g = alpha + c * beta;
    let term = |x: f64| x * (1.0 - m * x) * (x / (1.0 - m * x)).ln();
    c * term(g) - c * c * term(beta)
}

/// Midpoint of the first sign change of `f` over `points` equally spaced
/// values of `(lo, hi)`.
pub fn sign_scan_root(f: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> Option<f64> {
    let step = (hi - lo) / (points + 1) as f64;
    let mut prev = (lo + step, f(lo + step));
    for i in 2..=points {
        let x = lo + step * i as f64;
        let v = f(x);
        if (prev.1 < 0.0) != (v < 0.0) {
            return Some(0.5 * (prev.0 + x));
        }
        prev = (x, v);
    }
    None
}

/// The tangent rate as the maximizer of `φ(R)/R`: a line from the origin
/// touching the curve has the largest slope among all chords from the
/// origin. Coarse scan, then golden-section refinement.
pub fn tangent_rate_by_ratio(n: usize, alpha: f64) -> f64 {
    let log_n = (n as f64).ln();
    let ratio = |r: f64| phi_direct(n, alpha, r) / r;
    let k = 4000;
    let (best, _) = (1..k)
        .map(|i| log_n * i as f64 / k as f64)
        .map(|r| (r, ratio(r)))
        .fold((0.0, f64::MIN), |acc, x| if x.1 > acc.1 { x } else { acc });
    let (mut a, mut b) = (best - log_n / k as f64, best + log_n / k as f64);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if ratio(c) > ratio(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

/// Centered second difference of `f` at `x`.
pub fn second_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(a.abs())
}
