//! The n-ary Hamming channel family and its row-entropy function.
//!
//! `H_{n,α}` keeps the input with probability `1 - (n-1)α` and moves it to
//! each of the other `n - 1` symbols with probability `α`. The entropy of a
//! row is
//!
//! ```text
//! h_n(q) = -(1 - (n-1)q) ln(1 - (n-1)q) - (n-1) q ln q,   q ∈ [0, 1/(n-1)]
//! ```
//!
//! which increases strictly on `[0, 1/n]` and decreases on `[1/n, 1/(n-1)]`.
//! Most of the crate works with the *entropy deficit* `ln n - h_n(q)` rather
//! than `h_n` itself: near `q = 1/n` the deficit is tiny and evaluating it
//! directly keeps full relative precision.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::prob::{Channel, Distribution};

/// Distance below which a crossover is considered to be exactly an extreme
/// value (`0`, `1/n` or `1/(n-1)`).
pub const EXTREME_TOL: f64 = 1e-15;

/// Distance from an extreme value inside which curvature-dependent
/// quantities are refused: they degenerate numerically there.
pub const NEAR_EXTREME_TOL: f64 = 1e-7;

/// Slack accepted on crossover and entropy arguments before clamping.
pub const CLAMP_SLACK: f64 = 1e-12;

/// The qualitatively different crossover values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Extreme {
    /// `α = 0`: `Y = X`.
    Noiseless,
    /// `α = 1/n`: `Y` is independent of `X`.
    Independent,
    /// `α = 1/(n-1)`: `Y` is uniform over the symbols other than `X`.
    MaximalCrossover,
}

/// Alphabet size and crossover probability of a Hamming channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HammingParams {
    n: usize,
    alpha: f64,
}

impl HammingParams {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "alphabet size must be at least 2, got {n}"
            )));
        }
        let max = 1.0 / (n - 1) as f64;
        if !alpha.is_finite() || alpha < 0.0 || alpha > max + EXTREME_TOL {
            return Err(Error::InvalidParameter(format!(
                "crossover must lie in [0, 1/(n-1)] = [0, {max}], got {alpha}"
            )));
        }
        Ok(Self {
            n,
            alpha: alpha.min(max),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn log_n(&self) -> f64 {
        (self.n as f64).ln()
    }

    fn extreme_values(&self) -> [(Extreme, f64); 3] {
        let n = self.n as f64;
        [
            (Extreme::Noiseless, 0.0),
            (Extreme::Independent, 1.0 / n),
            (Extreme::MaximalCrossover, 1.0 / (n - 1.0)),
        ]
    }

    /// Which extreme case `α` sits on, if any.
    pub fn extreme(&self) -> Option<Extreme> {
        self.extreme_values()
            .into_iter()
            .find(|(_, v)| (self.alpha - v).abs() <= EXTREME_TOL)
            .map(|(e, _)| e)
    }

    /// `α ∉ {0, 1/n, 1/(n-1)}`.
    pub fn is_regular(&self) -> bool {
        self.extreme().is_none()
    }

    /// Regular, but within [`NEAR_EXTREME_TOL`] of an extreme value.
    pub fn is_near_extreme(&self) -> bool {
        self.is_regular()
            && self
                .extreme_values()
                .iter()
                .any(|(_, v)| (self.alpha - v).abs() < NEAR_EXTREME_TOL)
    }

    /// `1 - nα`, the contraction factor of the crossover composition rule.
    pub(crate) fn contraction(&self) -> f64 {
        1.0 - self.n as f64 * self.alpha
    }

    /// Fails unless `α` is regular and comfortably away from the extremes.
    pub(crate) fn require_regular(&self) -> Result<()> {
        if let Some(e) = self.extreme() {
            return Err(Error::Inapplicable(format!(
                "crossover {} is the extreme case {e:?}",
                self.alpha
            )));
        }
        if self.is_near_extreme() {
            return Err(Error::Inapplicable(format!(
                "crossover {} is within {NEAR_EXTREME_TOL:e} of an extreme value; \
                 use the exact extreme value instead",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// The `n × n` Hamming channel with the given crossover.
pub fn hamming_channel(p: &HammingParams) -> Result<Channel> {
    hamming_matrix(p.n, p.alpha)
}

pub(crate) fn hamming_matrix(n: usize, q: f64) -> Result<Channel> {
    let diag = 1.0 - (n - 1) as f64 * q;
    let rows = (0..n)
        .map(|x| {
            let row = (0..n).map(|y| if x == y { diag } else { q }).collect();
            Distribution::new(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Channel::from_rows(rows)
}

fn check_crossover(n: usize, q: f64, upper: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "alphabet size must be at least 2, got {n}"
        )));
    }
    if !q.is_finite() || q < -CLAMP_SLACK || q > upper + CLAMP_SLACK {
        return Err(Error::OutOfRange(format!(
            "crossover {q} outside [0, {upper}]"
        )));
    }
    Ok(q.clamp(0.0, upper))
}

/// Row entropy `h_n(q)` of `H_{n,q}` in nats, for `q ∈ [0, 1/(n-1)]`.
pub fn h_n(n: usize, q: f64) -> Result<f64> {
    let q = check_crossover(n, q, 1.0 / (n - 1) as f64)?;
    let m = (n - 1) as f64;
    let diag = 1.0 - m * q;
    let xlogx = |x: f64| if x <= 0.0 { 0.0 } else { x * x.ln() };
    Ok(-xlogx(diag) - m * xlogx(q))
}

/// `a · ln(1 + x)` with `0 · ln 0 = 0`.
fn scaled_ln1p(a: f64, x: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * x.ln_1p()
    }
}

/// `ln n - h_n(q)`, the relative entropy of a Hamming row from uniform.
///
/// No range checks; `q` must lie in `[0, 1/(n-1)]`.
pub fn entropy_deficit(n: usize, q: f64) -> f64 {
    let nf = n as f64;
    let m = nf - 1.0;
    // u = nq - 1, so n(1 - (n-1)q) = 1 - (n-1)u and nq = 1 + u.
    let u = nf * q - 1.0;
    if u.abs() * m < 0.5 {
        let d = (scaled_ln1p(1.0 - m * u, -m * u) + scaled_ln1p(m * (1.0 + u), u)) / nf;
        d.max(0.0)
    } else {
        let diag = 1.0 - m * q;
        let on = if diag <= 0.0 {
            0.0
        } else {
            diag * (nf * diag).ln()
        };
        let off = if q == 0.0 { 0.0 } else { m * q * (nf * q).ln() };
        on + off
    }
}

/// `ln(q / (1 - (n-1)q))`; `-dh_n/dq = (n-1)` times this.
pub fn log_odds(n: usize, q: f64) -> f64 {
    let nf = n as f64;
    let m = nf - 1.0;
    let u = nf * q - 1.0;
    if u.abs() * m < 0.5 {
        u.ln_1p() - (-m * u).ln_1p()
    } else {
        q.ln() - (1.0 - m * q).ln()
    }
}

/// Crossover `β ∈ [0, 1/n]` whose Hamming row has entropy deficit `rate`,
/// i.e. `h_n^{-1}(ln n - rate)` evaluated without forming `ln n - rate`.
pub fn crossover_for_rate(n: usize, rate: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "alphabet size must be at least 2, got {n}"
        )));
    }
    let log_n = (n as f64).ln();
    if !rate.is_finite() || rate < -CLAMP_SLACK || rate > log_n + CLAMP_SLACK {
        return Err(Error::OutOfRange(format!(
            "rate {rate} outside [0, ln {n}]"
        )));
    }
    let rate = rate.clamp(0.0, log_n);
    let top = 1.0 / n as f64;
    if rate == 0.0 {
        return Ok(top);
    }
    if rate == log_n {
        return Ok(0.0);
    }

    // The deficit decreases strictly on [0, 1/n].
    let (mut lo, mut hi) = (0.0_f64, top);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if entropy_deficit(n, mid) > rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let residual = |q: f64| entropy_deficit(n, q) - rate;
    let mut best = if residual(lo).abs() <= residual(hi).abs() {
        lo
    } else {
        hi
    };
    for _ in 0..2 {
        let slope = (n - 1) as f64 * log_odds(n, best);
        if !slope.is_finite() || slope == 0.0 {
            break;
        }
        let next = best - residual(best) / slope;
        if next >= 0.0 && next <= top && residual(next).abs() < residual(best).abs() {
            best = next;
        } else {
            break;
        }
    }
    Ok(best)
}

/// Inverse of `h_n` on its increasing branch: `v ∈ [0, ln n] → q ∈ [0, 1/n]`.
pub fn h_n_inverse(n: usize, v: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "alphabet size must be at least 2, got {n}"
        )));
    }
    let log_n = (n as f64).ln();
    if !v.is_finite() || v < -CLAMP_SLACK || v > log_n + CLAMP_SLACK {
        return Err(Error::OutOfRange(format!(
            "entropy {v} outside [0, ln {n}]"
        )));
    }
    let v = v.clamp(0.0, log_n);
    if v == 0.0 {
        return Ok(0.0);
    }
    if v == log_n {
        return Ok(1.0 / n as f64);
    }
    crossover_for_rate(n, log_n - v)
}

/// Crossover of `H_{n,β}` followed by `H_{n,α}`: `γ = α + (1 - nα)β`.
pub fn gamma_compose(p: &HammingParams, beta: f64) -> Result<f64> {
    let beta = check_crossover(p.n, beta, 1.0 / p.n as f64)?;
    Ok(compose_crossover(p, beta))
}

#[inline]
pub(crate) fn compose_crossover(p: &HammingParams, beta: f64) -> f64 {
    p.alpha + p.contraction() * beta
}
