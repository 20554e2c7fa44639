//! The output-entropy deficit curve `φ(R)` of a Hamming channel under a
//! uniform input, its concave envelope `φ̄`, and the information bottleneck
//! curve that the envelope describes.
//!
//! Every point of the curve is parametrized by the crossover
//! `β = h_n^{-1}(ln n - R) ∈ [0, 1/n]`:
//!
//! ```text
//! R     = ln n - h_n(β)
//! γ     = α + (1 - nα) β
//! φ(R)  = ln n - h_n(γ)
//! dφ/dR = (1 - nα) ln(γ / (1-(n-1)γ)) / ln(β / (1-(n-1)β))
//! ```
//!
//! The map `β ↦ R` is strictly decreasing, so root-finding in `R` is done by
//! bisection on `β`, which avoids an entropy inversion per probe.
//!
//! For `n ≥ 3` and a regular crossover, `φ` is strictly convex on `(0, R_s)`
//! and strictly concave on `(R_s, ln n)`. Its concave envelope is the chord
//! from the origin to the tangent point `R_c > R_s` followed by `φ` itself.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamming::{
    compose_crossover, crossover_for_rate, entropy_deficit, log_odds, Extreme, HammingParams,
    CLAMP_SLACK,
};

/// Number of interior points on which the sign pattern of `η` is checked
/// after locating the inflection.
const SIGN_CHECK_POINTS: usize = 256;

/// One evaluated point of the `φ` / `φ̄` curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub r: f64,
    pub beta: f64,
    pub gamma: f64,
    pub phi: f64,
    pub phi_bar: f64,
    /// `dφ/dR`; `None` at `R = 0`, where the slope quotient degenerates, and
    /// for extreme crossovers.
    pub slope: Option<f64>,
}

/// Inflection and tangent rates of `φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPoints {
    pub r_s: f64,
    pub beta_s: f64,
    pub r_c: f64,
    pub beta_c: f64,
    /// Slope `φ(R_c)/R_c` of the linear part of the envelope.
    pub envelope_slope: f64,
}

impl CriticalPoints {
    /// `φ(R_c)`, the value at the end of the linear segment.
    pub fn phi_c(&self) -> f64 {
        self.envelope_slope * self.r_c
    }
}

fn check_rate(p: &HammingParams, r: f64) -> Result<f64> {
    let log_n = p.log_n();
    if !r.is_finite() || r < -CLAMP_SLACK || r > log_n + CLAMP_SLACK {
        return Err(Error::OutOfRange(format!(
            "rate {r} outside [0, ln {}] = [0, {log_n}]",
            p.n()
        )));
    }
    Ok(r.clamp(0.0, log_n))
}

fn phi_at_beta(p: &HammingParams, beta: f64) -> f64 {
    entropy_deficit(p.n(), compose_crossover(p, beta))
}

fn rate_at_beta(p: &HammingParams, beta: f64) -> f64 {
    entropy_deficit(p.n(), beta)
}

fn slope_at_beta(p: &HammingParams, beta: f64) -> Result<f64> {
    if beta == 0.0 {
        return Ok(0.0);
    }
    let denom = log_odds(p.n(), beta);
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::DegenerateSlope);
    }
    let gamma = compose_crossover(p, beta);
    Ok(p.contraction() * log_odds(p.n(), gamma) / denom)
}

fn eta_at_beta(p: &HammingParams, beta: f64) -> f64 {
    let n = p.n();
    let m = (n - 1) as f64;
    let c = p.contraction();
    let gamma = compose_crossover(p, beta);
    let gamma_term = c * gamma * (1.0 - m * gamma) * log_odds(n, gamma);
    let beta_term = if beta == 0.0 {
        0.0
    } else {
        c * c * beta * (1.0 - m * beta) * log_odds(n, beta)
    };
    gamma_term - beta_term
}

/// `φ(R) = ln n - h_n(γ)` with `γ = α + (1 - nα) h_n^{-1}(ln n - R)`.
///
/// Defined for every valid crossover, including the extreme ones.
pub fn phi(p: &HammingParams, r: f64) -> Result<f64> {
    let r = check_rate(p, r)?;
    let beta = crossover_for_rate(p.n(), r)?;
    Ok(phi_at_beta(p, beta))
}

/// Closed-form `dφ/dR` for a regular crossover, `R ∈ (0, ln n]`.
pub fn phi_slope(p: &HammingParams, r: f64) -> Result<f64> {
    p.require_regular()?;
    let r = check_rate(p, r)?;
    if r == 0.0 {
        return Err(Error::DegenerateSlope);
    }
    slope_at_beta(p, crossover_for_rate(p.n(), r)?)
}

/// `η(β)`, whose sign is the sign of `d²φ/dR²` at the rate belonging to `β`.
pub fn eta(p: &HammingParams, beta: f64) -> Result<f64> {
    p.require_regular()?;
    let top = 1.0 / p.n() as f64;
    if !(beta > 0.0 && beta < top) {
        return Err(Error::OutOfRange(format!("β = {beta} outside (0, {top})")));
    }
    Ok(eta_at_beta(p, beta))
}

/// `d³η/dβ³`, positive on `(0, 1/n)` for every regular crossover.
pub fn eta_third_derivative(p: &HammingParams, beta: f64) -> Result<f64> {
    p.require_regular()?;
    let top = 1.0 / p.n() as f64;
    if !(beta > 0.0 && beta < top) {
        return Err(Error::OutOfRange(format!("β = {beta} outside (0, {top})")));
    }
    let m = (p.n() - 1) as f64;
    let c = p.contraction();
    let gamma = compose_crossover(p, beta);
    let b = beta * (1.0 - m * beta);
    let g = gamma * (1.0 - m * gamma);
    Ok(c * c / (b * b) - c.powi(4) / (g * g))
}

fn require_kinked(p: &HammingParams, what: &str) -> Result<()> {
    if p.n() == 2 {
        return Err(Error::Inapplicable(format!(
            "{what}: φ is concave for n = 2"
        )));
    }
    p.require_regular()
}

/// Largest `x` in `[lo, hi]` (up to float resolution) with `pred(x) == false`,
/// given `pred(lo) == false` and `pred(hi) == true` for a monotone `pred`.
fn bisect<F: Fn(f64) -> bool>(mut lo: f64, mut hi: f64, pred: F) -> (f64, f64) {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return (lo, hi);
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

/// The unique rate `R_s ∈ (0, ln n)` where `φ` turns from convex to concave,
/// together with its crossover `β_s`.
pub fn inflection_point(p: &HammingParams) -> Result<(f64, f64)> {
    require_kinked(p, "no inflection")?;
    let top = 1.0 / p.n() as f64;
    let eta = |b: f64| eta_at_beta(p, b);
    if eta(0.0) >= 0.0 {
        return Err(Error::Numerical(format!(
            "η(0) = {} is not negative",
            eta(0.0)
        )));
    }
    // η vanishes at 1/n and is positive just below it.
    let hi = (1..=60)
        .map(|k| top * (1.0 - 0.5f64.powi(k)))
        .find(|&b| eta(b) > 0.0)
        .ok_or_else(|| Error::Numerical("no positive η found below 1/n".into()))?;
    let (lo, hi) = bisect(0.0, hi, |b| eta(b) > 0.0);
    let beta_s = if eta(lo).abs() <= eta(hi).abs() {
        lo
    } else {
        hi
    };

    for i in 1..SIGN_CHECK_POINTS {
        let b = top * i as f64 / SIGN_CHECK_POINTS as f64;
        let margin = 1e-6 * top;
        let v = eta(b);
        if (b < beta_s - margin && v >= 0.0) || (b > beta_s + margin && v <= 0.0) {
            return Err(Error::Numerical(format!(
                "η has the wrong sign at β = {b} (β_s = {beta_s})"
            )));
        }
    }
    Ok((rate_at_beta(p, beta_s), beta_s))
}

/// Inflection rate and the tangent rate `R_c` where `dφ/dR = φ/R`.
///
/// `R·dφ/dR - φ` decreases strictly in `R` on `(R_s, ln n)`, equivalently
/// increases in `β` on `(0, β_s)`, so bisection on `β` isolates the root.
pub fn critical_rate(p: &HammingParams) -> Result<CriticalPoints> {
    require_kinked(p, "R_c does not exist; IB = φ")?;
    let (r_s, beta_s) = inflection_point(p)?;
    let excess = |b: f64| -> Result<f64> {
        Ok(rate_at_beta(p, b) * slope_at_beta(p, b)? - phi_at_beta(p, b))
    };
    if excess(0.0)? >= 0.0 || excess(beta_s)? <= 0.0 {
        return Err(Error::Numerical(format!(
            "tangent condition not bracketed on [0, β_s = {beta_s}]"
        )));
    }
    let (lo, hi) = bisect(0.0, beta_s, |b| excess(b).map(|v| v > 0.0).unwrap_or(true));
    let beta_c = if excess(lo)?.abs() <= excess(hi)?.abs() {
        lo
    } else {
        hi
    };
    let r_c = rate_at_beta(p, beta_c);
    Ok(CriticalPoints {
        r_s,
        beta_s,
        r_c,
        beta_c,
        envelope_slope: phi_at_beta(p, beta_c) / r_c,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    /// Regular crossover with `n ≥ 3`: linear segment, then `φ`.
    Kinked(CriticalPoints),
    /// Regular crossover with `n = 2`: `φ` is already concave.
    Concave,
    Extreme(Extreme),
}

/// The information bottleneck curve of `H_{n,α}` with a uniform input.
///
/// Holds the critical points so repeated evaluations do not redo the root
/// finding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IbCurve {
    params: HammingParams,
    shape: Shape,
}

impl IbCurve {
    pub fn new(p: &HammingParams) -> Result<Self> {
        let shape = match p.extreme() {
            Some(e) => Shape::Extreme(e),
            None => {
                p.require_regular()?;
                if p.n() == 2 {
                    Shape::Concave
                } else {
                    Shape::Kinked(critical_rate(p)?)
                }
            }
        };
        Ok(Self { params: *p, shape })
    }

    pub fn params(&self) -> &HammingParams {
        &self.params
    }

    pub fn critical_points(&self) -> Option<&CriticalPoints> {
        match &self.shape {
            Shape::Kinked(c) => Some(c),
            _ => None,
        }
    }

    pub fn phi(&self, r: f64) -> Result<f64> {
        phi(&self.params, r)
    }

    /// `φ̄(R)`: the chord `(φ(R_c)/R_c)·R` on `[0, R_c]`, then `φ`.
    pub fn envelope(&self, r: f64) -> Result<f64> {
        let Shape::Kinked(c) = self.shape else {
            return Err(Error::Inapplicable(
                "the envelope has a linear segment only for n ≥ 3 and regular α".into(),
            ));
        };
        let r = check_rate(&self.params, r)?;
        if r <= c.r_c {
            Ok(c.envelope_slope * r)
        } else {
            phi(&self.params, r)
        }
    }

    /// `IB(R)` for every valid crossover.
    pub fn ib_value(&self, r: f64) -> Result<f64> {
        let r = check_rate(&self.params, r)?;
        match self.shape {
            Shape::Kinked(_) => self.envelope(r),
            Shape::Concave => phi(&self.params, r),
            Shape::Extreme(Extreme::Noiseless) => Ok(r),
            Shape::Extreme(Extreme::Independent) => Ok(0.0),
            Shape::Extreme(Extreme::MaximalCrossover) => {
                Ok(maximal_crossover_slope(self.params.n()) * r)
            }
        }
    }

    pub fn point(&self, r: f64) -> Result<CurvePoint> {
        let p = &self.params;
        let r = check_rate(p, r)?;
        let beta = crossover_for_rate(p.n(), r)?;
        let slope = match self.shape {
            Shape::Extreme(_) => None,
            _ if r == 0.0 => None,
            _ => Some(slope_at_beta(p, beta)?),
        };
        Ok(CurvePoint {
            r,
            beta,
            gamma: compose_crossover(p, beta),
            phi: phi_at_beta(p, beta),
            phi_bar: self.ib_value(r)?,
            slope,
        })
    }

    /// One [`CurvePoint`] per grid rate; the grid must be sorted and lie in
    /// `[0, ln n]`. Points are evaluated in parallel; each is independent,
    /// so the result does not depend on scheduling.
    pub fn sample(&self, grid: &[f64]) -> Result<Vec<CurvePoint>> {
        if let Some(w) = grid.windows(2).find(|w| !(w[0] <= w[1])) {
            return Err(Error::InvalidParameter(format!(
                "rate grid is not sorted ({} before {})",
                w[0], w[1]
            )));
        }
        grid.par_iter().map(|&r| self.point(r)).collect()
    }
}

/// Slope `ln(n/(n-1)) / ln n` of the (linear) curve at `α = 1/(n-1)`.
pub fn maximal_crossover_slope(n: usize) -> f64 {
    let nf = n as f64;
    (nf / (nf - 1.0)).ln() / nf.ln()
}

/// `φ̄(R)` for `n ≥ 3` and a regular crossover.
pub fn phi_envelope(p: &HammingParams, r: f64) -> Result<f64> {
    require_kinked(p, "R_c does not exist; IB = φ")?;
    IbCurve::new(p)?.envelope(r)
}

/// `IB(R)` for a uniform input through `H_{n,α}`, any valid `α` and `n ≥ 2`.
pub fn ib_value(p: &HammingParams, r: f64) -> Result<f64> {
    IbCurve::new(p)?.ib_value(r)
}

pub fn sample_curve(p: &HammingParams, grid: &[f64]) -> Result<Vec<CurvePoint>> {
    IbCurve::new(p)?.sample(grid)
}

/// `n_points` equally spaced rates covering `[0, ln n]`.
pub fn uniform_rate_grid(p: &HammingParams, n_points: usize) -> Vec<f64> {
    let log_n = p.log_n();
    match n_points {
        0 => Vec::new(),
        1 => vec![0.0],
        k => (0..k)
            .map(|i| {
                if i == k - 1 {
                    log_n
                } else {
                    log_n * i as f64 / (k - 1) as f64
                }
            })
            .collect(),
    }
}

/// Position of the tangent point and size of the gap between `φ` and `φ̄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapSummary {
    /// `R_c / ln n`.
    pub rc_over_logn: f64,
    /// `max (φ̄ - φ)/φ̄` over an interior grid of `(0, R_c)`.
    pub max_rel_diff: f64,
}

/// Summarizes the linear part of the envelope on `points` interior rates.
pub fn envelope_gap(p: &HammingParams, points: usize) -> Result<GapSummary> {
    let crit = critical_rate(p)?;
    let mut max_rel: f64 = 0.0;
    for i in 1..=points {
        let r = crit.r_c * i as f64 / (points + 1) as f64;
        let bar = crit.envelope_slope * r;
        let rel = (bar - phi(p, r)?) / bar;
        max_rel = max_rel.max(rel);
    }
    Ok(GapSummary {
        rc_over_logn: crit.r_c / p.log_n(),
        max_rel_diff: max_rel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamming::h_n;

    fn params(n: usize, alpha: f64) -> HammingParams {
        HammingParams::new(n, alpha).unwrap()
    }

    #[test]
    fn phi_endpoints() {
        let p = params(3, 0.1);
        assert_eq!(phi(&p, 0.0).unwrap(), 0.0);
        let top = phi(&p, 3f64.ln()).unwrap();
        assert!((top - (3f64.ln() - h_n(3, 0.1).unwrap())).abs() < 1e-15);
        assert!((top - 0.4595804).abs() < 5e-8);
        assert!(phi(&p, 1.2).is_err());
        assert!(phi(&p, -0.1).is_err());
    }

    #[test]
    fn slope_endpoints_and_errors() {
        let p = params(3, 0.1);
        assert_eq!(phi_slope(&p, 3f64.ln()).unwrap(), 0.0);
        assert_eq!(phi_slope(&p, 0.0), Err(Error::DegenerateSlope));
        assert!(phi_slope(&params(3, 0.5), 0.5).is_err());
        let s = phi_slope(&p, 0.5).unwrap();
        assert!(s > 0.0);
    }

    #[test]
    fn slope_matches_finite_difference() {
        let p = params(3, 0.1);
        let r = 0.9 * 3f64.ln();
        let h = 1e-6;
        let fd = (phi(&p, r + h).unwrap() - phi(&p, r - h).unwrap()) / (2.0 * h);
        assert!((phi_slope(&p, r).unwrap() - fd).abs() < 1e-6);
    }

    #[test]
    fn eta_limits() {
        let p = params(3, 0.1);
        let top = 1.0 / 3.0;
        assert!(eta(&p, top - 1e-9).unwrap().abs() < 1e-12);
        let near_zero = eta(&p, 1e-14).unwrap();
        let limit = p.contraction() * 0.1 * 0.8 * (0.1f64 / 0.8).ln();
        assert!(limit < 0.0);
        assert!((near_zero - limit).abs() < 1e-10);
        assert!(eta(&p, 0.0).is_err());
        assert!(eta(&p, top).is_err());
        for alpha in [0.05, 0.1, 0.3, 0.45, 0.6, 0.9] {
            assert!(eta(&params(2, alpha), 0.2).unwrap() < 0.0, "α = {alpha}");
        }
    }

    #[test]
    fn inflection_brackets_sign_change() {
        let p = params(3, 0.1);
        let (r_s, beta_s) = inflection_point(&p).unwrap();
        assert!(eta(&p, beta_s - 1e-4).unwrap() < 0.0);
        assert!(eta(&p, beta_s + 1e-4).unwrap() > 0.0);
        assert!(r_s > 0.0 && r_s < 3f64.ln());
        assert!(matches!(
            inflection_point(&params(2, 0.1)),
            Err(Error::Inapplicable(_))
        ));
    }

    #[test]
    fn critical_rate_tangency() {
        for (n, alpha) in [(3, 0.1), (3, 0.45), (4, 0.05), (5, 0.15), (6, 0.15)] {
            let p = params(n, alpha);
            let c = critical_rate(&p).unwrap();
            assert!(0.0 < c.r_s && c.r_s < c.r_c && c.r_c < p.log_n());
            let slope = phi_slope(&p, c.r_c).unwrap();
            let chord = phi(&p, c.r_c).unwrap() / c.r_c;
            assert!((slope - chord).abs() <= 1e-10, "n={n} α={alpha}");
            assert!((chord - c.envelope_slope).abs() <= 1e-12);
        }
        assert!(matches!(
            critical_rate(&params(2, 0.1)),
            Err(Error::Inapplicable(_))
        ));
        assert!(matches!(
            critical_rate(&params(3, 1.0 / 3.0)),
            Err(Error::Inapplicable(_))
        ));
    }

    #[test]
    fn envelope_examples() {
        let p = params(3, 0.1);
        let c = critical_rate(&p).unwrap();
        assert_eq!(phi_envelope(&p, 0.0).unwrap(), 0.0);
        let at_c = phi_envelope(&p, c.r_c).unwrap();
        assert!((at_c - phi(&p, c.r_c).unwrap()).abs() < 1e-12);
        let half = phi_envelope(&p, c.r_c / 2.0).unwrap();
        assert!((half - c.phi_c() / 2.0).abs() < 1e-15);
        assert!(half > phi(&p, c.r_c / 2.0).unwrap());
    }

    #[test]
    fn extreme_ib_values() {
        let ln3 = 3f64.ln();
        assert_eq!(ib_value(&params(3, 1.0 / 3.0), 0.7).unwrap(), 0.0);
        assert_eq!(ib_value(&params(3, 0.0), 0.5).unwrap(), 0.5);
        let v = ib_value(&params(3, 0.5), ln3).unwrap();
        assert!((v - 1.5f64.ln()).abs() < 1e-15);
        assert!((v - 0.4054651).abs() < 5e-8);
        assert!((maximal_crossover_slope(3) - 0.3691).abs() < 5e-5);
    }

    #[test]
    fn binary_ib_is_phi() {
        let p = params(2, 0.1);
        for r in [0.0, 0.1, 0.4, 2f64.ln()] {
            assert_eq!(ib_value(&p, r).unwrap(), phi(&p, r).unwrap());
        }
    }

    #[test]
    fn near_extreme_rejected() {
        let p = params(3, 1.0 / 3.0 - 1e-9);
        assert!(matches!(ib_value(&p, 0.5), Err(Error::Inapplicable(_))));
        assert!(phi(&p, 0.5).is_ok());
    }

    #[test]
    fn sample_curve_shape() {
        let p = params(3, 0.1);
        let pts = sample_curve(&p, &[0.0, 3f64.ln()]).unwrap();
        assert_eq!(pts[0].phi, 0.0);
        assert_eq!(pts[0].slope, None);
        assert!((pts[1].phi - 0.4595804).abs() < 5e-8);
        assert_eq!(pts[1].phi, pts[1].phi_bar);

        let grid = uniform_rate_grid(&p, 1001);
        let pts = sample_curve(&p, &grid).unwrap();
        assert!(pts.windows(2).all(|w| w[1].phi > w[0].phi));
        for w in pts.windows(3) {
            assert!(w[2].phi_bar - 2.0 * w[1].phi_bar + w[0].phi_bar <= 1e-10);
        }
        assert!(sample_curve(&p, &[0.5, 0.1]).is_err());
        assert!(sample_curve(&p, &[0.5, 2.0]).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = params(4, 0.07);
        let grid = uniform_rate_grid(&p, 257);
        let curve = IbCurve::new(&p).unwrap();
        let parallel = curve.sample(&grid).unwrap();
        let sequential: Vec<_> = grid.iter().map(|&r| curve.point(r).unwrap()).collect();
        assert_eq!(parallel, sequential);
    }
}
