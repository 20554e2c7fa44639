//! Brute-force verifiers that do not go through the closed forms.
//!
//! * [`phi_bruteforce`] maximizes the output-entropy deficit over a simplex
//!   grid of inputs.
//! * [`envelope_bruteforce`] builds the upper concave hull of densely
//!   sampled `(R, φ(R))` pairs and reads the tangent rate off its first
//!   segment.
//! * [`ib_constrained_search`] runs a seeded multi-restart projected
//!   gradient ascent over representations of a fixed cardinality.
//! * [`tightness_check`] combines the search with the `n + 1` symbol
//!   construction to witness the cardinality gap below `R_c`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamming::{crossover_for_rate, hamming_channel, hamming_matrix, HammingParams};
use crate::phi::{critical_rate, phi, CriticalPoints, IbCurve};
use crate::prob::{markov_mutual_information, mutual_information, Channel, Distribution};
use crate::representation::{time_sharing, validate_representation};

/// Largest alphabet the exhaustive oracles accept.
pub const MAX_BRUTE_FORCE_N: usize = 4;

/// Cap on the number of simplex grid points enumerated in one call.
pub const MAX_GRID_POINTS: usize = 20_000_000;

/// Slack on the rate constraint of grid points and search iterates.
pub const FEASIBILITY_SLACK: f64 = 1e-12;

const LOG_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchConfig {
    /// Subdivisions per coordinate of the simplex grid, and number of rate
    /// intervals sampled by the envelope oracle.
    pub grid_resolution: usize,
    pub restarts: usize,
    pub max_iterations: usize,
    pub step_tolerance: f64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid_resolution: 400,
            restarts: 64,
            max_iterations: 4000,
            step_tolerance: 1e-12,
            seed: 1,
        }
    }
}

impl SearchConfig {
    /// Defaults with a grid resolution that keeps the simplex enumeration at
    /// desk scale for alphabet size `n`.
    pub fn for_alphabet(n: usize) -> Self {
        let grid_resolution = if n <= 3 { 400 } else { 100 };
        Self {
            grid_resolution,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_resolution == 0
            || self.restarts == 0
            || self.max_iterations == 0
            || !(self.step_tolerance > 0.0)
        {
            return Err(Error::InvalidParameter(format!(
                "search configuration entries must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

fn require_small_alphabet(p: &HammingParams) -> Result<()> {
    if p.n() > MAX_BRUTE_FORCE_N {
        return Err(Error::InvalidParameter(format!(
            "brute-force oracles are limited to n ≤ {MAX_BRUTE_FORCE_N}, got {}",
            p.n()
        )));
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> Option<usize> {
    let k = k.min(n - k);
    (0..k).try_fold(1usize, |acc, i| acc.checked_mul(n - i).map(|v| v / (i + 1)))
}

/// `Σ p ln(k p)`: relative entropy from uniform over `k` symbols.
fn deficit_from_uniform(probs: &[f64]) -> f64 {
    let k = probs.len() as f64;
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * (k * p).ln())
        .sum::<f64>()
        .max(0.0)
}

fn push_through(q: &[f64], channel: &[Vec<f64>], out: &mut [f64]) {
    out.iter_mut().for_each(|o| *o = 0.0);
    for (qx, row) in q.iter().zip(channel) {
        for (o, w) in out.iter_mut().zip(row) {
            *o += qx * w;
        }
    }
}

/// Every input distribution on the grid `{k / resolution}` together with its
/// entropy deficit and the entropy deficit of the channel output. The exact
/// uniform input is always included, even when `n` does not divide the
/// resolution.
#[derive(Debug, Clone)]
pub struct SimplexCloud {
    n: usize,
    resolution: usize,
    channel: Vec<Vec<f64>>,
    inputs: Vec<f64>,
    rates: Vec<f64>,
    values: Vec<f64>,
}

impl SimplexCloud {
    pub fn new(p: &HammingParams, resolution: usize) -> Result<Self> {
        require_small_alphabet(p)?;
        if resolution == 0 {
            return Err(Error::InvalidParameter(
                "grid resolution must be positive".into(),
            ));
        }
        let n = p.n();
        let count = binomial(resolution + n - 1, n - 1)
            .filter(|&c| c <= MAX_GRID_POINTS)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "simplex grid of resolution {resolution} for n = {n} exceeds {MAX_GRID_POINTS} points"
                ))
            })?;

        let mut cloud = Self {
            n,
            resolution,
            channel: hamming_channel(p)?.to_matrix(),
            inputs: Vec::with_capacity((count + 1) * n),
            rates: Vec::with_capacity(count + 1),
            values: Vec::with_capacity(count + 1),
        };
        let mut counts = vec![0usize; n];
        let mut q = vec![0.0; n];
        cloud.push(&vec![1.0 / n as f64; n]);
        enumerate_compositions(resolution, 0, &mut counts, &mut |c| {
            for (qi, &ci) in q.iter_mut().zip(c) {
                *qi = ci as f64 / resolution as f64;
            }
            cloud.push(&q);
        });
        Ok(cloud)
    }

    fn push(&mut self, q: &[f64]) {
        let mut out = vec![0.0; self.n];
        push_through(q, &self.channel, &mut out);
        self.inputs.extend_from_slice(q);
        self.rates.push(deficit_from_uniform(q));
        self.values.push(deficit_from_uniform(&out));
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// `(rate, value)` of every grid point.
    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.rates.iter().copied().zip(self.values.iter().copied())
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.n..(i + 1) * self.n]
    }

    /// Best grid point with entropy deficit at most `r`.
    pub fn best_below(&self, r: f64) -> Option<BruteForceMax> {
        let mut best: Option<(usize, f64)> = None;
        let mut feasible = 0;
        for (i, (&rate, &value)) in self.rates.iter().zip(&self.values).enumerate() {
            if rate <= r + FEASIBILITY_SLACK {
                feasible += 1;
                if best.is_none_or(|(_, v)| value > v) {
                    best = Some((i, value));
                }
            }
        }
        best.map(|(i, value)| BruteForceMax {
            value,
            maximizer: self.input(i).to_vec(),
            feasible_points: feasible,
        })
    }

    /// Best point over the rays from the uniform input through every grid
    /// point, each cut where the entropy deficit reaches `r`.
    ///
    /// Both deficits are convex along a ray and vanish at the uniform
    /// input, so the output deficit is largest where the ray leaves the
    /// feasible set. Unlike [`best_below`](Self::best_below), every
    /// candidate sits on the constraint, so the winner is the ray closest
    /// to the true maximizer rather than whichever grid point happens to
    /// fall just inside the boundary.
    pub fn best_on_rays(&self, r: f64) -> Option<BruteForceMax> {
        let n = self.n;
        let u = 1.0 / n as f64;
        let r = r.max(0.0);
        let mut point = vec![0.0; n];
        let mut out = vec![0.0; n];
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut feasible = 0;
        for (i, &rate) in self.rates.iter().enumerate() {
            let q = self.input(i);
            let value = if rate <= r + FEASIBILITY_SLACK {
                feasible += 1;
                point.copy_from_slice(q);
                self.values[i]
            } else {
                let mix = |lambda: f64, dst: &mut [f64]| {
                    for (d, &v) in dst.iter_mut().zip(q) {
                        *d = u + lambda * (v - u);
                    }
                };
                // At zero rate only the uniform input itself is feasible.
                let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
                while r > 0.0 && hi - lo > f64::EPSILON {
                    let mid = 0.5 * (lo + hi);
                    mix(mid, &mut point);
                    if deficit_from_uniform(&point) <= r {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                mix(lo, &mut point);
                push_through(&point, &self.channel, &mut out);
                deficit_from_uniform(&out)
            };
            if best.as_ref().is_none_or(|(v, _)| value > *v) {
                best = Some((value, point.clone()));
            }
        }
        best.map(|(value, maximizer)| BruteForceMax {
            value,
            maximizer,
            feasible_points: feasible,
        })
    }

    /// Upper concave hull of the whole cloud.
    pub fn envelope(&self) -> SampledEnvelope {
        SampledEnvelope::from_samples(self.pairs().collect(), 1.0 / self.resolution as f64)
    }
}

fn enumerate_compositions<F: FnMut(&[usize])>(
    remaining: usize,
    index: usize,
    counts: &mut Vec<usize>,
    visit: &mut F,
) {
    if index + 1 == counts.len() {
        counts[index] = remaining;
        visit(counts);
        return;
    }
    for k in 0..=remaining {
        counts[index] = k;
        enumerate_compositions(remaining - k, index + 1, counts, visit);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BruteForceMax {
    pub value: f64,
    pub maximizer: Vec<f64>,
    pub feasible_points: usize,
}

/// `max ln n - H(Y)` over inputs with `ln n - H(q) ≤ R`, scanned along the
/// rays through a simplex grid (see [`SimplexCloud::best_on_rays`]).
pub fn phi_bruteforce(p: &HammingParams, r: f64, cfg: &SearchConfig) -> Result<BruteForceMax> {
    cfg.validate()?;
    if !r.is_finite() || r < -FEASIBILITY_SLACK || r > p.log_n() + FEASIBILITY_SLACK {
        return Err(Error::OutOfRange(format!(
            "rate {r} outside [0, {}]",
            p.log_n()
        )));
    }
    SimplexCloud::new(p, cfg.grid_resolution)?
        .best_on_rays(r)
        .ok_or_else(|| {
            Error::InvalidParameter(format!(
                "no grid point of resolution {} satisfies the rate constraint {r}",
                cfg.grid_resolution
            ))
        })
}

/// Upper concave hull of `(x, y)` samples; vertices sorted by `x`.
pub fn upper_concave_envelope(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut sorted: Vec<(f64, f64)> = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
    for pt in sorted {
        // Same abscissa: keep only the highest point.
        if let Some(last) = hull.last() {
            if last.0 == pt.0 {
                hull.pop();
            }
        }
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    hull
}

/// Piecewise-linear concave majorant of a set of samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledEnvelope {
    pub vertices: Vec<(f64, f64)>,
    pub samples: Vec<(f64, f64)>,
    /// Spacing of the sampling grid the envelope was built from.
    pub spacing: f64,
}

impl SampledEnvelope {
    pub fn from_samples(samples: Vec<(f64, f64)>, spacing: f64) -> Self {
        Self {
            vertices: upper_concave_envelope(&samples),
            samples,
            spacing,
        }
    }

    /// Linear interpolation between hull vertices; `None` outside their range.
    pub fn value(&self, x: f64) -> Option<f64> {
        let v = &self.vertices;
        if v.is_empty() || x < v[0].0 || x > v[v.len() - 1].0 {
            return None;
        }
        let i = v.partition_point(|p| p.0 < x);
        if i == 0 {
            return Some(v[0].1);
        }
        let (a, b) = (v[i - 1], v[i]);
        Some(a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0))
    }

    /// Right end of the first hull segment: the estimate of `R_c`.
    pub fn critical_rate_estimate(&self) -> Option<f64> {
        self.vertices.get(1).map(|v| v.0)
    }
}

/// Hull of `φ` sampled at `grid_resolution + 1` equally spaced rates.
pub fn envelope_bruteforce(p: &HammingParams, cfg: &SearchConfig) -> Result<SampledEnvelope> {
    cfg.validate()?;
    if p.n() < 3 {
        return Err(Error::Inapplicable(
            "the envelope oracle needs n ≥ 3".into(),
        ));
    }
    p.require_regular()?;
    let log_n = p.log_n();
    let k = cfg.grid_resolution;
    let samples = (0..=k)
        .map(|i| {
            let r = if i == k {
                log_n
            } else {
                log_n * i as f64 / k as f64
            };
            phi(p, r).map(|v| (r, v))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SampledEnvelope::from_samples(samples, log_n / k as f64))
}

/// Dense row-major `n × k` stochastic matrix with the information
/// quantities of the search, for a uniform input and `Y` drawn through
/// `H_{n,α}`.
struct Objective {
    n: usize,
    k: usize,
    to_y: Vec<f64>,
    py: Vec<f64>,
}

struct Evaluation {
    i_xt: f64,
    i_yt: f64,
}

impl Objective {
    fn new(p: &HammingParams, k: usize) -> Result<Self> {
        let n = p.n();
        let to_y: Vec<f64> = hamming_channel(p)?.to_matrix().concat();
        let mut py = vec![0.0; n];
        for x in 0..n {
            for y in 0..n {
                py[y] += to_y[x * n + y] / n as f64;
            }
        }
        Ok(Self { n, k, to_y, py })
    }

    fn marginal(&self, q: &[f64]) -> Vec<f64> {
        let px = 1.0 / self.n as f64;
        let mut pt = vec![0.0; self.k];
        for x in 0..self.n {
            for t in 0..self.k {
                pt[t] += px * q[x * self.k + t];
            }
        }
        pt
    }

    fn joint_yt(&self, q: &[f64]) -> Vec<f64> {
        let (n, k) = (self.n, self.k);
        let px = 1.0 / n as f64;
        let mut joint = vec![0.0; n * k];
        for x in 0..n {
            for y in 0..n {
                let w = px * self.to_y[x * n + y];
                for t in 0..k {
                    joint[y * k + t] += w * q[x * k + t];
                }
            }
        }
        joint
    }

    fn i_xt(&self, q: &[f64]) -> f64 {
        let pt = self.marginal(q);
        let px = 1.0 / self.n as f64;
        let mut info = 0.0;
        for x in 0..self.n {
            for t in 0..self.k {
                let v = q[x * self.k + t];
                if v > 0.0 {
                    info += px * v * (v / pt[t]).ln();
                }
            }
        }
        info.max(0.0)
    }

    fn evaluate(&self, q: &[f64]) -> Evaluation {
        let pt = self.marginal(q);
        let joint = self.joint_yt(q);
        let mut i_yt = 0.0;
        for y in 0..self.n {
            for t in 0..self.k {
                let j = joint[y * self.k + t];
                if j > 0.0 {
                    i_yt += j * (j / (self.py[y] * pt[t])).ln();
                }
            }
        }
        Evaluation {
            i_xt: self.i_xt(q),
            i_yt: i_yt.max(0.0),
        }
    }

    /// Row-centred gradients of `I(X;T)` and `I(Y;T)` with respect to the
    /// entries of `q`.
    fn gradients(&self, q: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (n, k) = (self.n, self.k);
        let px = 1.0 / n as f64;
        let pt = self.marginal(q);
        let joint = self.joint_yt(q);
        let mut gx = vec![0.0; n * k];
        let mut gy = vec![0.0; n * k];
        for x in 0..n {
            for t in 0..k {
                let ptt = pt[t].max(LOG_FLOOR);
                gx[x * k + t] = px * (q[x * k + t].max(LOG_FLOOR) / ptt).ln();
                let mut s = 0.0;
                for y in 0..n {
                    s += self.to_y[x * n + y] * (joint[y * k + t].max(LOG_FLOOR) / ptt).ln();
                }
                gy[x * k + t] = px * s;
            }
        }
        for g in [&mut gx, &mut gy] {
            for row in g.chunks_mut(k) {
                let mean = row.iter().sum::<f64>() / k as f64;
                row.iter_mut().for_each(|v| *v -= mean);
            }
        }
        (gx, gy)
    }

    /// Largest `λ ∈ [0, 1]` with `I(X;T) ≤ rate` on `U + λ(q - U)`, where
    /// `U` has uniform rows. `I(X;T)` is convex along the segment and zero
    /// at `U`, so the feasible set is an interval containing zero.
    fn repair(&self, q: &[f64], rate: f64) -> Vec<f64> {
        if self.i_xt(q) <= rate + FEASIBILITY_SLACK {
            return q.to_vec();
        }
        let u = 1.0 / self.k as f64;
        let mix = |lambda: f64| -> Vec<f64> { q.iter().map(|v| u + lambda * (v - u)).collect() };
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.i_xt(&mix(mid)) <= rate {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        mix(lo)
    }
}

/// Euclidean projection of `v` onto the probability simplex.
fn project_to_simplex(v: &mut [f64]) {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, &s) in sorted.iter().enumerate() {
        cumulative += s;
        let t = (cumulative - 1.0) / (i + 1) as f64;
        if s - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
}

#[derive(Debug, Clone)]
struct RestartOutcome {
    value: f64,
    channel: Vec<f64>,
    iterations: usize,
}

fn ascend(obj: &Objective, start: &[f64], rate: f64, cfg: &SearchConfig) -> RestartOutcome {
    let k = obj.k;
    let mut q = obj.repair(start, rate);
    let mut current = obj.evaluate(&q);
    let mut step = 1.0;
    let mut iterations = 0;
    let active_band = 1e-9 * rate.max(1e-3);
    while iterations < cfg.max_iterations && step >= cfg.step_tolerance {
        iterations += 1;
        let (gx, gy) = obj.gradients(&q);
        let mut direction = gy.clone();
        if current.i_xt >= rate - active_band {
            let dot: f64 = gx.iter().zip(&gy).map(|(a, b)| a * b).sum();
            let norm: f64 = gx.iter().map(|a| a * a).sum();
            if dot > 0.0 && norm > 0.0 {
                direction
                    .iter_mut()
                    .zip(&gx)
                    .for_each(|(d, g)| *d -= dot / norm * g);
            }
        }
        let scale = direction.iter().map(|d| d.abs()).fold(0.0, f64::max);
        if scale == 0.0 {
            break;
        }
        let mut candidate: Vec<f64> = q
            .iter()
            .zip(&direction)
            .map(|(v, d)| v + step * d / scale)
            .collect();
        candidate.chunks_mut(k).for_each(project_to_simplex);
        let candidate = obj.repair(&candidate, rate);
        let eval = obj.evaluate(&candidate);
        if eval.i_yt > current.i_yt {
            q = candidate;
            current = eval;
            step = (step * 2.0).min(1.0);
        } else {
            step *= 0.5;
        }
    }
    RestartOutcome {
        value: current.i_yt,
        channel: q,
        iterations,
    }
}

fn random_start(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<f64> {
    let mut q: Vec<f64> = (0..n * k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    for row in q.chunks_mut(k) {
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= s);
    }
    // Blend toward uniform rows so starts cover a range of I(X;T).
    let shrink = rng.gen::<f64>();
    let u = 1.0 / k as f64;
    q.iter_mut().for_each(|v| *v = u + shrink * (*v - u));
    q
}

fn perturb(rng: &mut ChaCha8Rng, base: &[f64], k: usize, size: f64) -> Vec<f64> {
    let mut q: Vec<f64> = base
        .iter()
        .map(|v| v + size * (rng.gen::<f64>() - 0.5))
        .collect();
    q.chunks_mut(k).for_each(project_to_simplex);
    q
}

/// `n × k` starting points built from the optimal structures: the Hamming
/// representation at `R` (when `k = n`) and column merges of the `n + 1`
/// symbol time-sharing optimum.
fn structured_seeds(p: &HammingParams, rate: f64, k: usize) -> Result<Vec<Vec<f64>>> {
    let n = p.n();
    let mut seeds = Vec::new();
    if k == n {
        let beta = crossover_for_rate(n, rate)?;
        seeds.push(hamming_matrix(n, beta)?.to_matrix().concat());
    }
    let crit: Option<CriticalPoints> = if n >= 3 && p.is_regular() && !p.is_near_extreme() {
        critical_rate(p).ok()
    } else {
        None
    };
    let Some(crit) = crit.filter(|c| rate > 0.0 && rate < c.r_c) else {
        return Ok(seeds);
    };
    let full = time_sharing(p, &crit, rate)?.channel.to_matrix();
    if k == n + 1 {
        seeds.push(full.concat());
    }
    if k == n {
        let merge = |a: usize, b: usize| -> Vec<f64> {
            full.iter()
                .flat_map(|row| {
                    let mut merged: Vec<f64> = row
                        .iter()
                        .enumerate()
                        .filter(|(t, _)| *t != b)
                        .map(|(_, v)| *v)
                        .collect();
                    let target = if a < b { a } else { a - 1 };
                    merged[target] += row[b];
                    merged
                })
                .collect()
        };
        for j in 0..n {
            seeds.push(merge(j, n));
        }
        for i in 0..n {
            for j in i + 1..n {
                seeds.push(merge(i, j));
            }
        }
    }
    Ok(seeds)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    /// Best `I(Y;T)` found.
    pub value: f64,
    /// `I(X;T)` of the best channel.
    pub i_xt: f64,
    pub channel: Channel,
    pub best_restart: usize,
    pub iterations: Vec<usize>,
}

/// Best `I(Y;T)` over `n × cardinality` representations with
/// `I(X;T) ≤ R`, found by seeded multi-restart projected gradient ascent.
///
/// Restart `i` draws from its own generator seeded with `seed + i`, so the
/// result is identical however the restarts are scheduled.
pub fn ib_constrained_search(
    p: &HammingParams,
    r: f64,
    cardinality: usize,
    cfg: &SearchConfig,
) -> Result<SearchResult> {
    cfg.validate()?;
    require_small_alphabet(p)?;
    let n = p.n();
    if cardinality == 0 || cardinality > n + 1 {
        return Err(Error::InvalidParameter(format!(
            "cardinality must lie in 1..={}, got {cardinality}",
            n + 1
        )));
    }
    if !r.is_finite() || r < 0.0 || r > p.log_n() + FEASIBILITY_SLACK {
        return Err(Error::OutOfRange(format!(
            "rate {r} outside [0, {}]",
            p.log_n()
        )));
    }
    let k = cardinality;
    let obj = Objective::new(p, k)?;
    let seeds = structured_seeds(p, r, k)?;

    let outcomes: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64));
            let start = if k == 1 {
                vec![1.0; n]
            } else if i < seeds.len() {
                seeds[i].clone()
            } else if !seeds.is_empty() && i % 2 == 0 {
                let base = &seeds[(i / 2) % seeds.len()];
                let size = 10f64.powf(-1.0 - 3.0 * rng.gen::<f64>());
                perturb(&mut rng, base, k, size)
            } else {
                random_start(&mut rng, n, k)
            };
            ascend(&obj, &start, r, cfg)
        })
        .collect();

    let (best_restart, best) = outcomes
        .iter()
        .enumerate()
        .fold(None::<(usize, &RestartOutcome)>, |acc, (i, o)| match acc {
            Some((_, b)) if b.value >= o.value => acc,
            _ => Some((i, o)),
        })
        .expect("at least one restart");

    let channel = Channel::new(best.channel.chunks(k).map(|r| r.to_vec()).collect())?;
    let uniform = Distribution::uniform(n)?;
    let i_xt = mutual_information(&uniform, &channel)?;
    let value = markov_mutual_information(&uniform, &hamming_channel(p)?, &channel)?;
    Ok(SearchResult {
        value,
        i_xt,
        channel,
        best_restart,
        iterations: outcomes.iter().map(|o| o.iterations).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchCertificate {
    pub config: SearchConfig,
    pub restarts: usize,
    pub total_iterations: usize,
    pub best_restart: usize,
    /// Channel behind `best_at_card_n`.
    pub best_channel: Channel,
    pub best_i_xt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TightnessReport {
    pub n: usize,
    pub alpha: f64,
    pub r: f64,
    pub r_c: f64,
    pub envelope_value: f64,
    pub best_at_card_n: f64,
    pub best_at_card_n1: f64,
    pub gap: f64,
    pub search_certificate: SearchCertificate,
}

impl TightnessReport {
    /// Distance of the `n + 1` symbol construction from the envelope.
    pub fn card_n1_deviation(&self) -> f64 {
        (self.best_at_card_n1 - self.envelope_value).abs()
    }
}

/// Compares the best cardinality-`n` representation found by search with
/// the envelope value that the `n + 1` symbol construction reaches.
pub fn tightness_check(p: &HammingParams, r: f64, cfg: &SearchConfig) -> Result<TightnessReport> {
    require_small_alphabet(p)?;
    let curve = IbCurve::new(p)?;
    let crit = *curve.critical_points().ok_or_else(|| {
        Error::Inapplicable(
            "no linear segment: the tightness claim needs n ≥ 3 and regular α".into(),
        )
    })?;
    if !(r > 0.0 && r < crit.r_c) {
        return Err(Error::OutsideTightnessRegime {
            rate: r,
            critical: crit.r_c,
        });
    }
    let envelope_value = curve.envelope(r)?;
    let search = ib_constrained_search(p, r, p.n(), cfg)?;
    let construction = time_sharing(p, &crit, r)?;
    let validation = validate_representation(p, &construction)?;
    Ok(TightnessReport {
        n: p.n(),
        alpha: p.alpha(),
        r,
        r_c: crit.r_c,
        envelope_value,
        best_at_card_n: search.value,
        best_at_card_n1: validation.i_yt,
        gap: envelope_value - search.value,
        search_certificate: SearchCertificate {
            config: *cfg,
            restarts: cfg.restarts,
            total_iterations: search.iterations.iter().sum(),
            best_restart: search.best_restart,
            best_channel: search.channel,
            best_i_xt: search.i_xt,
        },
    })
}
