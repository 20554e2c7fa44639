//! Finite-alphabet probability: distributions, channels, entropy and mutual
//! information.
//!
//! All logarithms are natural, so every information quantity is in nats.
//! `0 · log 0` is taken to be `0`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute tolerance on the total mass of a validated distribution.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// Constructors renormalize inputs whose mass is off by at most this much.
pub const NORMALIZE_TOL: f64 = 1e-9;

/// Mutual information values in `[-MI_FLOOR, 0)` are reported as `0`.
pub const MI_FLOOR: f64 = 1e-12;

/// `x ln x` with the continuity convention at zero.
#[inline]
pub(crate) fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Probability vector over a finite alphabet.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Validates `probs`, renormalizing when the mass is within
    /// [`NORMALIZE_TOL`] of one. Negative entries above `-STOCHASTIC_TOL`
    /// are treated as rounding noise and set to zero.
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        for (i, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "entry {i} is not finite"
                )));
            }
            if *p < 0.0 {
                if *p < -STOCHASTIC_TOL {
                    return Err(Error::InvalidDistribution(format!(
                        "entry {i} is negative ({p})"
                    )));
                }
                *p = 0.0;
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZE_TOL {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {total}, not 1"
            )));
        }
        if (total - 1.0).abs() > 0.0 {
            for p in probs.iter_mut() {
                *p /= total;
            }
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| **p > 1.0) {
            return Err(Error::InvalidDistribution(format!(
                "entry {i} exceeds one ({p})"
            )));
        }
        Ok(Self { probs })
    }

    pub fn uniform(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        Ok(Self {
            probs: vec![1.0 / size as f64; size],
        })
    }

    pub fn point_mass(size: usize, at: usize) -> Result<Self> {
        if at >= size {
            return Err(Error::OutOfRange(format!(
                "symbol {at} outside alphabet of size {size}"
            )));
        }
        let mut probs = vec![0.0; size];
        probs[at] = 1.0;
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn entropy(&self) -> f64 {
        entropy(self)
    }
}

impl std::ops::Index<usize> for Distribution {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.probs[i]
    }
}

/// Row-stochastic conditional distribution; row `x` is the law of the
/// output given input `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Channel {
    rows: Vec<Distribution>,
}

impl Channel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(x, row)| {
                Distribution::new(row).map_err(|e| Error::InvalidChannel(format!("row {x}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows)
    }

    pub fn from_rows(rows: Vec<Distribution>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::InvalidChannel("no rows".into()));
        };
        let outputs = first.len();
        if let Some((x, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != outputs) {
            return Err(Error::InvalidChannel(format!(
                "row {x} has {} outputs, row 0 has {outputs}",
                row.len()
            )));
        }
        Ok(Self { rows })
    }

    pub fn identity(size: usize) -> Result<Self> {
        let rows = (0..size)
            .map(|x| Distribution::point_mass(size, x))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows)
    }

    /// Every row uniform over `outputs` symbols: the output is independent
    /// of the input.
    pub fn uniform_rows(inputs: usize, outputs: usize) -> Result<Self> {
        let row = Distribution::uniform(outputs)?;
        Self::from_rows(vec![row; inputs])
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Distribution] {
        &self.rows
    }

    pub fn row(&self, x: usize) -> &Distribution {
        &self.rows[x]
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.rows[x][y]
    }

    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.probs().to_vec()).collect()
    }

    /// Largest entrywise absolute difference; `None` if the shapes differ.
    pub fn max_abs_diff(&self, other: &Channel) -> Option<f64> {
        if self.inputs() != other.inputs() || self.outputs() != other.outputs() {
            return None;
        }
        let d = self
            .rows
            .iter()
            .zip(&other.rows)
            .flat_map(|(a, b)| a.probs().iter().zip(b.probs()).map(|(u, v)| (u - v).abs()))
            .fold(0.0, f64::max);
        Some(d)
    }
}

/// Shannon entropy in nats.
pub fn entropy(d: &Distribution) -> f64 {
    let h = -d.probs().iter().map(|&p| xlogx(p)).sum::<f64>();
    h.max(0.0)
}

fn check_input(input: &Distribution, ch: &Channel) -> Result<()> {
    if input.len() != ch.inputs() {
        return Err(Error::DimensionMismatch {
            expected: ch.inputs(),
            got: input.len(),
        });
    }
    Ok(())
}

/// Law of the channel output when the input is drawn from `input`.
pub fn output_distribution(input: &Distribution, ch: &Channel) -> Result<Distribution> {
    check_input(input, ch)?;
    let mut out = vec![0.0; ch.outputs()];
    for (px, row) in input.probs().iter().zip(ch.rows()) {
        for (o, w) in out.iter_mut().zip(row.probs()) {
            *o += px * w;
        }
    }
    Distribution::new(out)
}

/// `I(X;Y) = H(Y) - H(Y|X)` for `X ~ input` and `Y | X ~ ch`.
pub fn mutual_information(input: &Distribution, ch: &Channel) -> Result<f64> {
    let out = output_distribution(input, ch)?;
    let conditional: f64 = input
        .probs()
        .iter()
        .zip(ch.rows())
        .map(|(px, row)| px * entropy(row))
        .sum();
    Ok(clamp_information(entropy(&out) - conditional))
}

fn clamp_information(i: f64) -> f64 {
    if (-MI_FLOOR..0.0).contains(&i) {
        0.0
    } else {
        i
    }
}

/// `I(Y;T)` for the Markov chain `Y - X - T`, where `Y | X ~ to_y` and
/// `T | X ~ to_t`, evaluated from the joint law `p(y,t) = Σ_x p(x) p(y|x) p(t|x)`.
pub fn markov_mutual_information(
    input: &Distribution,
    to_y: &Channel,
    to_t: &Channel,
) -> Result<f64> {
    check_input(input, to_y)?;
    check_input(input, to_t)?;
    let (ny, nt) = (to_y.outputs(), to_t.outputs());
    let mut joint = vec![0.0; ny * nt];
    for x in 0..input.len() {
        let px = input[x];
        if px == 0.0 {
            continue;
        }
        for y in 0..ny {
            let pxy = px * to_y.get(x, y);
            for t in 0..nt {
                joint[y * nt + t] += pxy * to_t.get(x, t);
            }
        }
    }
    let mut py = vec![0.0; ny];
    let mut pt = vec![0.0; nt];
    for y in 0..ny {
        for t in 0..nt {
            py[y] += joint[y * nt + t];
            pt[t] += joint[y * nt + t];
        }
    }
    let mut info = 0.0;
    for y in 0..ny {
        for t in 0..nt {
            let j = joint[y * nt + t];
            if j > 0.0 {
                info += j * (j / (py[y] * pt[t])).ln();
            }
        }
    }
    Ok(clamp_information(info))
}

/// Serial concatenation: `result[x][z] = Σ_y first[x][y] · second[y][z]`.
pub fn compose(first: &Channel, second: &Channel) -> Result<Channel> {
    if first.outputs() != second.inputs() {
        return Err(Error::DimensionMismatch {
            expected: second.inputs(),
            got: first.outputs(),
        });
    }
    let rows = first
        .rows()
        .iter()
        .map(|row| {
            let mut out = vec![0.0; second.outputs()];
            for (w, next) in row.probs().iter().zip(second.rows()) {
                for (o, v) in out.iter_mut().zip(next.probs()) {
                    *o += w * v;
                }
            }
            Distribution::new(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Channel::from_rows(rows)
}

/// Result of reversing a channel with Bayes' rule.
///
/// `rows[t]` is the posterior of the input given output `t`, or `None` when
/// `t` has zero marginal probability and the posterior is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesReversal {
    pub rows: Vec<Option<Distribution>>,
    pub marginal: Distribution,
}

impl BayesReversal {
    /// Output symbols whose posterior is undefined.
    pub fn undefined(&self) -> Vec<usize> {
        self.rows
            .iter()
            .enumerate()
            .filter_map(|(t, r)| r.is_none().then_some(t))
            .collect()
    }

    /// The reverse channel, if every output symbol has positive mass.
    pub fn into_channel(self) -> Result<Channel> {
        let undefined = self.undefined();
        if !undefined.is_empty() {
            return Err(Error::InvalidChannel(format!(
                "output symbols {undefined:?} have zero marginal"
            )));
        }
        Channel::from_rows(self.rows.into_iter().flatten().collect())
    }
}

/// Posterior `p(x|t)` and marginal `p(t)` from `p(x)` and `p(t|x)`.
pub fn bayes_reverse(input: &Distribution, ch: &Channel) -> Result<BayesReversal> {
    let marginal = output_distribution(input, ch)?;
    let rows = (0..ch.outputs())
        .map(|t| {
            let pt = marginal[t];
            if pt <= 0.0 {
                return Ok(None);
            }
            let post = (0..ch.inputs())
                .map(|x| input[x] * ch.get(x, t) / pt)
                .collect();
            Distribution::new(post).map(Some)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BayesReversal { rows, marginal })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn hamming3(alpha: f64) -> Channel {
        let d = 1.0 - 2.0 * alpha;
        Channel::new(vec![
            vec![d, alpha, alpha],
            vec![alpha, d, alpha],
            vec![alpha, alpha, d],
        ])
        .unwrap()
    }

    #[test]
    fn entropy_examples() {
        let point = Distribution::new(vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(entropy(&point), 0.0);
        let uniform = Distribution::uniform(3).unwrap();
        assert!(close(entropy(&uniform), 3f64.ln(), 1e-15));
        // -0.8 ln 0.8 - 0.2 ln 0.1
        let skew = Distribution::new(vec![0.8, 0.1, 0.1]).unwrap();
        assert!(close(entropy(&skew), 0.6390319, 5e-8));
    }

    #[test]
    fn rejects_invalid_distributions() {
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![1.1, -0.1]).is_err());
        assert!(Distribution::new(vec![]).is_err());
        assert!(Distribution::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn renormalizes_small_drift() {
        let d = Distribution::new(vec![0.5 + 4e-10, 0.5]).unwrap();
        let total: f64 = d.probs().iter().sum();
        assert!(close(total, 1.0, STOCHASTIC_TOL));
        let d = Distribution::new(vec![1.0 + 1e-13, -1e-13]).unwrap();
        assert_eq!(d[1], 0.0);
    }

    #[test]
    fn ragged_channel_rejected() {
        assert!(Channel::new(vec![vec![1.0], vec![0.5, 0.5]]).is_err());
        assert!(Channel::new(vec![]).is_err());
    }

    #[test]
    fn output_distribution_examples() {
        let u = Distribution::uniform(3).unwrap();
        let out = output_distribution(&u, &hamming3(0.1)).unwrap();
        for &p in out.probs() {
            assert!(close(p, 1.0 / 3.0, 1e-15));
        }
        let ch = Channel::new(vec![vec![0.2, 0.8], vec![0.6, 0.4], vec![1.0, 0.0]]).unwrap();
        let point = Distribution::point_mass(3, 1).unwrap();
        assert_eq!(output_distribution(&point, &ch).unwrap(), *ch.row(1));
        let short = Distribution::uniform(2).unwrap();
        assert!(matches!(
            output_distribution(&short, &ch),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn mutual_information_examples() {
        let u = Distribution::uniform(3).unwrap();
        let id = Channel::identity(3).unwrap();
        assert!(close(
            mutual_information(&u, &id).unwrap(),
            3f64.ln(),
            1e-15
        ));
        let constant = Channel::new(vec![vec![0.3, 0.7]; 3]).unwrap();
        assert_eq!(mutual_information(&u, &constant).unwrap(), 0.0);
        // ln 3 - (-0.8 ln 0.8 - 0.2 ln 0.1)
        let oracle = 3f64.ln() + 0.8 * 0.8f64.ln() + 0.2 * 0.1f64.ln();
        let i = mutual_information(&u, &hamming3(0.1)).unwrap();
        assert!(close(i, oracle, 1e-15));
        assert!(close(i, 0.4595804, 5e-8));
    }

    #[test]
    fn markov_information_matches_composition() {
        let input = Distribution::new(vec![0.2, 0.5, 0.3]).unwrap();
        let to_y = hamming3(0.15);
        let to_t = Channel::new(vec![vec![0.9, 0.1], vec![0.3, 0.7], vec![0.5, 0.5]]).unwrap();
        let rev = bayes_reverse(&input, &to_t).unwrap();
        let t_to_y = compose(&rev.clone().into_channel().unwrap(), &to_y).unwrap();
        let direct = mutual_information(&rev.marginal, &t_to_y).unwrap();
        let markov = markov_mutual_information(&input, &to_y, &to_t).unwrap();
        assert!(close(direct, markov, 1e-14));
    }

    #[test]
    fn compose_examples() {
        let ch = Channel::new(vec![vec![0.2, 0.8], vec![0.6, 0.4], vec![1.0, 0.0]]).unwrap();
        let id = Channel::identity(3).unwrap();
        assert!(compose(&id, &ch).unwrap().max_abs_diff(&ch).unwrap() < 1e-16);

        let (alpha, beta) = (0.1, 0.05);
        let gamma = alpha + (1.0 - 3.0 * alpha) * beta;
        let c = compose(&hamming3(beta), &hamming3(alpha)).unwrap();
        assert!(c.max_abs_diff(&hamming3(gamma)).unwrap() < 1e-15);

        let flat = compose(&hamming3(1.0 / 3.0), &hamming3(0.2)).unwrap();
        for row in flat.rows() {
            for &p in row.probs() {
                assert!(close(p, 1.0 / 3.0, 1e-15));
            }
        }
        assert!(compose(&ch, &ch).is_err());
    }

    #[test]
    fn bayes_reverse_examples() {
        let u = Distribution::uniform(3).unwrap();
        let h = hamming3(0.07);
        let rev = bayes_reverse(&u, &h).unwrap();
        assert!(
            rev.clone()
                .into_channel()
                .unwrap()
                .max_abs_diff(&h)
                .unwrap()
                < 1e-15
        );
        for &p in rev.marginal.probs() {
            assert!(close(p, 1.0 / 3.0, 1e-15));
        }

        let input = Distribution::new(vec![0.1, 0.6, 0.3]).unwrap();
        let id = Channel::identity(3).unwrap();
        let rev = bayes_reverse(&input, &id).unwrap().into_channel().unwrap();
        assert!(rev.max_abs_diff(&id).unwrap() < 1e-15);
    }

    #[test]
    fn zero_mass_output_flagged() {
        let u = Distribution::uniform(2).unwrap();
        let ch = Channel::new(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let rev = bayes_reverse(&u, &ch).unwrap();
        assert_eq!(rev.undefined(), vec![2]);
        assert!(rev.into_channel().is_err());
    }
}
