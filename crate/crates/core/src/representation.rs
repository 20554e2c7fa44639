//! Minimal-cardinality optimal representations `p_{T|X}` and a checker that
//! recomputes their information quantities from first principles.
//!
//! With `R_c` the tangent rate of the envelope:
//!
//! * `R = 0`: a single constant symbol.
//! * `0 < R < R_c`: `n + 1` symbols. With probability `1 - R/R_c` the input
//!   is mapped to a constant symbol `t_0` (always the last column), otherwise
//!   it passes through `H_{n,β_c}` with `β_c = h_n^{-1}(ln n - R_c)`.
//! * `R_c ≤ R ≤ ln n`: `n` symbols, `p_{T|X} = H_{n,β}` with
//!   `β = h_n^{-1}(ln n - R)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamming::{crossover_for_rate, hamming_channel, hamming_matrix, HammingParams};
use crate::phi::{critical_rate, ib_value, CriticalPoints};
use crate::prob::{
    bayes_reverse, entropy, markov_mutual_information, mutual_information, output_distribution,
    Channel, Distribution,
};

/// Tolerance of every check in [`validate_representation`].
pub const VALIDATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Constant,
    TimeSharing,
    Hamming,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Constant => "constant",
            Regime::TimeSharing => "time_sharing",
            Regime::Hamming => "hamming",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Representation {
    /// `p_{T|X}`: one row per input symbol.
    pub channel: Channel,
    /// `p_T` under a uniform input.
    pub marginal: Distribution,
    pub cardinality: usize,
    pub regime: Regime,
    pub r_target: f64,
    /// Output symbols carrying zero probability. They are kept in the
    /// channel so that cardinality accounting stays explicit.
    pub zero_mass_symbols: Vec<usize>,
}

impl Representation {
    fn build(channel: Channel, regime: Regime, r_target: f64) -> Result<Self> {
        let marginal = output_distribution(&Distribution::uniform(channel.inputs())?, &channel)?;
        let zero_mass_symbols = marginal
            .probs()
            .iter()
            .enumerate()
            .filter_map(|(t, &p)| (p == 0.0).then_some(t))
            .collect();
        Ok(Self {
            cardinality: channel.outputs(),
            channel,
            marginal,
            regime,
            r_target,
            zero_mass_symbols,
        })
    }
}

fn constant(n: usize, r: f64) -> Result<Representation> {
    Representation::build(Channel::new(vec![vec![1.0]; n])?, Regime::Constant, r)
}

fn hamming_at(p: &HammingParams, r: f64) -> Result<Representation> {
    let beta = crossover_for_rate(p.n(), r)?;
    Representation::build(hamming_matrix(p.n(), beta)?, Regime::Hamming, r)
}

/// Time sharing between the constant symbol (last column, weight
/// `1 - R/R_c`) and `H_{n,β_c}` (weight `R/R_c`), for `R ∈ [0, R_c]`.
///
/// At `R = R_c` the constant symbol has zero mass and is flagged in
/// [`Representation::zero_mass_symbols`].
pub fn time_sharing(p: &HammingParams, crit: &CriticalPoints, r: f64) -> Result<Representation> {
    if !(0.0..=crit.r_c).contains(&r) {
        return Err(Error::OutOfRange(format!(
            "time sharing covers [0, R_c = {}], got {r}",
            crit.r_c
        )));
    }
    let n = p.n();
    let weight = r / crit.r_c;
    let h = hamming_matrix(n, crit.beta_c)?;
    let rows = (0..n)
        .map(|x| {
            let mut row: Vec<f64> = h.row(x).probs().iter().map(|v| weight * v).collect();
            row.push(1.0 - weight);
            row
        })
        .collect();
    Representation::build(Channel::new(rows)?, Regime::TimeSharing, r)
}

/// The minimal-cardinality representation achieving `IB(R)`.
///
/// Requires a regular crossover. For `n = 2` the curve is concave, so every
/// positive rate uses the Hamming form. At exactly `R = R_c` the Hamming
/// form (cardinality `n`) is returned.
pub fn optimal_representation(p: &HammingParams, r: f64) -> Result<Representation> {
    p.require_regular()?;
    let log_n = p.log_n();
    if !r.is_finite() || !(0.0..=log_n).contains(&r) {
        return Err(Error::OutOfRange(format!("rate {r} outside [0, {log_n}]")));
    }
    if r == 0.0 {
        return constant(p.n(), r);
    }
    if p.n() == 2 {
        return hamming_at(p, r);
    }
    let crit = critical_rate(p)?;
    if r < crit.r_c {
        time_sharing(p, &crit, r)
    } else {
        hamming_at(p, r)
    }
}

/// Information quantities of a representation recomputed from its channel,
/// and the outcome of every structural check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub i_xt: f64,
    pub i_yt: f64,
    pub ib_target: f64,
    pub rate_deviation: f64,
    pub ib_deviation: f64,
    pub marginal_deviation: f64,
    /// `R_t = ln n - H(X | T = t)`; `None` for zero-mass symbols.
    pub symbol_rates: Vec<Option<f64>>,
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Posterior rows must each be a permutation of `(1-(n-1)β, β, ..., β)`,
/// with pairwise distinct positions for the large entry.
fn check_posteriors(rows: &[&Distribution], beta: f64, failures: &mut Vec<String>, label: &str) {
    let n = rows.first().map_or(0, |r| r.len());
    let big = 1.0 - (n as f64 - 1.0) * beta;
    let mut peaks = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let (peak, _) = row
            .probs()
            .iter()
            .enumerate()
            .fold(
                (0, f64::MIN),
                |acc, (x, &v)| if v > acc.1 { (x, v) } else { acc },
            );
        let off = row
            .probs()
            .iter()
            .enumerate()
            .map(|(x, &v)| (v - if x == peak { big } else { beta }).abs())
            .fold(0.0, f64::max);
        if off > VALIDATION_TOL {
            failures.push(format!(
                "{label} posterior {i} is not a permuted Hamming row with β = {beta} (off by {off:e})"
            ));
        }
        peaks.push(peak);
    }
    let mut sorted = peaks.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != peaks.len() {
        failures.push(format!(
            "{label} posteriors repeat a permutation: peaks {peaks:?}"
        ));
    }
}

/// Recomputes `I(X;T)` and `I(Y;T)` for a uniform input (with `Y` drawn
/// through `H_{n,α}` from the same `X`) and checks the representation
/// against the target rate, the IB curve and the pattern of its regime.
pub fn validate_representation(
    p: &HammingParams,
    rep: &Representation,
) -> Result<ValidationReport> {
    let n = p.n();
    let log_n = p.log_n();
    let uniform = Distribution::uniform(n)?;
    let to_y = hamming_channel(p)?;
    let i_xt = mutual_information(&uniform, &rep.channel)?;
    let i_yt = markov_mutual_information(&uniform, &to_y, &rep.channel)?;
    let ib_target = ib_value(p, rep.r_target)?;
    let reversal = bayes_reverse(&uniform, &rep.channel)?;
    let symbol_rates: Vec<Option<f64>> = reversal
        .rows
        .iter()
        .map(|r| r.as_ref().map(|d| log_n - entropy(d)))
        .collect();

    let marginal_deviation = rep
        .marginal
        .probs()
        .iter()
        .zip(reversal.marginal.probs())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let mut failures = Vec::new();
    let rate_deviation = (i_xt - rep.r_target).abs();
    let ib_deviation = (i_yt - ib_target).abs();
    if rate_deviation > VALIDATION_TOL {
        failures.push(format!("I(X;T) = {i_xt} differs from R = {}", rep.r_target));
    }
    if ib_deviation > VALIDATION_TOL {
        failures.push(format!("I(Y;T) = {i_yt} differs from IB(R) = {ib_target}"));
    }
    if marginal_deviation > 1e-12 || rep.marginal.len() != rep.channel.outputs() {
        failures.push(format!("stored p_T is off by {marginal_deviation:e}"));
    }
    let expected_card = match rep.regime {
        Regime::Constant => 1,
        Regime::TimeSharing => n + 1,
        Regime::Hamming => n,
    };
    if rep.cardinality != expected_card || rep.channel.outputs() != rep.cardinality {
        failures.push(format!(
            "{} regime needs cardinality {expected_card}, got {}",
            rep.regime.as_str(),
            rep.cardinality
        ));
    }

    let defined: Vec<(usize, f64)> = symbol_rates
        .iter()
        .enumerate()
        .filter_map(|(t, r)| r.map(|r| (t, r)))
        .collect();
    match rep.regime {
        Regime::Constant => {
            if let Some((t, r)) = defined.iter().find(|(_, r)| r.abs() > VALIDATION_TOL) {
                failures.push(format!("constant symbol {t} has rate {r}"));
            }
        }
        Regime::TimeSharing => {
            let crit = critical_rate(p)?;
            let mut informative = Vec::new();
            for &(t, r) in &defined {
                if r.abs() <= VALIDATION_TOL {
                    continue;
                }
                if (r - crit.r_c).abs() > VALIDATION_TOL {
                    failures.push(format!(
                        "symbol {t} has rate {r}, expected 0 or R_c = {}",
                        crit.r_c
                    ));
                }
                informative.push(reversal.rows[t].as_ref().expect("defined row"));
            }
            if informative.len() != n {
                failures.push(format!(
                    "expected {n} symbols at rate R_c, found {}",
                    informative.len()
                ));
            }
            check_posteriors(&informative, crit.beta_c, &mut failures, "time-sharing");
        }
        Regime::Hamming => {
            for &(t, r) in &defined {
                if (r - rep.r_target).abs() > VALIDATION_TOL {
                    failures.push(format!(
                        "symbol {t} has rate {r}, expected {}",
                        rep.r_target
                    ));
                }
            }
            let beta = crossover_for_rate(n, rep.r_target)?;
            let rows: Vec<&Distribution> = reversal.rows.iter().flatten().collect();
            check_posteriors(&rows, beta, &mut failures, "hamming");
        }
    }

    Ok(ValidationReport {
        i_xt,
        i_yt,
        ib_target,
        rate_deviation,
        ib_deviation,
        marginal_deviation,
        symbol_rates,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phi::phi_envelope;

    fn params(n: usize, alpha: f64) -> HammingParams {
        HammingParams::new(n, alpha).unwrap()
    }

    #[test]
    fn zero_rate_is_constant() {
        let p = params(3, 0.1);
        let rep = optimal_representation(&p, 0.0).unwrap();
        assert_eq!(rep.regime, Regime::Constant);
        assert_eq!(rep.cardinality, 1);
        let report = validate_representation(&p, &rep).unwrap();
        assert!(report.passed(), "{:?}", report.failures);
        assert_eq!(report.i_xt, 0.0);
        assert_eq!(report.i_yt, 0.0);
    }

    #[test]
    fn half_critical_rate_time_sharing() {
        let p = params(3, 0.1);
        let crit = critical_rate(&p).unwrap();
        let r = crit.r_c / 2.0;
        let rep = optimal_representation(&p, r).unwrap();
        assert_eq!(rep.regime, Regime::TimeSharing);
        assert_eq!(rep.cardinality, 4);
        let report = validate_representation(&p, &rep).unwrap();
        assert!(report.passed(), "{:?}", report.failures);
        assert!((report.i_xt - r).abs() <= 1e-10);
        assert!((report.i_yt - phi_envelope(&p, r).unwrap()).abs() <= 1e-10);
        assert!((rep.marginal[3] - 0.5).abs() <= 1e-12);
        for t in 0..3 {
            assert!((rep.marginal[t] - 0.5 / 3.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn full_rate_is_identity() {
        let p = params(3, 0.1);
        let rep = optimal_representation(&p, 3f64.ln()).unwrap();
        assert_eq!(rep.regime, Regime::Hamming);
        assert_eq!(rep.channel, Channel::identity(3).unwrap());
        let report = validate_representation(&p, &rep).unwrap();
        assert!(report.passed(), "{:?}", report.failures);
        assert!((report.i_yt - 0.4595804).abs() < 5e-8);
    }

    #[test]
    fn boundary_prefers_hamming() {
        let p = params(4, 0.05);
        let crit = critical_rate(&p).unwrap();
        let at_c = optimal_representation(&p, crit.r_c).unwrap();
        assert_eq!(at_c.regime, Regime::Hamming);
        assert_eq!(at_c.cardinality, 4);

        let shared = time_sharing(&p, &crit, crit.r_c).unwrap();
        assert_eq!(shared.zero_mass_symbols, vec![4]);
        let trimmed = Channel::new(
            shared
                .channel
                .rows()
                .iter()
                .map(|r| r.probs()[..4].to_vec())
                .collect(),
        )
        .unwrap();
        assert!(trimmed.max_abs_diff(&at_c.channel).unwrap() < 1e-12);
        assert!(validate_representation(&p, &shared).unwrap().passed());
    }

    #[test]
    fn binary_alphabet_uses_hamming_form() {
        let p = params(2, 0.1);
        let rep = optimal_representation(&p, 0.2).unwrap();
        assert_eq!(rep.regime, Regime::Hamming);
        assert!(validate_representation(&p, &rep).unwrap().passed());
    }

    #[test]
    fn errors() {
        let p = params(3, 0.1);
        assert!(optimal_representation(&p, -0.1).is_err());
        assert!(optimal_representation(&p, 1.2).is_err());
        assert!(optimal_representation(&params(3, 0.0), 0.3).is_err());
    }

    #[test]
    fn tampered_representation_fails_validation() {
        let p = params(3, 0.1);
        let mut rep = optimal_representation(&p, 0.5).unwrap();
        rep.r_target = 0.6;
        let report = validate_representation(&p, &rep).unwrap();
        assert!(!report.passed());

        let crit = critical_rate(&p).unwrap();
        let mut rep = optimal_representation(&p, crit.r_c / 3.0).unwrap();
        rep.regime = Regime::Hamming;
        assert!(!validate_representation(&p, &rep).unwrap().passed());
    }
}
