//! Frozen constants: each one is re-derived by an independent oracle and
//! then checked against the library.

mod fixtures;

use fixtures::*;
use hamming_ib::hamming::{h_n, HammingParams};
use hamming_ib::oracle::{phi_bruteforce, SearchConfig};
use hamming_ib::phi::{critical_rate, ib_value, inflection_point, phi};

fn p(n: usize, alpha: f64) -> HammingParams {
    HammingParams::new(n, alpha).unwrap()
}

#[test]
fn closed_form_fixtures_match_direct_entropy() {
    assert!(rel_close(
        3f64.ln() - h_direct(3, 0.1),
        PHI_FULL_RATE_3_01,
        1e-9
    ));
    assert!(rel_close(h_direct(3, 0.1), H3_01, 1e-9));
    assert!(rel_close(1.5f64.ln(), LOG_THREE_HALVES, 1e-9));
    assert!(rel_close(h_n(3, 0.1).unwrap(), H3_01, 1e-9));
    assert!(rel_close(
        phi(&p(3, 0.1), 3f64.ln()).unwrap(),
        PHI_FULL_RATE_3_01,
        1e-9
    ));
    assert!(rel_close(
        ib_value(&p(3, 0.5), 3f64.ln()).unwrap(),
        LOG_THREE_HALVES,
        1e-9
    ));
}

#[test]
fn phi_at_half_rate() {
    let r = 0.5 * 3f64.ln();
    assert!(rel_close(phi_direct(3, 0.1, r), PHI_HALF_LOG3_3_01, 1e-9));
    assert!(rel_close(
        phi(&p(3, 0.1), r).unwrap(),
        PHI_HALF_LOG3_3_01,
        1e-9
    ));
    let brute = phi_bruteforce(&p(3, 0.1), r, &SearchConfig::for_alphabet(3)).unwrap();
    assert!(
        rel_close(brute.value, PHI_HALF_LOG3_3_01, 1e-9),
        "{}",
        brute.value
    );
}

#[test]
fn inflection_fixture() {
    let scanned = sign_scan_root(|b| eta_direct(3, 0.1, b), 0.0, 1.0 / 3.0, 1_000_000).unwrap();
    assert!((scanned - BETA_S_3_01).abs() < 1e-6, "{scanned}");
    let (r_s, beta_s) = inflection_point(&p(3, 0.1)).unwrap();
    assert!(rel_close(beta_s, BETA_S_3_01, 1e-9));
    assert!(rel_close(r_s, R_S_3_01, 1e-9));
    assert!(rel_close(
        3f64.ln() - h_direct(3, BETA_S_3_01),
        R_S_3_01,
        1e-8
    ));
}

#[test]
fn critical_fixture() {
    let by_ratio = tangent_rate_by_ratio(3, 0.1);
    assert!((by_ratio - R_C_3_01).abs() < 1e-6, "{by_ratio}");
    let c = critical_rate(&p(3, 0.1)).unwrap();
    assert!(rel_close(c.r_c, R_C_3_01, 1e-9));
    assert!(rel_close(c.beta_c, BETA_C_3_01, 1e-9));
    assert!(rel_close(c.envelope_slope, ENVELOPE_SLOPE_3_01, 1e-9));
    assert!(rel_close(
        phi_direct(3, 0.1, R_C_3_01) / R_C_3_01,
        ENVELOPE_SLOPE_3_01,
        1e-8
    ));
}
