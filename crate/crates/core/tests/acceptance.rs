//! Acceptance suite: every quantitative contract of the library, checked
//! at its stated tolerance. One printed line per criterion; run with
//! `cargo test -p qkd-rotsym --test acceptance -- --nocapture` to see them.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::time::Instant;

use qkd_rotsym::verify::{
    suite_error_relation, suite_key_rate_identities, suite_m2_bound_oracle,
    suite_m2_bound_saturation, suite_m_independence, suite_oracle_equivalence,
    suite_phi_operator, suite_rotation_covariance, suite_spherical_lemma, SuiteOutcome,
};
use qkd_rotsym::{
    error_relation, estimate_vs_analytic, lambda_worst_case, KrausChannel, LambdaMode,
    ProtocolParams, SiftingMode, SimulationConfig,
};

const TRIALS: u64 = 200;
const SEED: u64 = 7;

fn report(number: u32, outcome: &SuiteOutcome) {
    println!(
        "acceptance {number} [{}]: {} (max deviation {:.3e}, tolerance {:.1e}, {} cases)",
        outcome.name,
        if outcome.passed { "PASS" } else { "FAIL" },
        outcome.max_deviation,
        outcome.tolerance,
        outcome.cases
    );
    assert!(
        outcome.passed,
        "criterion {number} failed at {:?} with deviation {:.3e}",
        outcome.failure, outcome.max_deviation
    );
}

fn report_direct(number: u32, name: &str, passed: bool, detail: String) {
    println!(
        "acceptance {number} [{name}]: {} ({detail})",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "criterion {number} failed: {detail}");
}

#[test]
fn criterion_01_bit_phase_error_relation() {
    let start = Instant::now();
    let outcome = suite_error_relation(TRIALS, SEED).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    report(1, &outcome);
    report_direct(
        1,
        "error-relation runtime",
        elapsed <= 10.0,
        format!("{elapsed:.2}s of 10s budget"),
    );
}

#[test]
fn criterion_02_closed_form_oracle_equivalence() {
    report(2, &suite_oracle_equivalence(TRIALS, SEED).unwrap());
}

#[test]
fn criterion_03_m_independence() {
    report(3, &suite_m_independence(TRIALS, SEED).unwrap());
}

#[test]
fn criterion_04_sarg_point() {
    let params = ProtocolParams::new(4, FRAC_PI_4, SiftingMode::Generic).unwrap();
    let relation = error_relation(&params).unwrap();
    let slope_dev = (relation.slope - 1.5).abs();
    let mut lambda_dev = 0.0f64;
    for i in 1..=33 {
        let e_b = i as f64 * 0.01;
        let e_p = relation.slope * e_b;
        let lam = lambda_worst_case(&params, e_b, e_p, LambdaMode::Admissible).unwrap();
        if e_b < 1.0 / 3.0 {
            lambda_dev = lambda_dev.max((lam.worst - 0.5 * e_b).abs());
        }
    }
    report_direct(
        4,
        "SARG04 slope and worst-case lambda",
        slope_dev <= 1e-12 && lambda_dev <= 1e-12,
        format!("slope deviation {slope_dev:.3e}, lambda deviation {lambda_dev:.3e}"),
    );
}

#[test]
fn criterion_05_m2_bound() {
    report(5, &suite_m2_bound_saturation(TRIALS, SEED).unwrap());
    report(5, &suite_m2_bound_oracle().unwrap());
}

#[test]
fn criterion_06_spherical_average_lemma() {
    report(6, &suite_spherical_lemma().unwrap());
}

#[test]
fn criterion_07_phi_closed_form_and_commutation() {
    report(7, &suite_phi_operator(SEED).unwrap());
}

#[test]
fn criterion_08_rotation_covariance() {
    report(8, &suite_rotation_covariance(TRIALS, SEED).unwrap());
}

#[test]
fn criterion_09_monte_carlo_consistency() {
    let start = Instant::now();

    let identity_cfg = SimulationConfig {
        n: 1_000_000,
        seed: SEED,
        test_fraction: 0.0,
        params: ProtocolParams::new(4, FRAC_PI_4, SiftingMode::Generic).unwrap(),
        channel: KrausChannel::identity(),
    };
    let identity = estimate_vs_analytic(&identity_cfg).unwrap();
    let ideal_p_con = 0.5 * FRAC_PI_4.sin().powi(2);
    let identity_ok = identity.stats.e_b_hat == 0.0
        && (identity.stats.p_con_hat - ideal_p_con).abs() <= 4.0 * identity.stats.p_con_se;

    // Same check at the BB84 angle, where p_con should sit near 1/2.
    let bb84_cfg = SimulationConfig {
        params: ProtocolParams::new(4, FRAC_PI_2, SiftingMode::Generic).unwrap(),
        ..identity_cfg.clone()
    };
    let bb84 = estimate_vs_analytic(&bb84_cfg).unwrap();
    let bb84_ok = bb84.stats.e_b_hat == 0.0
        && (bb84.stats.p_con_hat - 0.5).abs() <= 4.0 * bb84.stats.p_con_se;

    let noisy_cfg = SimulationConfig {
        channel: KrausChannel::depolarizing(0.1).unwrap(),
        ..identity_cfg.clone()
    };
    let noisy = estimate_vs_analytic(&noisy_cfg).unwrap();
    let noisy_ok = (noisy.analytic_e_b - 1.0 / 11.0).abs() <= 1e-12 && noisy.z_e_b.abs() <= 4.0;

    let elapsed = start.elapsed().as_secs_f64();
    report_direct(
        9,
        "Monte Carlo consistency",
        identity_ok && bb84_ok && noisy_ok && elapsed <= 60.0,
        format!(
            "identity e_b_hat {}, p_con z {:.2}; depolarizing e_b z {:.2}; {elapsed:.2}s of 60s",
            identity.stats.e_b_hat, identity.z_p_con, noisy.z_e_b
        ),
    );
}

#[test]
fn criterion_10_key_rate_identities() {
    report(10, &suite_key_rate_identities().unwrap());
}
