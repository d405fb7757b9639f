//! Output formatting shared by the subcommands.

use qkd_rotsym::{BellDiagnostics, ErrorRelation, KeyRateReport, RelationKind, TranscriptStats};

/// 12 significant digits, locale-free, round-trippable.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Fixed 12 decimals for the human-readable reports.
pub fn fixed12(x: f64) -> String {
    format!("{x:.12}")
}

pub fn print_diagnostics(d: &BellDiagnostics) {
    println!("bell diagnostics:");
    println!("  p_i     = {}", fixed12(d.p_i));
    println!("  p_x     = {}", fixed12(d.p_x));
    println!("  p_y     = {}", fixed12(d.p_y));
    println!("  p_z     = {}", fixed12(d.p_z));
    println!("  e_b     = {}", fixed12(d.e_b));
    println!("  e_p     = {}", fixed12(d.e_p));
    println!("  n_prime = {}", fixed12(d.n_prime));
    println!("  p_con   = {}", fixed12(d.p_con));
}

pub fn print_relation(r: &ErrorRelation) {
    let sign = match r.kind {
        RelationKind::Equality => "=",
        RelationKind::UpperBound => "<=",
    };
    println!(
        "error relation: e_p {sign} {} * e_b ({})",
        fixed12(r.slope),
        match r.kind {
            RelationKind::Equality => "equality, independent of M",
            RelationKind::UpperBound => "worst-case bound",
        }
    );
}

pub fn print_key_rates(k: &KeyRateReport) {
    println!("key rates:");
    println!("  e_b               = {}", fixed12(k.e_b));
    println!("  e_p               = {}", fixed12(k.e_p));
    println!(
        "  lambda            in [{}, {}], worst {}",
        fixed12(k.lambda_min),
        fixed12(k.lambda_max),
        fixed12(k.lambda_worst)
    );
    println!("  p_con             = {}", fixed12(k.p_con));
    println!("  sift_factor       = {}", fixed12(k.sift_factor));
    println!("  rate_shor_preskill = {}", fixed12(k.rate_shor_preskill));
    println!("  rate_h4            = {}", fixed12(k.rate_h4));
    if k.abort_recommended {
        println!("  abort recommended: no positive rate at this error level");
    }
}

pub fn print_stats(s: &TranscriptStats) {
    println!("transcript:");
    println!("  n_total            = {}", s.n_total);
    println!("  n_basis_matched    = {}", s.n_basis_matched);
    println!("  n_conclusive       = {}", s.n_conclusive);
    println!("  n_test             = {}", s.n_test);
    println!("  n_test_errors      = {}", s.n_test_errors);
    println!("  key_bits_remaining = {}", s.key_bits_remaining);
    println!("  e_b_hat   = {} (se {})", fixed12(s.e_b_hat), fixed12(s.e_b_se));
    println!("  p_con_hat = {} (se {})", fixed12(s.p_con_hat), fixed12(s.p_con_se));
    for w in &s.warnings {
        println!("  warning: {w}");
    }
}
