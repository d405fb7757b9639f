//! Subcommand implementations. Every function returns `Err(message)` for
//! invalid input (exit code 2); `verify` alone signals failed checks
//! through its `bool` result (exit code 1).

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use qkd_rotsym::verify::run_all;
use qkd_rotsym::{
    bell_diagnostics_closed_form, error_relation, estimate_vs_analytic, key_rate, m2_bound,
    m2_bound_oracle, BellDiagnostics, ChannelSpec, ErrorRelation, KeyRateReport, KrausChannel,
    LambdaMode, ProtocolParams, SimulationConfig,
};

use crate::config::{ProtocolSection, RunConfigFile, ThetaField};
use crate::output::{
    print_diagnostics, print_key_rates, print_relation, print_stats, sig12,
};

/// One analysis point: closed-form diagnostics, the error relation and the
/// key rates for a protocol/channel pair.
pub struct AnalysisPoint {
    pub diagnostics: BellDiagnostics,
    pub relation: ErrorRelation,
    pub key_rates: KeyRateReport,
}

pub fn analyze_point(
    params: &ProtocolParams,
    channel: &KrausChannel,
    lambda_mode: LambdaMode,
) -> Result<AnalysisPoint, String> {
    let diagnostics =
        bell_diagnostics_closed_form(params, &channel.decompose()).map_err(|e| e.to_string())?;
    let relation = error_relation(params).map_err(|e| e.to_string())?;
    let key_rates =
        key_rate(params, diagnostics.e_b, diagnostics.p_con, lambda_mode).map_err(|e| e.to_string())?;
    Ok(AnalysisPoint {
        diagnostics,
        relation,
        key_rates,
    })
}

fn config_echo(cfg: &RunConfigFile) -> serde_json::Value {
    serde_json::to_value(cfg).expect("config serializes")
}

pub fn cmd_analyze(cfg: &RunConfigFile, as_json: bool) -> Result<(), String> {
    let params = cfg.protocol.build()?;
    let channel = cfg.channel.build().map_err(|e| e.to_string())?;
    let point = analyze_point(&params, &channel, cfg.lambda_mode)?;
    if as_json {
        let doc = json!({
            "config": config_echo(cfg),
            "diagnostics": point.diagnostics,
            "error_relation": point.relation,
            "key_rates": point.key_rates,
        });
        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    } else {
        println!(
            "protocol: M={} theta={} sifting={:?}",
            params.basis_pairs(),
            crate::output::fixed12(params.theta()),
            params.sifting_mode()
        );
        println!("channel:  {}", channel.label());
        print_diagnostics(&point.diagnostics);
        print_relation(&point.relation);
        print_key_rates(&point.key_rates);
    }
    Ok(())
}

pub fn cmd_simulate(cfg: &RunConfigFile, as_json: bool) -> Result<(), String> {
    let params = cfg.protocol.build()?;
    let channel = cfg.channel.build().map_err(|e| e.to_string())?;
    let sim = cfg
        .simulation
        .as_ref()
        .ok_or("simulate needs --n/--seed or a config with a simulation block")?;
    let config = SimulationConfig {
        n: sim.n,
        seed: sim.seed,
        test_fraction: sim.test_fraction,
        params,
        channel,
    };
    let report = estimate_vs_analytic(&config).map_err(|e| e.to_string())?;
    if as_json {
        let doc = json!({
            "config": config_echo(cfg),
            "comparison": report,
        });
        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    } else {
        println!(
            "simulated {} signals (seed {}) at M={} theta={}",
            sim.n,
            sim.seed,
            config.params.basis_pairs(),
            crate::output::fixed12(config.params.theta())
        );
        print_stats(&report.stats);
        println!("against analytics:");
        println!(
            "  e_b   analytic = {}, z = {:+.3}",
            crate::output::fixed12(report.analytic_e_b),
            report.z_e_b
        );
        println!(
            "  p_con analytic = {}, z = {:+.3}",
            crate::output::fixed12(report.analytic_p_con),
            report.z_p_con
        );
    }
    Ok(())
}

pub const SWEEP_HEADER: &str =
    "M,theta,channel,param,p_i,p_x,p_y,p_z,e_b,e_p,p_con,lambda_worst,rate_eq22,rate_eq23";

pub fn cmd_sweep(
    protocol: &ProtocolSection,
    channel_spec: &ChannelSpec,
    lambda_mode: LambdaMode,
    thetas: &[f64],
    channel_params: Option<&[f64]>,
    out: &Path,
) -> Result<(), String> {
    if thetas.is_empty() {
        return Err("empty theta grid".into());
    }
    let param_values: Vec<f64> = match channel_params {
        Some([]) => return Err("empty parameter grid".into()),
        Some(values) => values.to_vec(),
        None => vec![channel_spec.scalar_param()],
    };
    let mut rows = Vec::with_capacity(thetas.len() * param_values.len());
    for &theta in thetas {
        for &value in &param_values {
            let spec = if channel_params.is_some() {
                channel_spec.with_scalar_param(value).map_err(|e| e.to_string())?
            } else {
                channel_spec.clone()
            };
            let section = ProtocolSection {
                basis_pairs: protocol.basis_pairs,
                theta: ThetaField(theta),
                sifting_mode: protocol.sifting_mode,
            };
            let params = section.build()?;
            let channel = spec.build().map_err(|e| e.to_string())?;
            let point = analyze_point(&params, &channel, lambda_mode)
                .map_err(|e| format!("theta={theta} param={value}: {e}"))?;
            let d = &point.diagnostics;
            let k = &point.key_rates;
            rows.push(format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                params.basis_pairs(),
                sig12(theta),
                spec.family(),
                sig12(value),
                sig12(d.p_i),
                sig12(d.p_x),
                sig12(d.p_y),
                sig12(d.p_z),
                sig12(d.e_b),
                sig12(d.e_p),
                sig12(d.p_con),
                sig12(k.lambda_worst),
                sig12(k.rate_shor_preskill),
                sig12(k.rate_h4),
            ));
        }
    }
    let file = std::fs::File::create(out)
        .map_err(|e| format!("cannot write {}: {e}", out.display()))?;
    let mut writer = std::io::BufWriter::new(file);
    let emit = |w: &mut dyn Write| -> std::io::Result<()> {
        w.write_all(SWEEP_HEADER.as_bytes())?;
        w.write_all(b"\n")?;
        for row in &rows {
            w.write_all(row.as_bytes())?;
            w.write_all(b"\n")?;
        }
        Ok(())
    };
    emit(&mut writer).map_err(|e| format!("cannot write {}: {e}", out.display()))?;
    writer
        .into_inner()
        .map_err(|e| format!("cannot write {}: {e}", out.display()))?
        .sync_all()
        .ok();
    println!("wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}

pub fn cmd_keyrate(
    protocol: &ProtocolSection,
    e_b: f64,
    p_con: Option<f64>,
    lambda_mode: LambdaMode,
    as_json: bool,
) -> Result<(), String> {
    let params = protocol.build()?;
    // Default to the noiseless conclusive probability at this theta.
    let p_con = p_con.unwrap_or_else(|| 0.5 * params.theta().sin().powi(2));
    let relation = error_relation(&params).map_err(|e| e.to_string())?;
    let report = key_rate(&params, e_b, p_con, lambda_mode).map_err(|e| e.to_string())?;
    if as_json {
        let doc = json!({
            "protocol": protocol,
            "error_relation": relation,
            "key_rates": report,
        });
        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    } else {
        print_relation(&relation);
        print_key_rates(&report);
    }
    Ok(())
}

#[derive(Serialize)]
struct BoundReport {
    theta: f64,
    e_b: f64,
    analytic: qkd_rotsym::M2BoundSolution,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_gap: Option<f64>,
}

pub fn cmd_bound(
    theta: f64,
    e_b: f64,
    grid_step: Option<f64>,
    as_json: bool,
) -> Result<(), String> {
    let analytic = m2_bound(theta, e_b).map_err(|e| e.to_string())?;
    let oracle = grid_step
        .map(|step| m2_bound_oracle(theta, e_b, step))
        .transpose()
        .map_err(|e| e.to_string())?;
    let report = BoundReport {
        theta,
        e_b,
        analytic,
        oracle,
        oracle_gap: oracle.map(|o| (o - analytic.e_p_max).abs()),
    };
    if as_json {
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        println!("two-basis worst-case phase error at theta={theta}, e_b={e_b}:");
        println!("  e_p_max       = {}", crate::output::fixed12(analytic.e_p_max));
        println!(
            "  maximizer     = (|a_i|^2, |a_x|^2) = ({}, {})",
            crate::output::fixed12(analytic.maximizer_ai2),
            crate::output::fixed12(analytic.maximizer_ax2)
        );
        println!(
            "  A = {}, B = {}, vertex regime: {}",
            crate::output::fixed12(analytic.a),
            crate::output::fixed12(analytic.b),
            analytic.feasible
        );
        if let (Some(o), Some(gap)) = (report.oracle, report.oracle_gap) {
            println!(
                "  grid oracle   = {} (gap {})",
                crate::output::fixed12(o),
                crate::output::fixed12(gap)
            );
        }
    }
    Ok(())
}

/// Runs every verification suite; returns whether all passed.
pub fn cmd_verify(trials: u64, seed: u64) -> Result<bool, String> {
    if trials < 1 {
        return Err("need at least one trial".into());
    }
    let outcomes = run_all(trials, seed).map_err(|e| e.to_string())?;
    println!(
        "{:<34} {:>7} {:>15} {:>11}   result",
        "suite", "cases", "max deviation", "tolerance"
    );
    let mut all_passed = true;
    for o in &outcomes {
        println!(
            "{:<34} {:>7} {:>15.3e} {:>11.1e}   {}",
            o.name,
            o.cases,
            o.max_deviation,
            o.tolerance,
            if o.passed { "PASS" } else { "FAIL" }
        );
        if let Some(failure) = &o.failure {
            println!("    first failing case: {failure} (replay with --seed {seed})");
        }
        all_passed &= o.passed;
    }
    if all_passed {
        println!("all suites passed (trials {trials}, seed {seed})");
    } else {
        println!("verification FAILED (trials {trials}, seed {seed})");
    }
    Ok(all_passed)
}
