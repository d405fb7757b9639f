//! Security analysis: bit/phase error relations, the M = 2 maximization
//! bound, entropy functions, worst-case mutual-information parameter and
//! the two key-rate formulas.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{ProtocolParams, SiftingMode};

/// Whether an error relation is exact or a worst-case bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    Equality,
    UpperBound,
}

/// The relation `e_p = slope * e_b` (M > 2, exact) or
/// `e_p <= slope * e_b` (M = 2, bound).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRelation {
    #[serde(rename = "M")]
    pub basis_pairs: u32,
    pub theta: f64,
    pub slope: f64,
    pub kind: RelationKind,
}

/// For M > 2 the slope is `1 + cos^2(theta)`; for M = 2 it is
/// `(1 + cos^2(theta)) / cos^2(theta)`, which diverges at theta = pi/2 --
/// that corner is refused.
pub fn error_relation(params: &ProtocolParams) -> Result<ErrorRelation> {
    let c = params.theta().cos().powi(2);
    if params.basis_pairs() == 2 {
        if params.is_degenerate() {
            return Err(Error::DegenerateProtocol(
                "M = 2 with theta = pi/2: the phase error rate diverges and no key can be \
                 distilled"
                    .into(),
            ));
        }
        Ok(ErrorRelation {
            basis_pairs: 2,
            theta: params.theta(),
            slope: (1.0 + c) / c,
            kind: RelationKind::UpperBound,
        })
    } else {
        Ok(ErrorRelation {
            basis_pairs: params.basis_pairs(),
            theta: params.theta(),
            slope: 1.0 + c,
            kind: RelationKind::Equality,
        })
    }
}

/// Solution of the M = 2 worst-case phase-error maximization at fixed bit
/// error rate.
///
/// With `B = 1/(1 + cos^2 theta)` and `A = B cos^2 theta`: for
/// `e_b <= A` the maximum is attained at
/// `(|a_i|^2, |a_x|^2) = ((A - e_b)/(A sin^2 theta), 0)` with
/// `e_p = e_b (1 + cos^2 theta)/cos^2 theta`; beyond `A` the phase error
/// rate is clamped at 1 (the `e_b <= A` regime already spans all of
/// `[0, 1]`). `feasible` records whether the closed-form vertex applies,
/// i.e. whether `e_b <= A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct M2BoundSolution {
    pub e_p_max: f64,
    pub maximizer_ai2: f64,
    pub maximizer_ax2: f64,
    pub a: f64,
    pub b: f64,
    pub feasible: bool,
}

pub fn m2_bound(theta: f64, e_b: f64) -> Result<M2BoundSolution> {
    validate_rate("e_b", e_b)?;
    let (s, c) = validate_m2_theta(theta)?;
    let b = 1.0 / (1.0 + c);
    let a = b * c;
    if e_b <= a {
        Ok(M2BoundSolution {
            e_p_max: e_b * (1.0 + c) / c,
            maximizer_ai2: (a - e_b) / (a * s),
            maximizer_ax2: 0.0,
            a,
            b,
            feasible: true,
        })
    } else {
        Ok(M2BoundSolution {
            e_p_max: 1.0,
            maximizer_ai2: 0.0,
            maximizer_ax2: 0.0,
            a,
            b,
            feasible: false,
        })
    }
}

/// Brute-force companion to [`m2_bound`]: scans `(|a_i|^2, |a_x|^2)` on a
/// grid, eliminates `(|a_y|^2, |a_z|^2)` through the two equality
/// constraints, and keeps the largest phase error rate among nonnegative
/// solutions. The nonnegativity slack scales with the grid step, so the
/// answer is exact only up to a few grid steps. Used as a test-time check,
/// never in the production path.
pub fn m2_bound_oracle(theta: f64, e_b: f64, grid_step: f64) -> Result<f64> {
    validate_rate("e_b", e_b)?;
    let (s, c) = validate_m2_theta(theta)?;
    if !(grid_step > 0.0 && grid_step <= 0.01) {
        return Err(Error::InvalidParameter(format!(
            "grid step must lie in (0, 0.01], got {grid_step}"
        )));
    }
    let b = 1.0 / (1.0 + c);
    let a = b * c;
    // Per-constraint slack calibrated so corner solutions within half a
    // step of the grid still qualify, without inflating the optimum by
    // more than about one step.
    let slack_y = 0.5 * grid_step * a + 1e-12;
    let slack_z = 0.5 * grid_step * b + 1e-12;
    let hi = 1.0 / s;
    let steps = (hi / grid_step).ceil() as usize;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=steps {
        let ai2 = i as f64 * grid_step;
        // (a_i^2 + a_x^2) sin^2 <= 1, so the inner range shrinks.
        let remaining = hi - ai2;
        if remaining < -0.5 * grid_step {
            break;
        }
        let inner_steps = (remaining.max(0.0) / grid_step).ceil() as usize;
        for k in 0..=inner_steps {
            let ax2 = k as f64 * grid_step;
            let ay2 = (e_b - a) / s + a * ai2 - b * ax2;
            let az2 = (b - e_b) / s - b * ai2 + a * ax2;
            if ay2 >= -slack_y && az2 >= -slack_z {
                let e_p = (ay2 + az2) * (1.0 + c);
                if e_p > best {
                    best = e_p;
                }
            }
        }
    }
    if best == f64::NEG_INFINITY {
        // No grid point met the constraints; the feasible set is thinner
        // than the grid. Report zero, which is correct to grid tolerance
        // for the only case where this happens (e_b = 0 corners).
        best = 0.0;
    }
    Ok(best.max(0.0))
}

fn validate_m2_theta(theta: f64) -> Result<(f64, f64)> {
    if !(theta > 0.0 && theta < std::f64::consts::FRAC_PI_2 - 1e-12) {
        return Err(Error::DegenerateProtocol(format!(
            "the M = 2 bound needs 0 < theta < pi/2 (cos^2 theta divides); got {theta}"
        )));
    }
    Ok((theta.sin().powi(2), theta.cos().powi(2)))
}

fn validate_rate(name: &str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) || !value.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "{name} must lie in [0, 1], got {value}"
        )));
    }
    Ok(())
}

fn xlog2(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * p.log2()
    }
}

/// Binary Shannon entropy with the 0 log 0 = 0 convention.
pub fn entropy_h2(p: f64) -> Result<f64> {
    validate_rate("entropy argument", p)?;
    Ok(-xlog2(p) - xlog2(1.0 - p))
}

/// Quaternary Shannon entropy of a distribution summing to one.
pub fn entropy_h4(x1: f64, x2: f64, x3: f64, x4: f64) -> Result<f64> {
    for x in [x1, x2, x3, x4] {
        validate_rate("entropy argument", x)?;
    }
    let sum = x1 + x2 + x3 + x4;
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "quaternary entropy arguments must sum to 1, got {sum}"
        )));
    }
    Ok(-xlog2(x1) - xlog2(x2) - xlog2(x3) - xlog2(x4))
}

/// How to bound the mutual-information parameter lambda (= p_y).
///
/// `Admissible` uses the interval `[e_b cos^2 theta, e_b]` implied by the
/// closed-form diagonal elements, which only holds for M > 2;
/// `Pessimistic` assumes nothing beyond `0 <= lambda <= e_b`. At M = 2
/// only the pessimistic analysis is available and is used regardless of
/// the requested mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaMode {
    /// The closed-form admissible range (serialized as `paper_range`).
    #[default]
    #[serde(rename = "paper_range")]
    Admissible,
    Pessimistic,
}

/// Admissible interval for lambda and the value minimizing the key rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaInterval {
    pub min: f64,
    pub max: f64,
    pub worst: f64,
}

/// Worst-case lambda selection.
///
/// Pessimistic range `[0, e_b]`: the worst case is `lambda = e_b e_p`.
/// Admissible range (M > 2) `[e_b cos^2 theta, e_b]`: the worst case is
/// the lower endpoint while `e_b < cos^2 theta / (1 + cos^2 theta)`, and
/// `e_b e_p` beyond it.
pub fn lambda_worst_case(
    params: &ProtocolParams,
    e_b: f64,
    e_p: f64,
    mode: LambdaMode,
) -> Result<LambdaInterval> {
    validate_rate("e_b", e_b)?;
    validate_rate("e_p", e_p)?;
    let c = params.theta().cos().powi(2);
    let interval = if mode == LambdaMode::Pessimistic || params.basis_pairs() == 2 {
        LambdaInterval {
            min: 0.0,
            max: e_b,
            worst: e_b * e_p,
        }
    } else {
        let worst = if e_b < c / (1.0 + c) { e_b * c } else { e_b * e_p };
        LambdaInterval {
            min: e_b * c,
            max: e_b,
            worst,
        }
    };
    if e_b - interval.worst < -1e-12 || e_p - interval.worst < -1e-12 {
        return Err(Error::Inconsistency(format!(
            "worst-case lambda {} exceeds e_b = {e_b} or e_p = {e_p}",
            interval.worst
        )));
    }
    Ok(interval)
}

/// Asymptotic secret key rates for an observed bit error rate.
///
/// `rate_shor_preskill` uses the two-entropy bracket
/// `1 - H2(e_b) - H2(e_p)`; `rate_h4` the joint-distribution bracket
/// `1 - H4(1 - e_b - e_p + lambda, e_b - lambda, lambda, e_p - lambda)`
/// at the worst-case lambda, which is never smaller. Both are scaled by
/// `sift_factor` (p_con / M, or p_con when sifting is basis-free).
/// Negative rates are reported as computed, with `abort_recommended` set;
/// aborting is a protocol decision, not an arithmetic one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyRateReport {
    pub e_b: f64,
    pub e_p: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_worst: f64,
    pub rate_shor_preskill: f64,
    pub rate_h4: f64,
    pub p_con: f64,
    pub sift_factor: f64,
    pub abort_recommended: bool,
}

pub fn key_rate(
    params: &ProtocolParams,
    e_b: f64,
    p_con: f64,
    mode: LambdaMode,
) -> Result<KeyRateReport> {
    if !(0.0..1.0).contains(&e_b) {
        return Err(Error::InvalidParameter(format!(
            "e_b must lie in [0, 1), got {e_b}"
        )));
    }
    if !(p_con > 0.0 && p_con <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "p_con must lie in (0, 1], got {p_con}"
        )));
    }
    let relation = error_relation(params)?;
    let e_p = if params.basis_pairs() == 2 {
        // Worst admissible phase error rate, clamped at 1 beyond the
        // vertex regime.
        m2_bound(params.theta(), e_b)?.e_p_max
    } else {
        relation.slope * e_b
    };
    if e_p > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "e_b = {e_b} implies a phase error rate {e_p} > 1; no physical channel reaches \
             this point and the entropies are undefined"
        )));
    }
    let lambda = lambda_worst_case(params, e_b, e_p, mode)?;
    let w = lambda.worst;
    let bracket_sp = 1.0 - entropy_h2(e_b)? - entropy_h2(e_p)?;
    let bracket_h4 = 1.0 - entropy_h4(1.0 - e_b - e_p + w, e_b - w, w, e_p - w)?;
    let sift_factor = match params.sifting_mode() {
        SiftingMode::Generic => p_con / params.basis_pairs() as f64,
        SiftingMode::BasisFree => p_con,
    };
    let rate_shor_preskill = sift_factor * bracket_sp;
    let rate_h4 = sift_factor * bracket_h4;
    Ok(KeyRateReport {
        e_b,
        e_p,
        lambda_min: lambda.min,
        lambda_max: lambda.max,
        lambda_worst: w,
        rate_shor_preskill,
        rate_h4,
        p_con,
        sift_factor,
        abort_recommended: rate_h4 <= 0.0,
    })
}
