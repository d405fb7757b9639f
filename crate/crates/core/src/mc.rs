//! Monte Carlo execution of the prepare-and-measure protocol.
//!
//! Every signal draws from its own counter-based random stream derived
//! from (seed, signal index), so a run is bit-for-bit reproducible no
//! matter how the work is scheduled across threads. Stream 0 is reserved
//! for the test-bit shuffle; signal i uses stream i + 1.
//!
//! The channel is applied as a generalized measurement: the Kraus outcome
//! j is sampled with probability `||E_j |phi>||^2` and the state
//! renormalized, which is exact for the pure signal states sent here.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::KrausChannel;
use crate::edp::bell_diagnostics_closed_form;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::protocol::{
    conclusive_probability, measurement_setups, prepare_state, Bit, MeasurementSetup,
    OutcomeLabel, ProtocolParams,
};

/// One simulation request.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub n: u64,
    pub seed: u64,
    pub test_fraction: f64,
    pub params: ProtocolParams,
    pub channel: KrausChannel,
}

impl SimulationConfig {
    fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidParameter("need at least one signal".into()));
        }
        if !(0.0..1.0).contains(&self.test_fraction) {
            return Err(Error::InvalidParameter(format!(
                "test fraction must lie in [0, 1), got {}",
                self.test_fraction
            )));
        }
        Ok(())
    }
}

/// Counts and estimators from one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptStats {
    pub n_total: u64,
    pub n_basis_matched: u64,
    pub n_conclusive: u64,
    pub n_test: u64,
    pub n_test_errors: u64,
    /// Estimated bit error rate: over the revealed test bits when there
    /// are any, otherwise over every conclusive bit (the omniscient
    /// simulator estimate; same asymptotic limit).
    pub e_b_hat: f64,
    pub e_b_se: f64,
    /// Conclusive probability among basis-matched signals.
    pub p_con_hat: f64,
    pub p_con_se: f64,
    pub key_bits_remaining: u64,
    pub warnings: Vec<String>,
}

enum SignalOutcome {
    NotMatched,
    Inconclusive,
    Conclusive { error: bool },
}

fn simulate_signal(
    index: u64,
    seed: u64,
    basis_pairs: usize,
    states: &[[ComplexMatrix; 2]],
    setups: &[[MeasurementSetup; 2]],
    kraus: &[ComplexMatrix],
) -> SignalOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index + 1);

    let alice_basis = rng.random_range(0..basis_pairs);
    let alice_bit = if rng.random_range(0..2u8) == 0 { Bit::Zero } else { Bit::One };
    let sent = &states[alice_basis][alice_bit.index()];

    // Kraus outcome by its Born weight, then renormalize.
    let images: Vec<ComplexMatrix> = kraus
        .iter()
        .map(|op| op.matmul(sent).expect("2x2 times ket"))
        .collect();
    let weights: Vec<f64> = images.iter().map(|v| v.frobenius_norm().powi(2)).collect();
    let draw: f64 = rng.random();
    let mut cumulative = 0.0;
    let mut chosen = images.len() - 1;
    for (j, w) in weights.iter().enumerate() {
        cumulative += w;
        if draw < cumulative {
            chosen = j;
            break;
        }
    }
    let norm = weights[chosen].sqrt();
    let received = images[chosen].scale_real(1.0 / norm);

    let bob_basis = rng.random_range(0..basis_pairs);
    let which_setup = rng.random_range(0..2usize);
    if bob_basis != alice_basis {
        return SignalOutcome::NotMatched;
    }
    let setup = &setups[bob_basis][which_setup];
    let overlap = setup.outcomes[0]
        .direction
        .trace_inner(&received)
        .expect("ket inner product");
    let p_first = overlap.norm_sqr().clamp(0.0, 1.0);
    let outcome = if rng.random::<f64>() < p_first {
        &setup.outcomes[0]
    } else {
        &setup.outcomes[1]
    };
    match outcome.label {
        OutcomeLabel::Inconclusive => SignalOutcome::Inconclusive,
        OutcomeLabel::Conclusive(bit) => SignalOutcome::Conclusive {
            error: bit != alice_bit,
        },
    }
}

/// Runs the protocol for `config.n` signals and reports counts and
/// estimators. Deterministic for a fixed seed regardless of thread count.
pub fn run(config: &SimulationConfig) -> Result<TranscriptStats> {
    config.validate()?;
    let params = &config.params;
    let m = params.basis_pairs() as usize;
    let states: Vec<[ComplexMatrix; 2]> = (0..m)
        .map(|l| {
            Ok([
                prepare_state(params, l, Bit::Zero)?.ket,
                prepare_state(params, l, Bit::One)?.ket,
            ])
        })
        .collect::<Result<_>>()?;
    let setups: Vec<[MeasurementSetup; 2]> = (0..m)
        .map(|k| measurement_setups(params, k))
        .collect::<Result<_>>()?;
    let kraus = config.channel.operators().to_vec();
    let seed = config.seed;

    let outcomes: Vec<SignalOutcome> = (0..config.n)
        .into_par_iter()
        .map(|i| simulate_signal(i, seed, m, &states, &setups, &kraus))
        .collect();

    let mut n_basis_matched = 0u64;
    let mut conclusive_errors: Vec<bool> = Vec::new();
    for outcome in &outcomes {
        match outcome {
            SignalOutcome::NotMatched => {}
            SignalOutcome::Inconclusive => n_basis_matched += 1,
            SignalOutcome::Conclusive { error } => {
                n_basis_matched += 1;
                conclusive_errors.push(*error);
            }
        }
    }
    let n_conclusive = conclusive_errors.len() as u64;

    let mut warnings = Vec::new();
    let n_test = if config.test_fraction > 0.0 {
        if (config.n as f64) * config.test_fraction < 1.0 {
            warnings.push(format!(
                "test fraction {} of {} signals selects no test bits",
                config.test_fraction, config.n
            ));
            0
        } else {
            ((config.test_fraction * n_conclusive as f64).ceil() as u64).min(n_conclusive)
        }
    } else {
        0
    };

    // Seeded shuffle on the dedicated stream keeps the test-bit choice
    // reproducible and independent of the per-signal streams.
    let mut order: Vec<usize> = (0..conclusive_errors.len()).collect();
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(seed);
    shuffle_rng.set_stream(0);
    order.shuffle(&mut shuffle_rng);
    let n_test_errors = order[..n_test as usize]
        .iter()
        .filter(|&&i| conclusive_errors[i])
        .count() as u64;

    let binomial = |successes: u64, trials: u64| -> (f64, f64) {
        if trials == 0 {
            return (0.0, 0.0);
        }
        let p = successes as f64 / trials as f64;
        (p, (p * (1.0 - p) / trials as f64).sqrt())
    };
    let (e_b_hat, e_b_se) = if n_test > 0 {
        binomial(n_test_errors, n_test)
    } else {
        let total_errors = conclusive_errors.iter().filter(|&&e| e).count() as u64;
        binomial(total_errors, n_conclusive)
    };
    let (p_con_hat, p_con_se) = binomial(n_conclusive, n_basis_matched);

    Ok(TranscriptStats {
        n_total: config.n,
        n_basis_matched,
        n_conclusive,
        n_test,
        n_test_errors,
        e_b_hat,
        e_b_se,
        p_con_hat,
        p_con_se,
        key_bits_remaining: n_conclusive - n_test,
        warnings,
    })
}

/// Simulation estimates next to their analytic targets, with z-scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub stats: TranscriptStats,
    pub analytic_e_b: f64,
    pub analytic_p_con: f64,
    pub z_e_b: f64,
    pub z_p_con: f64,
}

/// Runs the simulation and compares its estimators against the closed-form
/// bit error rate and the enumerated conclusive probability.
pub fn estimate_vs_analytic(config: &SimulationConfig) -> Result<ComparisonReport> {
    let stats = run(config)?;
    let diagnostics =
        bell_diagnostics_closed_form(&config.params, &config.channel.decompose())?;
    let analytic_p_con = conclusive_probability(&config.params, &config.channel)?;
    let z = |estimate: f64, target: f64, se: f64| -> f64 {
        if se == 0.0 {
            if (estimate - target).abs() <= f64::EPSILON {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (estimate - target) / se
        }
    };
    Ok(ComparisonReport {
        z_e_b: z(stats.e_b_hat, diagnostics.e_b, stats.e_b_se),
        z_p_con: z(stats.p_con_hat, analytic_p_con, stats.p_con_se),
        analytic_e_b: diagnostics.e_b,
        analytic_p_con,
        stats,
    })
}
