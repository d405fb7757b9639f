//! Entanglement-distillation picture of the protocol.
//!
//! A prepare-and-measure run is equivalent to Alice preparing the bipartite
//! ket `|psi_l> = (|0_z>|phi_l> + |1_z>|phi_{-l}>)/sqrt(2)`, sending the
//! second register through the channel, and Bob filtering. Averaging over
//! the basis index l gives the shared state
//!
//! ```text
//! rho_AB = (1/M) sum_j sum_l P[(I (x) F_0 R_{-l pi/M} E_j R_{l pi/M}) |psi_0>]
//! ```
//!
//! normalized to unit trace. Its diagonal in the Bell basis carries the
//! complete error statistics: `e_b = p_x + p_y`, `e_p = p_y + p_z`.
//!
//! Two independent routes to those diagnostics are provided and
//! cross-checked: direct numerical construction of `rho_AB`
//! ([`rho_ab_numerical`] + [`bell_diagnostics_numerical`], the oracle) and
//! the closed forms in the Pauli weights of the channel
//! ([`bell_diagnostics_closed_form`]). For M > 2 the closed forms are
//! independent of M; M = 2 is a genuinely different case with its own
//! expressions and without the continuous rotation invariance.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::channel::{KrausChannel, PauliDecomposition};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::protocol::{filter_base, ket_0z, ket_1z, prepare_state, rotation, Bit, ProtocolParams};

/// Below this pre-normalization trace a channel is reported as degenerate.
const TRACE_FLOOR: f64 = 1e-14;

/// Which route produced a bipartite state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateSource {
    Numerical,
    ClosedForm,
}

/// A normalized two-qubit density matrix together with its
/// pre-normalization trace, which carries the filter-success information.
#[derive(Debug, Clone)]
pub struct BipartiteState {
    matrix: ComplexMatrix,
    norm_constant: f64,
    basis_pairs: u32,
    source: StateSource,
}

impl BipartiteState {
    /// The unit-trace density matrix.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Trace of the raw basis-averaged sum before normalization. This
    /// equals the conclusive probability of the protocol run.
    pub fn norm_constant(&self) -> f64 {
        self.norm_constant
    }

    pub fn basis_pairs(&self) -> u32 {
        self.basis_pairs
    }

    pub fn source(&self) -> StateSource {
        self.source
    }
}

/// The bipartite signal ket for basis `l`:
/// `(|0_z>|phi_l> + |1_z>|phi_{-l}>)/sqrt(2)`, equal to
/// `(I (x) rotation(l pi/M)) |psi_0>`.
pub fn psi_l(params: &ProtocolParams, l: usize) -> Result<ComplexMatrix> {
    let phi_plus = prepare_state(params, l, Bit::Zero)?.ket;
    let phi_minus = prepare_state(params, l, Bit::One)?.ket;
    let a = ket_0z().tensor(&phi_plus)?;
    let b = ket_1z().tensor(&phi_minus)?;
    Ok(a.add(&b)?.scale_real(FRAC_1_SQRT_2))
}

/// Builds the averaged, filtered bipartite state by direct enumeration over
/// Kraus operators and basis indices. This is the numerical oracle the
/// closed forms are validated against.
pub fn rho_ab_numerical(params: &ProtocolParams, channel: &KrausChannel) -> Result<BipartiteState> {
    let m = params.basis_pairs() as usize;
    let psi0 = psi_l(params, 0)?;
    let f0 = filter_base(params.theta());
    let i2 = ComplexMatrix::identity(2);
    let mut acc = ComplexMatrix::zeros(4, 4);
    for op in channel.operators() {
        for l in 0..m {
            let angle = l as f64 * params.basis_step();
            let bob_op = f0
                .matmul(&rotation(-angle))?
                .matmul(op)?
                .matmul(&rotation(angle))?;
            let v = i2.tensor(&bob_op)?.matmul(&psi0)?;
            acc = acc.add(&v.outer()?)?;
        }
    }
    acc = acc.scale_real(1.0 / m as f64);
    finish_state(acc, params.basis_pairs(), StateSource::Numerical)
}

/// Builds the same state through the commuting/anticommuting split of each
/// Kraus operator and the averaged projector [`phi_operator`]. Useful as a
/// structural cross-check of the numerical route.
pub fn rho_ab_decomposed(params: &ProtocolParams, channel: &KrausChannel) -> Result<BipartiteState> {
    let psi0 = psi_l(params, 0)?;
    let psi0_proj = psi0.outer()?;
    let phi = phi_operator(params)?;
    let i2 = ComplexMatrix::identity(2);
    let filter4 = i2.tensor(&filter_base(params.theta()))?;
    let mut acc = ComplexMatrix::zeros(4, 4);
    for coeff in channel.decompose().coefficients {
        let u4 = i2.tensor(&coeff.commuting_part())?;
        let v4 = i2.tensor(&coeff.anticommuting_part())?;
        acc = acc.add(&u4.matmul(&psi0_proj)?.matmul(&u4.adjoint())?)?;
        acc = acc.add(&v4.matmul(&phi)?.matmul(&v4.adjoint())?)?;
    }
    acc = filter4.matmul(&acc)?.matmul(&filter4.adjoint())?;
    finish_state(acc, params.basis_pairs(), StateSource::ClosedForm)
}

fn finish_state(acc: ComplexMatrix, basis_pairs: u32, source: StateSource) -> Result<BipartiteState> {
    let trace = acc.trace()?.re;
    if trace < TRACE_FLOOR {
        return Err(Error::DegenerateChannel(format!(
            "channel annihilates all signal states (trace {trace:.3e})"
        )));
    }
    Ok(BipartiteState {
        matrix: acc.scale_real(1.0 / trace),
        norm_constant: trace,
        basis_pairs,
        source,
    })
}

/// The basis-averaged projector
/// `(1/M) sum_l (I (x) R_{2l pi/M}) |psi_0><psi_0| (I (x) R_{-2l pi/M})`.
pub fn phi_operator(params: &ProtocolParams) -> Result<ComplexMatrix> {
    let m = params.basis_pairs() as usize;
    let psi0_proj = psi_l(params, 0)?.outer()?;
    let i2 = ComplexMatrix::identity(2);
    let mut acc = ComplexMatrix::zeros(4, 4);
    for l in 0..m {
        let angle = 2.0 * l as f64 * params.basis_step();
        let rot = i2.tensor(&rotation(angle))?;
        acc = acc.add(&rot.matmul(&psi0_proj)?.matmul(&rot.adjoint())?)?;
    }
    Ok(acc.scale_real(1.0 / m as f64))
}

/// Closed form of [`phi_operator`]. For M > 2 the average collapses to
/// `(I (x) I + |0_z><1_z| (x) R_theta + |1_z><0_z| (x) R_{-theta}) / 4`,
/// independent of M; for M = 2 it stays the bare projector `|psi_0><psi_0|`.
///
/// The 1/4 prefactor is forced: the average of unit-trace projectors has
/// unit trace, and only the identity block contributes to it.
pub fn phi_operator_closed_form(params: &ProtocolParams) -> Result<ComplexMatrix> {
    if params.basis_pairs() == 2 {
        return psi_l(params, 0)?.outer();
    }
    let theta = params.theta();
    let id4 = ComplexMatrix::identity(4);
    let upper = ket_0z()
        .matmul(&ket_1z().adjoint())?
        .tensor(&rotation(theta))?;
    let lower = ket_1z()
        .matmul(&ket_0z().adjoint())?
        .tensor(&rotation(-theta))?;
    Ok(id4.add(&upper)?.add(&lower)?.scale_real(0.25))
}

/// The Bell basis in the order (Phi+, Psi+, Psi-, Phi-), matching the
/// probability order (p_i, p_x, p_y, p_z). Built from the bit kets.
pub fn bell_states() -> [ComplexMatrix; 4] {
    let zz = |a: &ComplexMatrix, b: &ComplexMatrix| a.tensor(b).expect("2x2 kets");
    let k0 = ket_0z();
    let k1 = ket_1z();
    let phi_plus = zz(&k0, &k0).add(&zz(&k1, &k1)).unwrap().scale_real(FRAC_1_SQRT_2);
    let phi_minus = zz(&k0, &k0).sub(&zz(&k1, &k1)).unwrap().scale_real(FRAC_1_SQRT_2);
    let psi_plus = zz(&k0, &k1).add(&zz(&k1, &k0)).unwrap().scale_real(FRAC_1_SQRT_2);
    let psi_minus = zz(&k0, &k1).sub(&zz(&k1, &k0)).unwrap().scale_real(FRAC_1_SQRT_2);
    [phi_plus, psi_plus, psi_minus, phi_minus]
}

/// Bell-diagonal probabilities and the error rates derived from them.
///
/// `p_x`, `p_z` and `p_y` are the probabilities of a bit flip, a phase
/// flip, and both at once; `e_b = p_x + p_y`, `e_p = p_y + p_z`.
/// `n_prime` is the normalization constant of the closed-form expressions
/// and `p_con` the conclusive probability of a basis-matched signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellDiagnostics {
    pub p_i: f64,
    pub p_x: f64,
    pub p_y: f64,
    pub p_z: f64,
    pub e_b: f64,
    pub e_p: f64,
    pub n_prime: f64,
    pub p_con: f64,
}

/// Ratio between the closed-form normalization constant and the
/// pre-normalization trace: 4 for M > 2, 2 for M = 2. Derived numerically
/// once from the identity channel and pinned by the oracle-equivalence
/// tests.
pub fn norm_constant_scale(basis_pairs: u32) -> f64 {
    if basis_pairs == 2 {
        2.0
    } else {
        4.0
    }
}

/// Bell projections of a numerically constructed state.
pub fn bell_diagnostics_numerical(state: &BipartiteState) -> BellDiagnostics {
    let bells = bell_states();
    let project = |ket: &ComplexMatrix| -> f64 {
        let bra = ket.adjoint();
        bra.matmul(state.matrix())
            .and_then(|m| m.matmul(ket))
            .expect("4x4 projection")
            .entry(0, 0)
            .re
    };
    let p_i = project(&bells[0]);
    let p_x = project(&bells[1]);
    let p_y = project(&bells[2]);
    let p_z = project(&bells[3]);
    BellDiagnostics {
        p_i,
        p_x,
        p_y,
        p_z,
        e_b: p_x + p_y,
        e_p: p_y + p_z,
        n_prime: norm_constant_scale(state.basis_pairs()) * state.norm_constant(),
        p_con: state.norm_constant(),
    }
}

/// Closed-form Bell diagnostics from the Pauli weights of the channel.
///
/// For M > 2, with `s = sin^2(theta)`, `c = cos^2(theta)` and summed
/// squared weights `w_r`:
///
/// ```text
/// N' = 2 (s w_i + w_x + (1+c) w_y + w_z)
/// p_i = 2 s w_i / N'            p_x = s (w_x + w_z) / N'
/// p_y = (2 w_y + c (w_x + w_z)) / N'
/// p_z = (w_x + w_z + 2 c w_y) / N'
/// ```
///
/// (M-independent). For M = 2 instead:
///
/// ```text
/// N'' = s (w_i + w_x) + (1+c) (w_y + w_z)
/// p_i = s w_i / N''             p_x = s w_x / N''
/// p_y = (w_y + c w_z) / N''     p_z = (w_z + c w_y) / N''
/// ```
pub fn bell_diagnostics_closed_form(
    params: &ProtocolParams,
    decomposition: &PauliDecomposition,
) -> Result<BellDiagnostics> {
    let s = params.theta().sin().powi(2);
    let c = params.theta().cos().powi(2);
    let wi = decomposition.weight_i();
    let wx = decomposition.weight_x();
    let wy = decomposition.weight_y();
    let wz = decomposition.weight_z();

    let (norm, p_i, p_x, p_y, p_z) = if params.basis_pairs() == 2 {
        let norm = s * (wi + wx) + (1.0 + c) * (wy + wz);
        (
            norm,
            s * wi,
            s * wx,
            wy + c * wz,
            wz + c * wy,
        )
    } else {
        let norm = 2.0 * (s * wi + wx + (1.0 + c) * wy + wz);
        (
            norm,
            2.0 * s * wi,
            s * (wx + wz),
            2.0 * wy + c * (wx + wz),
            wx + wz + 2.0 * c * wy,
        )
    };
    if norm < TRACE_FLOOR {
        return Err(Error::DegenerateChannel(format!(
            "normalization constant {norm:.3e} vanishes"
        )));
    }
    let (p_i, p_x, p_y, p_z) = (p_i / norm, p_x / norm, p_y / norm, p_z / norm);
    Ok(BellDiagnostics {
        p_i,
        p_x,
        p_y,
        p_z,
        e_b: p_x + p_y,
        e_p: p_y + p_z,
        n_prime: norm,
        p_con: norm / norm_constant_scale(params.basis_pairs()),
    })
}

/// Numerical check of the discrete averaging identities behind the M > 2
/// simplifications.
#[derive(Debug, Clone, Copy)]
pub struct LemmaReport {
    pub basis_pairs: u32,
    /// `(1/M) sum_l cos^2(2 l pi / M)`; 1/2 for every M > 2.
    pub avg_cos_sq: f64,
    /// `(1/M) sum_l sin^2(2 l pi / M)`; 1/2 for every M > 2.
    pub avg_sin_sq: f64,
    /// `(1/M) sum_l cos(2 l pi / M) sin(2 l pi / M)`; 0 for every M > 2.
    pub avg_cross: f64,
    /// Max-norm of `sum_l R_{2 l pi / M}`; 0 for every M >= 2.
    pub rotation_sum_max: f64,
    pub dev_cos: f64,
    pub dev_sin: f64,
    pub dev_cross: f64,
}

pub fn spherical_average_lemma_check(basis_pairs: u32) -> Result<LemmaReport> {
    if basis_pairs < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 basis pairs, got {basis_pairs}"
        )));
    }
    let m = basis_pairs as usize;
    let mut cos_sq = 0.0;
    let mut sin_sq = 0.0;
    let mut cross = 0.0;
    let mut rot_sum = ComplexMatrix::zeros(2, 2);
    for l in 0..m {
        let angle = 2.0 * l as f64 * std::f64::consts::PI / m as f64;
        cos_sq += angle.cos().powi(2);
        sin_sq += angle.sin().powi(2);
        cross += angle.cos() * angle.sin();
        rot_sum = rot_sum.add(&rotation(angle))?;
    }
    let scale = 1.0 / m as f64;
    let (avg_cos_sq, avg_sin_sq, avg_cross) = (cos_sq * scale, sin_sq * scale, cross * scale);
    Ok(LemmaReport {
        basis_pairs,
        avg_cos_sq,
        avg_sin_sq,
        avg_cross,
        rotation_sum_max: rot_sum.max_abs(),
        dev_cos: (avg_cos_sq - 0.5).abs(),
        dev_sin: (avg_sin_sq - 0.5).abs(),
        dev_cross: avg_cross.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::SiftingMode;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn params(m: u32, theta: f64) -> ProtocolParams {
        ProtocolParams::new(m, theta, SiftingMode::Generic).unwrap()
    }

    const THETA_GRID: [f64; 4] = [0.3, FRAC_PI_4, 1.2, FRAC_PI_2];

    #[test]
    fn psi_l_matches_both_expressions() {
        for m in [2u32, 3, 4, 8] {
            for theta in THETA_GRID {
                let p = params(m, theta);
                let psi0 = psi_l(&p, 0).unwrap();
                for l in 0..m as usize {
                    let direct = psi_l(&p, l).unwrap();
                    assert!((direct.frobenius_norm() - 1.0).abs() <= 1e-13);
                    let rotated = ComplexMatrix::identity(2)
                        .tensor(&rotation(l as f64 * p.basis_step()))
                        .unwrap()
                        .matmul(&psi0)
                        .unwrap();
                    assert!(direct.max_abs_diff(&rotated).unwrap() <= 1e-13);
                }
            }
        }
    }

    #[test]
    fn psi_0_at_theta_half_pi_is_the_epr_ket() {
        let p = params(4, FRAC_PI_2);
        let psi = psi_l(&p, 0).unwrap();
        // (|00> + |11>) in the bit basis; in the working representation
        // this is (1, 0, 0, 1)/sqrt(2).
        let expected = ComplexMatrix::ket4([
            num_complex::Complex64::new(FRAC_1_SQRT_2, 0.0),
            num_complex::Complex64::ZERO,
            num_complex::Complex64::ZERO,
            num_complex::Complex64::new(FRAC_1_SQRT_2, 0.0),
        ]);
        assert!(psi.max_abs_diff(&expected).unwrap() <= 1e-15);
    }

    #[test]
    fn filter_invariance_across_bases() {
        for m in [2u32, 3, 5, 8] {
            for theta in THETA_GRID {
                let p = params(m, theta);
                let i2 = ComplexMatrix::identity(2);
                let reference = i2
                    .tensor(&crate::protocol::filter(&p, 0).unwrap().matrix)
                    .unwrap()
                    .matmul(&psi_l(&p, 0).unwrap())
                    .unwrap();
                for l in 0..m as usize {
                    let filtered = i2
                        .tensor(&crate::protocol::filter(&p, l).unwrap().matrix)
                        .unwrap()
                        .matmul(&psi_l(&p, l).unwrap())
                        .unwrap();
                    assert!(filtered.max_abs_diff(&reference).unwrap() <= 1e-13);
                }
            }
        }
    }

    #[test]
    fn identity_channel_gives_a_pure_error_free_state() {
        let p = params(4, FRAC_PI_4);
        let state = rho_ab_numerical(&p, &KrausChannel::identity()).unwrap();
        let d = bell_diagnostics_numerical(&state);
        assert!((d.p_i - 1.0).abs() <= 1e-12);
        assert!(d.p_x.abs() <= 1e-12 && d.p_y.abs() <= 1e-12 && d.p_z.abs() <= 1e-12);
        // Pre-normalization trace carries the ideal conclusive probability.
        assert!((state.norm_constant() - 0.5 * p.theta().sin().powi(2)).abs() <= 1e-12);
    }

    #[test]
    fn state_invariants_hold_for_random_channels() {
        let bells = bell_states();
        for seed in 0..30u64 {
            let channel = KrausChannel::random(seed, (seed % 4) as usize + 1).unwrap();
            let p = params(2 + (seed % 4) as u32, THETA_GRID[(seed % 4) as usize]);
            let state = rho_ab_numerical(&p, &channel).unwrap();
            let m = state.matrix();
            assert!(m.max_abs_diff(&m.adjoint()).unwrap() <= 1e-12);
            assert!((m.trace().unwrap().re - 1.0).abs() <= 1e-12);
            for bell in &bells {
                let bra = bell.adjoint();
                let val = bra.matmul(m).unwrap().matmul(bell).unwrap().entry(0, 0);
                assert!(val.re >= -1e-12);
            }
        }
    }

    #[test]
    fn bell_kets_are_orthonormal() {
        let bells = bell_states();
        for (i, a) in bells.iter().enumerate() {
            for (j, b) in bells.iter().enumerate() {
                let inner = a.trace_inner(b).unwrap();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((inner - num_complex::Complex64::new(expected, 0.0)).norm() <= 1e-14);
            }
        }
    }

    #[test]
    fn frozen_depolarizing_worked_example() {
        // Depolarizing p = 0.1 at the SARG04 point: weights
        // (0.925, 0.025, 0.025, 0.025), N' = 1.1, and
        // (p_i, p_x, p_y, p_z) = (0.925, 0.025, 0.075, 0.075)/1.1.
        let p = params(4, FRAC_PI_4);
        let channel = KrausChannel::depolarizing(0.1).unwrap();
        let state = rho_ab_numerical(&p, &channel).unwrap();
        let numeric = bell_diagnostics_numerical(&state);
        let closed = bell_diagnostics_closed_form(&p, &channel.decompose()).unwrap();
        for d in [&numeric, &closed] {
            assert!((d.p_i - 0.925 / 1.1).abs() <= 1e-12);
            assert!((d.p_x - 0.025 / 1.1).abs() <= 1e-12);
            assert!((d.p_y - 0.075 / 1.1).abs() <= 1e-12);
            assert!((d.p_z - 0.075 / 1.1).abs() <= 1e-12);
            assert!((d.e_b - 1.0 / 11.0).abs() <= 1e-12);
            assert!((d.e_p - 3.0 / 22.0).abs() <= 1e-12);
            assert!((d.n_prime - 1.1).abs() <= 1e-12);
            assert!((d.p_con - 0.275).abs() <= 1e-12);
        }
    }

    #[test]
    fn closed_form_matches_oracle_across_sweep() {
        for seed in 0..25u64 {
            let channel = KrausChannel::random(seed, (seed % 4) as usize + 1).unwrap();
            let decomposition = channel.decompose();
            for m in [2u32, 3, 4, 5, 8] {
                for theta in THETA_GRID {
                    let p = params(m, theta);
                    let numeric = bell_diagnostics_numerical(&rho_ab_numerical(&p, &channel).unwrap());
                    let closed = bell_diagnostics_closed_form(&p, &decomposition).unwrap();
                    for d in [&numeric, &closed] {
                        assert!((d.p_i + d.p_x + d.p_y + d.p_z - 1.0).abs() <= 1e-10);
                        for v in [d.p_i, d.p_x, d.p_y, d.p_z] {
                            assert!((-1e-12..=1.0 + 1e-12).contains(&v));
                        }
                    }
                    for (a, b) in [
                        (numeric.p_i, closed.p_i),
                        (numeric.p_x, closed.p_x),
                        (numeric.p_y, closed.p_y),
                        (numeric.p_z, closed.p_z),
                        (numeric.e_b, closed.e_b),
                        (numeric.e_p, closed.e_p),
                        (numeric.n_prime, closed.n_prime),
                        (numeric.p_con, closed.p_con),
                    ] {
                        assert!(
                            (a - b).abs() <= 1e-9,
                            "seed {seed} M {m} theta {theta}: {a} vs {b}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn m2_dephasing_worked_example() {
        // {sqrt(0.9) I, sqrt(0.1) sigma_z} at M = 2, theta = pi/4:
        // N'' = 0.5*0.9 + 1.5*0.1 = 0.6, e_b = 0.05/0.6 = 1/12,
        // e_p = 0.15/0.6 = 1/4, so e_p/e_b = 3 = (1 + cos^2)/cos^2.
        let p = params(2, FRAC_PI_4);
        let channel = KrausChannel::pauli(0.9, 0.0, 0.0, 0.1).unwrap();
        let closed = bell_diagnostics_closed_form(&p, &channel.decompose()).unwrap();
        let numeric = bell_diagnostics_numerical(&rho_ab_numerical(&p, &channel).unwrap());
        for d in [&closed, &numeric] {
            assert!((d.n_prime - 0.6).abs() <= 1e-12, "n'' = {}", d.n_prime);
            assert!((d.e_b - 1.0 / 12.0).abs() <= 1e-12);
            assert!((d.e_p - 0.25).abs() <= 1e-12);
            assert!((d.e_p / d.e_b - 3.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn sarg_slope_holds_for_any_channel() {
        let p = params(4, FRAC_PI_4);
        for seed in 0..20u64 {
            let channel = KrausChannel::random(seed, 2).unwrap();
            let d = bell_diagnostics_closed_form(&p, &channel.decompose()).unwrap();
            if d.e_b > 1e-12 {
                assert!((d.e_p / d.e_b - 1.5).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn state_is_independent_of_m_above_two() {
        for seed in [1u64, 9, 33] {
            let channel = KrausChannel::random(seed, 3).unwrap();
            for theta in THETA_GRID {
                let reference = rho_ab_numerical(&params(3, theta), &channel).unwrap();
                for m in [5u32, 8] {
                    let other = rho_ab_numerical(&params(m, theta), &channel).unwrap();
                    let dev = reference
                        .matrix()
                        .max_abs_diff(other.matrix())
                        .unwrap();
                    assert!(dev <= 1e-10, "seed {seed} M {m} theta {theta}: {dev}");
                }
            }
        }
    }

    #[test]
    fn decomposed_route_reproduces_the_oracle() {
        for seed in [2u64, 7, 19] {
            let channel = KrausChannel::random(seed, 2).unwrap();
            for m in [2u32, 4, 6] {
                let p = params(m, 1.1);
                let a = rho_ab_numerical(&p, &channel).unwrap();
                let b = rho_ab_decomposed(&p, &channel).unwrap();
                assert!(a.matrix().max_abs_diff(b.matrix()).unwrap() <= 1e-12);
                assert!((a.norm_constant() - b.norm_constant()).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn phi_operator_closed_form_and_commutation() {
        for m in [3u32, 4, 5, 8] {
            for theta in THETA_GRID {
                let p = params(m, theta);
                let averaged = phi_operator(&p).unwrap();
                let closed = phi_operator_closed_form(&p).unwrap();
                assert!(averaged.max_abs_diff(&closed).unwrap() <= 1e-12);
                for beta in [0.17, 0.9, 2.4] {
                    let rot = ComplexMatrix::identity(2).tensor(&rotation(beta)).unwrap();
                    let comm = averaged
                        .matmul(&rot)
                        .unwrap()
                        .sub(&rot.matmul(&averaged).unwrap())
                        .unwrap();
                    assert!(comm.max_abs() <= 1e-12);
                }
            }
        }
        // M = 2 keeps the bare projector instead.
        let p = params(2, FRAC_PI_4);
        let phi = phi_operator(&p).unwrap();
        let projector = psi_l(&p, 0).unwrap().outer().unwrap();
        assert!(phi.max_abs_diff(&projector).unwrap() <= 1e-13);
        assert!(phi_operator_closed_form(&p)
            .unwrap()
            .max_abs_diff(&projector)
            .unwrap()
            <= 1e-13);
    }

    #[test]
    fn rotation_covariance_above_two_and_witness_at_two() {
        for seed in [4u64, 11] {
            let channel = KrausChannel::random(seed, 2).unwrap();
            for beta in [0.23, 1.7] {
                let conj = channel.conjugated_by_rotation(beta).unwrap();
                for m in [3u32, 4, 8] {
                    let p = params(m, 1.0);
                    let before = rho_ab_numerical(&p, &channel).unwrap();
                    let after = rho_ab_numerical(&p, &conj).unwrap();
                    assert!(before.matrix().max_abs_diff(after.matrix()).unwrap() <= 1e-10);
                }
            }
        }
        // Fixed M = 2 witness: a pure sigma_x channel conjugated by pi/8
        // moves the state by a visible amount.
        let p = params(2, FRAC_PI_4);
        let witness = KrausChannel::pauli(0.0, 1.0, 0.0, 0.0).unwrap();
        let before = rho_ab_numerical(&p, &witness).unwrap();
        let conj = witness.conjugated_by_rotation(std::f64::consts::PI / 8.0).unwrap();
        let after = rho_ab_numerical(&p, &conj).unwrap();
        assert!(before.matrix().max_abs_diff(after.matrix()).unwrap() > 1e-3);
    }

    #[test]
    fn bit_phase_relation_above_two() {
        for seed in 0..15u64 {
            let channel = KrausChannel::random(seed, (seed % 4) as usize + 1).unwrap();
            let decomposition = channel.decompose();
            for theta in THETA_GRID {
                let p = params(5, theta);
                let d = bell_diagnostics_closed_form(&p, &decomposition).unwrap();
                if d.e_b > 1e-12 {
                    let expected = d.e_b * (1.0 + theta.cos().powi(2));
                    assert!((d.e_p - expected).abs() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn norm_constant_scale_is_pinned_by_the_conclusive_probability() {
        for seed in 0..10u64 {
            let channel = KrausChannel::random(seed, 2).unwrap();
            for m in [2u32, 3, 4, 8] {
                let p = params(m, 0.9);
                let state = rho_ab_numerical(&p, &channel).unwrap();
                let pov = crate::protocol::conclusive_probability(&p, &channel).unwrap();
                assert!(
                    (state.norm_constant() - pov).abs() <= 1e-10,
                    "seed {seed} M {m}"
                );
                let closed = bell_diagnostics_closed_form(&p, &channel.decompose()).unwrap();
                assert!(
                    (closed.n_prime - norm_constant_scale(m) * state.norm_constant()).abs()
                        <= 1e-10
                );
            }
        }
    }

    #[test]
    fn lemma_report_values() {
        let r = spherical_average_lemma_check(4).unwrap();
        assert!(r.dev_cos <= 1e-15 && r.dev_sin <= 1e-15 && r.dev_cross <= 1e-15);
        for m in 3..=12u32 {
            let r = spherical_average_lemma_check(m).unwrap();
            assert!(r.dev_cos <= 1e-12 && r.dev_sin <= 1e-12 && r.dev_cross <= 1e-12);
        }
        for m in 2..=12u32 {
            let r = spherical_average_lemma_check(m).unwrap();
            assert!(r.rotation_sum_max <= 1e-12, "M = {m}: {}", r.rotation_sum_max);
        }
        // M = 2 averages deviate from 1/2 by construction; the report says so.
        let r = spherical_average_lemma_check(2).unwrap();
        assert!(r.dev_cos > 0.4);
        assert!(spherical_average_lemma_check(1).is_err());
    }
}
