//! The generalized protocol family: M basis pairs separated by an angle
//! theta, all living on one great circle of the Bloch sphere.
//!
//! Two members are household names: M = 4, theta = pi/2 is (symmetrized)
//! BB84 and M = 4, theta = pi/4 is SARG04.
//!
//! # Working representation
//!
//! All matrices in this crate are written in the basis `|0_x> = e0`,
//! `|1_x> = e1`. In that representation [`rotation`] is the real SO(2)
//! matrix `[[cos b, -sin b], [sin b, cos b]]` and the signal states have
//! real amplitudes. The bit basis (the one conclusive measurement results
//! are read in) is the Hadamard-transformed pair
//! `|0_z> = (e0 + e1)/sqrt(2)`, `|1_z> = (e0 - e1)/sqrt(2)`; at
//! theta = pi/2 the signal states coincide with these bit kets.
//!
//! One protocol run, per signal: Alice draws a basis index and a bit and
//! sends the matching signal state; Bob draws a basis index and one of two
//! projective setups, and either announces a conclusive bit or an
//! inconclusive result. Only signals with matching basis indices and a
//! conclusive outcome survive sifting.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// How the sifting losses enter the key-rate accounting.
///
/// `Generic` charges the full 1/M basis-reconciliation factor. `BasisFree`
/// drops it, for family members (such as SARG04) where the measurement
/// hardware is the same for every basis index and only the classical
/// interpretation differs. The choice never affects the quantum state
/// math, only the rate bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SiftingMode {
    #[default]
    Generic,
    BasisFree,
}

/// A logical bit value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub fn index(self) -> usize {
        match self {
            Bit::Zero => 0,
            Bit::One => 1,
        }
    }

    /// Sign of the `|1_x>` amplitude in the signal state: +1 for bit 0,
    /// -1 for bit 1.
    pub fn sign(self) -> f64 {
        match self {
            Bit::Zero => 1.0,
            Bit::One => -1.0,
        }
    }
}

/// One member of the protocol family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    basis_pairs: u32,
    theta: f64,
    sifting_mode: SiftingMode,
}

impl ProtocolParams {
    /// Requires `M >= 2` and `0 < theta <= pi/2`.
    ///
    /// The corner M = 2, theta = pi/2 is accepted but flagged by
    /// [`ProtocolParams::is_degenerate`]: there the two bases contain the
    /// same two orthogonal states and no key can be distilled, so the
    /// analysis layer refuses to emit a bound for it.
    pub fn new(basis_pairs: u32, theta: f64, sifting_mode: SiftingMode) -> Result<Self> {
        if basis_pairs < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 basis pairs, got {basis_pairs}"
            )));
        }
        if !theta.is_finite() || theta <= 0.0 || theta > FRAC_PI_2 + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "theta must lie in (0, pi/2], got {theta}"
            )));
        }
        Ok(Self {
            basis_pairs,
            theta,
            sifting_mode,
        })
    }

    pub fn basis_pairs(&self) -> u32 {
        self.basis_pairs
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sifting_mode(&self) -> SiftingMode {
        self.sifting_mode
    }

    /// Angular spacing between neighbouring bases, pi/M.
    pub fn basis_step(&self) -> f64 {
        PI / self.basis_pairs as f64
    }

    /// True at the flagged M = 2, theta = pi/2 corner where the phase error
    /// rate diverges and key distillation is impossible.
    pub fn is_degenerate(&self) -> bool {
        self.basis_pairs == 2 && (self.theta - FRAC_PI_2).abs() <= 1e-9
    }

    fn check_basis_index(&self, what: &'static str, index: usize) -> Result<()> {
        if index >= self.basis_pairs as usize {
            return Err(Error::IndexOutOfRange {
                what,
                index,
                bound: self.basis_pairs as usize,
            });
        }
        Ok(())
    }
}

/// Rotation about the Bloch y-axis; in the working representation the real
/// SO(2) matrix `[[cos b, -sin b], [sin b, cos b]]`, so that
/// `rotation(pi/2) |0_x> = |1_x>`.
pub fn rotation(beta: f64) -> ComplexMatrix {
    ComplexMatrix::mat2_real([[beta.cos(), -beta.sin()], [beta.sin(), beta.cos()]])
}

pub fn ket_0x() -> ComplexMatrix {
    ComplexMatrix::ket2([Complex64::ONE, Complex64::ZERO])
}

pub fn ket_1x() -> ComplexMatrix {
    ComplexMatrix::ket2([Complex64::ZERO, Complex64::ONE])
}

pub fn ket_0z() -> ComplexMatrix {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::ket2([Complex64::new(r, 0.0), Complex64::new(r, 0.0)])
}

pub fn ket_1z() -> ComplexMatrix {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::ket2([Complex64::new(r, 0.0), Complex64::new(-r, 0.0)])
}

/// A prepared signal state.
#[derive(Debug, Clone)]
pub struct SignalState {
    pub basis_index: usize,
    pub bit: Bit,
    pub ket: ComplexMatrix,
}

/// Signal state for basis `m` and the given bit:
/// `rotation(m pi / M) (cos(theta/2) |0_x> + sign sin(theta/2) |1_x>)`.
pub fn prepare_state(params: &ProtocolParams, m: usize, bit: Bit) -> Result<SignalState> {
    params.check_basis_index("basis", m)?;
    let half = 0.5 * params.theta();
    let base = ComplexMatrix::ket2([
        Complex64::new(half.cos(), 0.0),
        Complex64::new(bit.sign() * half.sin(), 0.0),
    ]);
    let ket = rotation(m as f64 * params.basis_step()).matmul(&base)?;
    Ok(SignalState {
        basis_index: m,
        bit,
        ket,
    })
}

/// The filtration operator modelling Bob's unambiguous-discrimination step
/// for basis `l`.
#[derive(Debug, Clone)]
pub struct FilterOperator {
    pub basis_index: usize,
    pub matrix: ComplexMatrix,
}

/// The base filter, diagonal in the working representation:
/// `sin(theta/2) |0_x><0_x| + cos(theta/2) |1_x><1_x|`.
pub fn filter_base(theta: f64) -> ComplexMatrix {
    let half = 0.5 * theta;
    ComplexMatrix::mat2_real([[half.sin(), 0.0], [0.0, half.cos()]])
}

/// Rotated filter for basis `l`: the base filter composed with
/// `rotation(-l pi / M)` on the right.
pub fn filter(params: &ProtocolParams, l: usize) -> Result<FilterOperator> {
    params.check_basis_index("filter basis", l)?;
    let matrix = filter_base(params.theta()).matmul(&rotation(-(l as f64) * params.basis_step()))?;
    Ok(FilterOperator {
        basis_index: l,
        matrix,
    })
}

/// Which of Bob's two projection measurements is in use for a basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetupChoice {
    /// Projects onto the bit-0 signal state and its orthogonal complement.
    Plus,
    /// Projects onto the bit-1 signal state and its orthogonal complement.
    Minus,
}

/// Interpretation of one projective outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeLabel {
    Conclusive(Bit),
    Inconclusive,
}

/// A single projective outcome: its (unit) direction and interpretation.
#[derive(Debug, Clone)]
pub struct SetupOutcome {
    pub direction: ComplexMatrix,
    pub label: OutcomeLabel,
}

/// One of Bob's two projection measurements for a basis. The two outcome
/// directions are orthonormal and complete.
#[derive(Debug, Clone)]
pub struct MeasurementSetup {
    pub basis_index: usize,
    pub choice: SetupChoice,
    pub outcomes: [SetupOutcome; 2],
}

/// The two setups for basis `k`.
///
/// The `Plus` setup projects onto `{|phi_k>, rotation(pi/2)|phi_k>}`;
/// landing on the rotated direction is the only state orthogonal to
/// `|phi_k>`, so it identifies the incoming state as the bit-1 signal.
/// Symmetrically, the rotated direction of the `Minus` setup identifies
/// bit 0. The unrotated outcome of either setup is inconclusive.
pub fn measurement_setups(params: &ProtocolParams, k: usize) -> Result<[MeasurementSetup; 2]> {
    params.check_basis_index("measurement basis", k)?;
    let quarter_turn = rotation(FRAC_PI_2);
    let phi_plus = prepare_state(params, k, Bit::Zero)?.ket;
    let phi_minus = prepare_state(params, k, Bit::One)?.ket;
    let plus = MeasurementSetup {
        basis_index: k,
        choice: SetupChoice::Plus,
        outcomes: [
            SetupOutcome {
                direction: phi_plus.clone(),
                label: OutcomeLabel::Inconclusive,
            },
            SetupOutcome {
                direction: quarter_turn.matmul(&phi_plus)?,
                label: OutcomeLabel::Conclusive(Bit::One),
            },
        ],
    };
    let minus = MeasurementSetup {
        basis_index: k,
        choice: SetupChoice::Minus,
        outcomes: [
            SetupOutcome {
                direction: phi_minus.clone(),
                label: OutcomeLabel::Inconclusive,
            },
            SetupOutcome {
                direction: quarter_turn.matmul(&phi_minus)?,
                label: OutcomeLabel::Conclusive(Bit::Zero),
            },
        ],
    };
    Ok([plus, minus])
}

/// Probability that a basis-matched signal produces a conclusive outcome,
/// averaged over Alice's uniform basis/bit choice and Bob's uniform setup
/// choice, with the channel applied in between.
///
/// For the identity channel this is `sin^2(theta) / 2` for every M.
pub fn conclusive_probability(params: &ProtocolParams, channel: &KrausChannel) -> Result<f64> {
    let m = params.basis_pairs() as usize;
    let mut total = 0.0;
    for basis in 0..m {
        let setups = measurement_setups(params, basis)?;
        for bit in [Bit::Zero, Bit::One] {
            let sent = prepare_state(params, basis, bit)?;
            let received = channel.apply_to_pure(&sent.ket)?;
            for setup in &setups {
                for outcome in &setup.outcomes {
                    if let OutcomeLabel::Conclusive(_) = outcome.label {
                        total += born_probability(&outcome.direction, &received)?;
                    }
                }
            }
        }
    }
    // 2M preparations, 2 setups each, all uniform.
    Ok(total / (4.0 * m as f64))
}

/// `<direction| rho |direction>` for a unit ket and a density matrix.
pub fn born_probability(direction: &ComplexMatrix, rho: &ComplexMatrix) -> Result<f64> {
    let bra = direction.adjoint();
    let val = bra.matmul(rho)?.matmul(direction)?.entry(0, 0);
    Ok(val.re)
}
