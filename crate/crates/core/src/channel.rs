//! Kraus-operator channel model: validation, Pauli decomposition, built-in
//! channel families, random channel generation and the JSON wire format.
//!
//! # Pauli labels vs. matrices
//!
//! Everything in this crate is written in the working representation where
//! `|0_x>`, `|1_x>` are the unit vectors (see [`crate::protocol`]), while
//! the Pauli labels follow the *bit* basis `|0_z>`, `|1_z>`: `sigma_x`
//! flips bit kets, `sigma_z` flips their relative phase. Concretely, in
//! the working representation
//!
//! ```text
//! sigma_x = [[1, 0], [0, -1]]      (bit flip; diagonal here)
//! sigma_y = [[0, -i], [i, 0]]
//! sigma_z = [[0, 1], [1, 0]]       (phase flip)
//! ```
//!
//! This is the labelling under which the closed-form Bell diagnostics in
//! [`crate::edp`] hold; `sigma_x` weight shows up as bit errors and
//! `sigma_z` weight as phase errors. Unit tests pin the action of each
//! matrix on the bit kets.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::protocol::{ket_0z, ket_1z, rotation};

/// Completeness tolerance. Looser than the algebra tolerance so that
/// channels read from JSON with decimal rounding still validate.
pub const COMPLETENESS_TOL: f64 = 1e-10;

pub fn pauli_i() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}

/// Bit flip: maps `|0_z> <-> |1_z>`; diagonal in the working representation.
pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::mat2_real([[1.0, 0.0], [0.0, -1.0]])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::mat2([
        [Complex64::ZERO, Complex64::new(0.0, -1.0)],
        [Complex64::new(0.0, 1.0), Complex64::ZERO],
    ])
}

/// Phase flip: fixes `|0_z>`, negates `|1_z>`.
pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::mat2_real([[0.0, 1.0], [1.0, 0.0]])
}

/// The decomposition basis in label order (I, x, y, z).
pub fn pauli_basis() -> [ComplexMatrix; 4] {
    [pauli_i(), pauli_x(), pauli_y(), pauli_z()]
}

/// A trace-preserving qubit channel given by a finite Kraus family
/// `{E_j}` with `sum_j E_j^dagger E_j = I`.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    operators: Vec<ComplexMatrix>,
    label: String,
}

impl KrausChannel {
    /// Validates shape (non-empty, 2x2, finite entries) and completeness to
    /// within [`COMPLETENESS_TOL`].
    pub fn new(operators: Vec<ComplexMatrix>, label: impl Into<String>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::InvalidParameter(
                "a channel needs at least one Kraus operator".into(),
            ));
        }
        let mut gram = ComplexMatrix::zeros(2, 2);
        for op in &operators {
            if op.rows() != 2 || op.cols() != 2 {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operators must be 2x2, got {}x{}",
                    op.rows(),
                    op.cols()
                )));
            }
            gram = gram.add(&op.adjoint().matmul(op)?)?;
        }
        let residual = gram.max_abs_diff(&ComplexMatrix::identity(2))?;
        if residual > COMPLETENESS_TOL {
            return Err(Error::IncompleteKraus {
                residual,
                tolerance: COMPLETENESS_TOL,
            });
        }
        Ok(Self {
            operators,
            label: label.into(),
        })
    }

    pub fn identity() -> Self {
        Self::new(vec![pauli_i()], "identity").expect("identity channel is complete")
    }

    /// Depolarizing channel with Kraus family
    /// `{sqrt(1 - 3p/4) I, sqrt(p/4) sigma_x, sqrt(p/4) sigma_y, sqrt(p/4) sigma_z}`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "depolarizing probability must lie in [0, 1], got {p}"
            )));
        }
        Self::from_pauli_weights(
            [1.0 - 0.75 * p, 0.25 * p, 0.25 * p, 0.25 * p],
            format!("depolarizing(p={p})"),
        )
    }

    /// Pauli mixture: applies I, sigma_x, sigma_y, sigma_z with the given
    /// probabilities (which must sum to one).
    pub fn pauli(p_i: f64, p_x: f64, p_y: f64, p_z: f64) -> Result<Self> {
        let weights = [p_i, p_x, p_y, p_z];
        for w in weights {
            if !(0.0..=1.0).contains(&w) {
                return Err(Error::InvalidParameter(format!(
                    "Pauli probabilities must lie in [0, 1], got {w}"
                )));
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "Pauli probabilities must sum to 1, got {sum}"
            )));
        }
        Self::from_pauli_weights(
            weights,
            format!("pauli(p_i={p_i},p_x={p_x},p_y={p_y},p_z={p_z})"),
        )
    }

    fn from_pauli_weights(weights: [f64; 4], label: String) -> Result<Self> {
        let ops = pauli_basis()
            .into_iter()
            .zip(weights)
            .filter(|(_, w)| *w > 0.0)
            .map(|(op, w)| op.scale_real(w.sqrt()))
            .collect();
        Self::new(ops, label)
    }

    /// Unitary channel rotating every state by `beta` about the y-axis.
    pub fn unitary_rotation(beta: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "rotation angle must be finite, got {beta}"
            )));
        }
        Self::new(vec![rotation(beta)], format!("unitary_rotation(beta={beta})"))
    }

    /// Amplitude damping towards `|0_z>` with decay probability `gamma`.
    /// Damping acts on the bit basis, so neither Kraus operator is diagonal
    /// in the working representation.
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidParameter(format!(
                "damping probability must lie in [0, 1], got {gamma}"
            )));
        }
        let p0 = ket_0z().outer()?;
        let p1 = ket_1z().outer()?;
        let keep = p0.add(&p1.scale_real((1.0 - gamma).sqrt()))?;
        let mut ops = vec![keep];
        if gamma > 0.0 {
            let decay = ket_0z()
                .matmul(&ket_1z().adjoint())?
                .scale_real(gamma.sqrt());
            ops.push(decay);
        }
        Self::new(ops, format!("amplitude_damping(gamma={gamma})"))
    }

    /// Random trace-preserving channel: `num_kraus` complex Gaussian
    /// matrices `G_j`, renormalized by the inverse square root of
    /// `S = sum_j G_j^dagger G_j`. Deterministic for a fixed seed. An
    /// ill-conditioned draw (smallest eigenvalue of S below 1e-8) is
    /// resampled from an incremented sub-stream, with bounded retries.
    pub fn random(seed: u64, num_kraus: usize) -> Result<Self> {
        if !(1..=4).contains(&num_kraus) {
            return Err(Error::InvalidParameter(format!(
                "num_kraus must lie in 1..=4, got {num_kraus}"
            )));
        }
        for attempt in 0u64..32 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(attempt);
            let raws: Vec<ComplexMatrix> = (0..num_kraus)
                .map(|_| {
                    let mut entries = Vec::with_capacity(4);
                    for _ in 0..4 {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        entries.push(Complex64::new(re, im));
                    }
                    ComplexMatrix::new(2, 2, entries).expect("finite Gaussian draw")
                })
                .collect();
            let mut gram = ComplexMatrix::zeros(2, 2);
            for g in &raws {
                gram = gram.add(&g.adjoint().matmul(g)?)?;
            }
            let (lo, _) = gram.hermitian_eigenvalues_2x2()?;
            if lo < 1e-8 {
                continue;
            }
            let renorm = gram.hermitian_sqrt_inv()?;
            let ops = raws
                .iter()
                .map(|g| g.matmul(&renorm))
                .collect::<Result<Vec<_>>>()?;
            return Self::new(ops, format!("random(seed={seed},k={num_kraus})"));
        }
        Err(Error::InvalidParameter(format!(
            "could not draw a well-conditioned random channel for seed {seed}"
        )))
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Channel action on a density matrix: `sum_j E_j rho E_j^dagger`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let mut out = ComplexMatrix::zeros(2, 2);
        for op in &self.operators {
            out = out.add(&op.matmul(rho)?.matmul(&op.adjoint())?)?;
        }
        Ok(out)
    }

    /// Channel action on a pure state `|psi><psi|`.
    pub fn apply_to_pure(&self, ket: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.apply(&ket.outer()?)
    }

    /// The conjugated channel `{R_{-beta} E_j R_beta}`: what both parties
    /// see if they rotate their frames by `beta`.
    pub fn conjugated_by_rotation(&self, beta: f64) -> Result<Self> {
        let left = rotation(-beta);
        let right = rotation(beta);
        let ops = self
            .operators
            .iter()
            .map(|op| left.matmul(op)?.matmul(&right))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ops, format!("{} conj(beta={beta})", self.label))
    }

    /// Pauli coefficients of every Kraus operator:
    /// `a_r = tr(sigma_r^dagger E) / 2`.
    pub fn decompose(&self) -> PauliDecomposition {
        let basis = pauli_basis();
        let coefficients = self
            .operators
            .iter()
            .map(|op| {
                let project =
                    |sigma: &ComplexMatrix| sigma.trace_inner(op).expect("2x2 pairing") * 0.5;
                PauliCoefficients {
                    a_i: project(&basis[0]),
                    a_x: project(&basis[1]),
                    a_y: project(&basis[2]),
                    a_z: project(&basis[3]),
                }
            })
            .collect();
        PauliDecomposition { coefficients }
    }
}

/// Pauli coefficients of a single Kraus operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliCoefficients {
    pub a_i: Complex64,
    pub a_x: Complex64,
    pub a_y: Complex64,
    pub a_z: Complex64,
}

impl PauliCoefficients {
    /// Rebuild the operator `a_i I + a_x sigma_x + a_y sigma_y + a_z sigma_z`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let [i, x, y, z] = pauli_basis();
        i.scale(self.a_i)
            .add(&x.scale(self.a_x))
            .and_then(|m| m.add(&y.scale(self.a_y)))
            .and_then(|m| m.add(&z.scale(self.a_z)))
            .expect("2x2 sums")
    }

    /// The rotation-commuting part `a_i I + a_y sigma_y`.
    pub fn commuting_part(&self) -> ComplexMatrix {
        pauli_i()
            .scale(self.a_i)
            .add(&pauli_y().scale(self.a_y))
            .expect("2x2 sum")
    }

    /// The part `a_x sigma_x + a_z sigma_z` that anticommutes with sigma_y.
    pub fn anticommuting_part(&self) -> ComplexMatrix {
        pauli_x()
            .scale(self.a_x)
            .add(&pauli_z().scale(self.a_z))
            .expect("2x2 sum")
    }
}

/// Per-operator Pauli coefficients for a whole channel, plus the summed
/// squared weights the closed-form error expressions consume.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliDecomposition {
    pub coefficients: Vec<PauliCoefficients>,
}

impl PauliDecomposition {
    pub fn weight_i(&self) -> f64 {
        self.coefficients.iter().map(|c| c.a_i.norm_sqr()).sum()
    }

    pub fn weight_x(&self) -> f64 {
        self.coefficients.iter().map(|c| c.a_x.norm_sqr()).sum()
    }

    pub fn weight_y(&self) -> f64 {
        self.coefficients.iter().map(|c| c.a_y.norm_sqr()).sum()
    }

    pub fn weight_z(&self) -> f64 {
        self.coefficients.iter().map(|c| c.a_z.norm_sqr()).sum()
    }

    /// Total squared weight; equals 1 for every trace-preserving channel.
    pub fn total_weight(&self) -> f64 {
        self.weight_i() + self.weight_x() + self.weight_y() + self.weight_z()
    }
}

/// JSON wire format for channels, e.g. `{"type": "depolarizing", "p": 0.1}`
/// or `{"type": "custom", "kraus": [[[[re,im],[re,im]],[[re,im],[re,im]]], ...]}`
/// with each custom Kraus operator a row-major 2x2 matrix of `[re, im]`
/// pairs in the working representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ChannelSpec {
    Identity,
    Depolarizing { p: f64 },
    Pauli { p_i: f64, p_x: f64, p_y: f64, p_z: f64 },
    UnitaryRotation { beta: f64 },
    AmplitudeDamping { gamma: f64 },
    Custom { kraus: Vec<[[[f64; 2]; 2]; 2]> },
}

impl ChannelSpec {
    pub fn build(&self) -> Result<KrausChannel> {
        match self {
            ChannelSpec::Identity => Ok(KrausChannel::identity()),
            ChannelSpec::Depolarizing { p } => KrausChannel::depolarizing(*p),
            ChannelSpec::Pauli { p_i, p_x, p_y, p_z } => {
                KrausChannel::pauli(*p_i, *p_x, *p_y, *p_z)
            }
            ChannelSpec::UnitaryRotation { beta } => KrausChannel::unitary_rotation(*beta),
            ChannelSpec::AmplitudeDamping { gamma } => KrausChannel::amplitude_damping(*gamma),
            ChannelSpec::Custom { kraus } => {
                let ops = kraus
                    .iter()
                    .map(|rows| {
                        let entries = rows
                            .iter()
                            .flatten()
                            .map(|[re, im]| Complex64::new(*re, *im))
                            .collect();
                        ComplexMatrix::new(2, 2, entries)
                    })
                    .collect::<Result<Vec<_>>>()?;
                KrausChannel::new(ops, "custom")
            }
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            ChannelSpec::Identity => "identity",
            ChannelSpec::Depolarizing { .. } => "depolarizing",
            ChannelSpec::Pauli { .. } => "pauli",
            ChannelSpec::UnitaryRotation { .. } => "unitary_rotation",
            ChannelSpec::AmplitudeDamping { .. } => "amplitude_damping",
            ChannelSpec::Custom { .. } => "custom",
        }
    }

    /// The scalar parameter of single-parameter families, 0 otherwise.
    pub fn scalar_param(&self) -> f64 {
        match self {
            ChannelSpec::Depolarizing { p } => *p,
            ChannelSpec::UnitaryRotation { beta } => *beta,
            ChannelSpec::AmplitudeDamping { gamma } => *gamma,
            _ => 0.0,
        }
    }

    /// Same family with a new scalar parameter; errors for families
    /// that have none.
    pub fn with_scalar_param(&self, value: f64) -> Result<Self> {
        match self {
            ChannelSpec::Depolarizing { .. } => Ok(ChannelSpec::Depolarizing { p: value }),
            ChannelSpec::UnitaryRotation { .. } => {
                Ok(ChannelSpec::UnitaryRotation { beta: value })
            }
            ChannelSpec::AmplitudeDamping { .. } => {
                Ok(ChannelSpec::AmplitudeDamping { gamma: value })
            }
            other => Err(Error::InvalidParameter(format!(
                "channel family '{}' has no scalar parameter to sweep",
                other.family()
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ALGEBRA_TOL;

    #[test]
    fn pauli_matrices_act_on_bit_kets_as_labelled() {
        // sigma_x is the bit flip, sigma_z the phase flip.
        let x0 = pauli_x().matmul(&ket_0z()).unwrap();
        assert!(x0.max_abs_diff(&ket_1z()).unwrap() <= 1e-15);
        let z1 = pauli_z().matmul(&ket_1z()).unwrap();
        assert!(z1.max_abs_diff(&ket_1z().scale_real(-1.0)).unwrap() <= 1e-15);
        let z0 = pauli_z().matmul(&ket_0z()).unwrap();
        assert!(z0.max_abs_diff(&ket_0z()).unwrap() <= 1e-15);
    }

    #[test]
    fn pauli_basis_is_orthogonal() {
        let basis = pauli_basis();
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let pairing = a.trace_inner(b).unwrap();
                let expected = if i == j { 2.0 } else { 0.0 };
                assert!((pairing - Complex64::new(expected, 0.0)).norm() <= 1e-15);
            }
        }
    }

    #[test]
    fn identity_channel_decomposes_trivially() {
        let d = KrausChannel::identity().decompose();
        assert_eq!(d.coefficients.len(), 1);
        assert!((d.weight_i() - 1.0).abs() <= 1e-15);
        assert!(d.weight_x() + d.weight_y() + d.weight_z() <= 1e-15);
    }

    #[test]
    fn two_operator_channel_splits_weights() {
        let ops = vec![
            pauli_i().scale_real(0.9f64.sqrt()),
            pauli_z().scale_real(0.1f64.sqrt()),
        ];
        let channel = KrausChannel::new(ops, "dephasing").unwrap();
        let d = channel.decompose();
        assert!((d.coefficients[0].a_i.norm_sqr() - 0.9).abs() <= 1e-15);
        assert!((d.coefficients[1].a_z.norm_sqr() - 0.1).abs() <= 1e-15);
    }

    #[test]
    fn commuting_and_anticommuting_parts_behave() {
        for seed in 0..40u64 {
            let channel = KrausChannel::random(seed, (seed % 4) as usize + 1).unwrap();
            let d = channel.decompose();
            for (op, coeff) in channel.operators().iter().zip(&d.coefficients) {
                assert!(coeff.reconstruct().max_abs_diff(op).unwrap() <= ALGEBRA_TOL);
                let u = coeff.commuting_part();
                let v = coeff.anticommuting_part();
                for beta in [0.37, 1.9] {
                    let r = rotation(beta);
                    let comm = u.matmul(&r).unwrap().sub(&r.matmul(&u).unwrap()).unwrap();
                    assert!(comm.max_abs() <= ALGEBRA_TOL);
                }
                let anti = v
                    .matmul(&pauli_y())
                    .unwrap()
                    .add(&pauli_y().matmul(&v).unwrap())
                    .unwrap();
                assert!(anti.max_abs() <= ALGEBRA_TOL);
            }
        }
    }

    #[test]
    fn builtin_edge_cases() {
        let dep0 = KrausChannel::depolarizing(0.0).unwrap();
        assert_eq!(dep0.operators().len(), 1);
        assert!(dep0.operators()[0]
            .max_abs_diff(&pauli_i())
            .unwrap()
            <= 1e-15);
        let trivial = KrausChannel::pauli(1.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(trivial.operators().len(), 1);

        let dep = KrausChannel::depolarizing(0.1).unwrap();
        let mut gram = ComplexMatrix::zeros(2, 2);
        for op in dep.operators() {
            gram = gram.add(&op.adjoint().matmul(op).unwrap()).unwrap();
        }
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(2)).unwrap() <= 1e-15);

        assert!(KrausChannel::depolarizing(1.5).is_err());
        assert!(KrausChannel::pauli(0.5, 0.1, 0.1, 0.1).is_err());
        assert!(KrausChannel::amplitude_damping(-0.2).is_err());
    }

    #[test]
    fn amplitude_damping_decays_towards_bit_zero() {
        let channel = KrausChannel::amplitude_damping(1.0).unwrap();
        let decayed = channel.apply_to_pure(&ket_1z()).unwrap();
        assert!(decayed.max_abs_diff(&ket_0z().outer().unwrap()).unwrap() <= 1e-12);
    }

    #[test]
    fn random_channels_are_complete_and_deterministic() {
        for seed in 0..200u64 {
            let k = (seed % 4) as usize + 1;
            let channel = KrausChannel::random(seed, k).unwrap();
            let mut gram = ComplexMatrix::zeros(2, 2);
            for op in channel.operators() {
                gram = gram.add(&op.adjoint().matmul(op).unwrap()).unwrap();
            }
            assert!(gram.max_abs_diff(&ComplexMatrix::identity(2)).unwrap() <= COMPLETENESS_TOL);

            // Round-trip through the decomposition.
            let d = channel.decompose();
            for (op, coeff) in channel.operators().iter().zip(&d.coefficients) {
                assert!(coeff.reconstruct().max_abs_diff(op).unwrap() <= 1e-12);
            }
            assert!((d.total_weight() - 1.0).abs() <= 1e-10);
        }

        let a = KrausChannel::random(42, 3).unwrap();
        let b = KrausChannel::random(42, 3).unwrap();
        for (x, y) in a.operators().iter().zip(b.operators()) {
            assert_eq!(x, y);
        }
        assert!(KrausChannel::random(0, 0).is_err());
        assert!(KrausChannel::random(0, 5).is_err());
    }

    #[test]
    fn conjugation_rotates_xz_weights_and_fixes_iy() {
        for seed in [3u64, 17, 99] {
            let channel = KrausChannel::random(seed, 2).unwrap();
            let before = channel.decompose();
            let beta = 0.61;
            let conj = channel.conjugated_by_rotation(beta).unwrap();
            let after = conj.decompose();
            let (cos2b, sin2b) = ((2.0 * beta).cos(), (2.0 * beta).sin());
            for (b, a) in before.coefficients.iter().zip(&after.coefficients) {
                assert!((b.a_i - a.a_i).norm() <= 1e-12);
                assert!((b.a_y - a.a_y).norm() <= 1e-12);
                // (a_x, a_z) rotates by 2 beta in its plane.
                let expected_x = b.a_x * cos2b + b.a_z * sin2b;
                let expected_z = -b.a_x * sin2b + b.a_z * cos2b;
                assert!((a.a_x - expected_x).norm() <= 1e-12);
                assert!((a.a_z - expected_z).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn channel_spec_json_round_trip() {
        let spec: ChannelSpec = serde_json::from_str(r#"{"type": "depolarizing", "p": 0.1}"#).unwrap();
        assert_eq!(spec, ChannelSpec::Depolarizing { p: 0.1 });
        let channel = spec.build().unwrap();
        assert_eq!(channel.operators().len(), 4);

        let text = serde_json::to_string(&spec).unwrap();
        let back: ChannelSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);

        // Custom spec: dephasing written out by hand.
        let w0 = 0.9f64.sqrt();
        let w1 = 0.1f64.sqrt();
        let json = format!(
            r#"{{"type": "custom", "kraus": [
                [[[{w0},0],[0,0]],[[0,0],[{w0},0]]],
                [[[0,0],[{w1},0]],[[{w1},0],[0,0]]]
            ]}}"#
        );
        let spec: ChannelSpec = serde_json::from_str(&json).unwrap();
        let channel = spec.build().unwrap();
        let d = channel.decompose();
        assert!((d.weight_i() - 0.9).abs() <= 1e-12);
        assert!((d.weight_z() - 0.1).abs() <= 1e-12);

        // An incomplete Kraus family is rejected with the residual.
        let bad = r#"{"type": "custom", "kraus": [[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]]}"#;
        let spec: ChannelSpec = serde_json::from_str(bad).unwrap();
        assert!(matches!(spec.build(), Err(Error::IncompleteKraus { .. })));
    }
}
