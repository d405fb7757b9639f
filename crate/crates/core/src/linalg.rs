//! Dense complex matrices for the 2x2 / 4x4 operators and 2-d / 4-d kets that
//! everything else is built from.
//!
//! This is deliberately not a general linear-algebra library: dimensions are
//! restricted to {1, 2, 4}, there is no pivoting, no general eigensolver, and
//! the only spectral routine is the closed-form 2x2 Hermitian case. Kets are
//! column matrices (`cols == 1`), so every operation below works uniformly on
//! operators and states.
//!
//! Values are immutable after construction and all operations are pure, so
//! matrices can be shared freely across threads.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance for exact-algebra identities on unit-scale inputs.
pub const ALGEBRA_TOL: f64 = 1e-12;

/// Eigenvalues below this are treated as zero when inverting.
const EIGENVALUE_FLOOR: f64 = 1e-12;

fn dimension_ok(d: usize) -> bool {
    matches!(d, 1 | 2 | 4)
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// General checked constructor; rejects unsupported dimensions, length
    /// mismatches and non-finite entries. This is the entry point for
    /// untrusted data (e.g. matrices read from JSON).
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if !dimension_ok(rows) {
            return Err(Error::UnsupportedDimension(rows));
        }
        if !dimension_ok(cols) {
            return Err(Error::UnsupportedDimension(cols));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        for (i, z) in entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite(format!("entry {i} = {z}")));
            }
        }
        Ok(Self { rows, cols, entries })
    }

    /// 2x2 matrix from row-major literals. Panics on non-finite input, which
    /// can only happen through a programming error.
    pub fn mat2(rows: [[Complex64; 2]; 2]) -> Self {
        let entries = vec![rows[0][0], rows[0][1], rows[1][0], rows[1][1]];
        Self::new(2, 2, entries).expect("finite 2x2 literal")
    }

    /// Real 2x2 matrix from row-major literals.
    pub fn mat2_real(rows: [[f64; 2]; 2]) -> Self {
        Self::mat2(rows.map(|r| r.map(|x| Complex64::new(x, 0.0))))
    }

    /// 2-d column ket.
    pub fn ket2(entries: [Complex64; 2]) -> Self {
        Self::new(2, 1, entries.to_vec()).expect("finite ket literal")
    }

    /// 4-d column ket.
    pub fn ket4(entries: [Complex64; 4]) -> Self {
        Self::new(4, 1, entries.to_vec()).expect("finite ket literal")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![Complex64::ZERO; rows * cols]).expect("supported dimensions")
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Complex64::ONE;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// True for column vectors.
    pub fn is_ket(&self) -> bool {
        self.cols == 1
    }

    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.cols + c]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entry(r, k);
                if a == Complex64::ZERO {
                    continue;
                }
                for c in 0..other.cols {
                    out.entries[r * other.cols + c] += a * other.entry(k, c);
                }
            }
        }
        Ok(out)
    }

    /// Entry-wise sum.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Entry-wise difference `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Scalar multiple.
    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.entries[c * self.rows + r] = self.entry(r, c).conj();
            }
        }
        out
    }

    /// Kronecker product with `self` as the left (slow) factor: the combined
    /// index is `row(self) * other.rows + row(other)`. This ordering is a
    /// fixed contract relied on by the bipartite-state code.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut entries = vec![Complex64::ZERO; rows * cols];
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                let a = self.entry(r1, c1);
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        let r = r1 * other.rows + r2;
                        let c = c1 * other.cols + c2;
                        entries[r * cols + c] = a * other.entry(r2, c2);
                    }
                }
            }
        }
        Self::new(rows, cols, entries)
    }

    pub fn trace(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "trace of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok((0..self.rows).map(|i| self.entry(i, i)).sum())
    }

    /// Hilbert-Schmidt pairing tr(self^dagger * other). On kets this is the
    /// usual inner product <self|other>.
    pub fn trace_inner(&self, other: &Self) -> Result<Complex64> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "trace_inner of {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Outer product |self><self| of a ket.
    pub fn outer(&self) -> Result<Self> {
        if !self.is_ket() {
            return Err(Error::DimensionMismatch(format!(
                "outer product needs a column ket, got {}x{}",
                self.rows, self.cols
            )));
        }
        self.matmul(&self.adjoint())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude (max norm).
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-norm distance between two equally shaped matrices.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        self.max_abs_diff(&self.adjoint()).map(|d| d <= tol).unwrap_or(false)
    }

    /// Eigenvalues of a 2x2 Hermitian matrix, smallest first, from the
    /// discriminant of the characteristic polynomial.
    pub fn hermitian_eigenvalues_2x2(&self) -> Result<(f64, f64)> {
        if self.rows != 2 || self.cols != 2 {
            return Err(Error::DimensionMismatch(format!(
                "closed-form eigenvalues need a 2x2 matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let asym = self.max_abs_diff(&self.adjoint())?;
        if asym > ALGEBRA_TOL {
            return Err(Error::NotHermitian(asym));
        }
        let a = self.entry(0, 0).re;
        let d = self.entry(1, 1).re;
        let b = self.entry(0, 1);
        let mean = 0.5 * (a + d);
        let disc = (0.5 * (a - d)).powi(2) + b.norm_sqr();
        let root = disc.sqrt();
        Ok((mean - root, mean + root))
    }

    /// Inverse square root of a 2x2 Hermitian positive-definite matrix via
    /// the closed-form spectral decomposition. Eigenvalues at or below
    /// 1e-12 are rejected.
    pub fn hermitian_sqrt_inv(&self) -> Result<Self> {
        let (lo, hi) = self.hermitian_eigenvalues_2x2()?;
        if lo <= EIGENVALUE_FLOOR {
            return Err(Error::NotPositiveDefinite(lo));
        }
        let b = self.entry(0, 1);
        // Near-degenerate spectrum: the matrix is a multiple of the identity
        // to working precision, so act on the scalar directly.
        if hi - lo <= EIGENVALUE_FLOOR * hi.max(1.0) {
            let mean = 0.5 * (lo + hi);
            return Ok(Self::identity(2).scale_real(1.0 / mean.sqrt()));
        }
        let a = self.entry(0, 0).re;
        let project = |lambda: f64| -> Result<Self> {
            // Eigenvector (b, lambda - a) works whenever b != 0; otherwise
            // the matrix is diagonal and the basis vectors are eigenvectors.
            let v = if b.norm() > 0.0 {
                Self::ket2([b, Complex64::new(lambda - a, 0.0)])
            } else if (lambda - a).abs() < (lambda - self.entry(1, 1).re).abs() {
                Self::ket2([Complex64::ONE, Complex64::ZERO])
            } else {
                Self::ket2([Complex64::ZERO, Complex64::ONE])
            };
            let norm = v.frobenius_norm();
            v.scale_real(1.0 / norm).outer()
        };
        let p_lo = project(lo)?;
        let p_hi = project(hi)?;
        p_lo.scale_real(1.0 / lo.sqrt())
            .add(&p_hi.scale_real(1.0 / hi.sqrt()))
    }
}
