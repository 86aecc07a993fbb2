//! Dense complex linear algebra at small dimension (d ≤ ~16).
//!
//! Row-major storage throughout. The Hermitian eigensolver is a cyclic
//! complex Jacobi iteration; everything downstream (metric validation,
//! matrix square roots, trace distance) is built on it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Max-entry deviation allowed when a matrix must be Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Eigenvalue floor for positive semidefiniteness checks.
pub const PSD_TOL: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_OFFDIAG_TOL: f64 = 1e-12;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixWire", into = "MatrixWire")]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

/// Dense complex vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VectorWire", into = "VectorWire")]
pub struct ComplexVector {
    entries: Vec<Complex64>,
}

/// Repo-wide JSON encoding: `{"dim": n, "entries": [[re, im], ...]}`.
#[derive(Serialize, Deserialize)]
struct MatrixWire {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct VectorWire {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl TryFrom<MatrixWire> for ComplexMatrix {
    type Error = Error;
    fn try_from(w: MatrixWire) -> Result<Self> {
        let entries: Vec<Complex64> = w.entries.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        ComplexMatrix::new(w.dim, entries)
    }
}

impl From<ComplexMatrix> for MatrixWire {
    fn from(m: ComplexMatrix) -> Self {
        MatrixWire {
            dim: m.dim,
            entries: m.entries.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<VectorWire> for ComplexVector {
    type Error = Error;
    fn try_from(w: VectorWire) -> Result<Self> {
        if w.entries.len() != w.dim {
            return Err(Error::DimensionMismatch { expected: w.dim, found: w.entries.len() });
        }
        ComplexVector::new(w.entries.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())
    }
}

impl From<ComplexVector> for VectorWire {
    fn from(v: ComplexVector) -> Self {
        VectorWire {
            dim: v.entries.len(),
            entries: v.entries.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

fn all_finite(entries: &[Complex64]) -> bool {
    entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

impl ComplexMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        if !all_finite(&entries) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, Complex64::new(v, 0.0));
        }
        m
    }

    /// Build from real row-major entries.
    pub fn from_real(dim: usize, rows: &[f64]) -> Result<Self> {
        Self::new(dim, rows.iter().map(|&r| Complex64::new(r, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Standard matrix product.
    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let d = self.dim;
        let mut out = ComplexMatrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let aik = self.get(i, k);
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> ComplexMatrix {
        let d = self.dim;
        let mut out = ComplexMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// Kronecker product.
    pub fn tensor(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let (da, db) = (self.dim, other.dim);
        let d = da * db;
        let mut out = ComplexMatrix::zeros(d);
        for i in 0..da {
            for j in 0..da {
                let aij = self.get(i, j);
                for k in 0..db {
                    for l in 0..db {
                        out.set(i * db + k, j * db + l, aij * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(ComplexMatrix { dim: self.dim, entries })
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(ComplexMatrix { dim: self.dim, entries })
    }

    pub fn scale(&self, factor: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-entry deviation from Hermiticity, |a_ij - conj(a_ji)|.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    pub fn check_hermitian(&self) -> Result<()> {
        let dev = self.hermiticity_deviation();
        if dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian { deviation: dev, tolerance: HERMITICITY_TOL });
        }
        Ok(())
    }

    /// Matrix-vector product.
    pub fn matvec(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if self.dim != v.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.dim() });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[i] += self.get(i, j) * v.entries[j];
            }
        }
        Ok(ComplexVector { entries: out })
    }

    /// Extract column as a vector.
    pub fn column(&self, col: usize) -> ComplexVector {
        ComplexVector {
            entries: (0..self.dim).map(|i| self.get(i, col)).collect(),
        }
    }
}

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if !all_finite(&entries) {
            return Err(Error::NonFinite);
        }
        Ok(Self { entries })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&r| Complex64::new(r, 0.0)).collect())
    }

    /// Computational basis vector |index⟩ in the given dimension.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim];
        entries[index] = Complex64::new(1.0, 0.0);
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, index: usize) -> Complex64 {
        self.entries[index]
    }

    /// Standard inner product ⟨self|other⟩ (conjugate-linear in self).
    pub fn inner(&self, other: &ComplexVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn norm_squared(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn scale(&self, factor: Complex64) -> ComplexVector {
        ComplexVector {
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &ComplexVector) -> Result<ComplexVector> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(ComplexVector {
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    /// Kronecker product of vectors.
    pub fn tensor(&self, other: &ComplexVector) -> ComplexVector {
        let mut entries = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.entries {
            for b in &other.entries {
                entries.push(a * b);
            }
        }
        ComplexVector { entries }
    }

    /// Outer product |self⟩⟨other|.
    pub fn outer(&self, other: &ComplexVector) -> Result<ComplexMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        let d = self.dim();
        let mut out = ComplexMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.set(i, j, self.entries[i] * other.entries[j].conj());
            }
        }
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &ComplexVector) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Which subsystem a partial trace keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Reduced density matrix on the kept subsystem of a bipartite operator.
pub fn partial_trace(rho: &ComplexMatrix, dims: (usize, usize), keep: Keep) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    if rho.dim() != da * db {
        return Err(Error::DimensionMismatch { expected: da * db, found: rho.dim() });
    }
    match keep {
        Keep::First => {
            let mut out = ComplexMatrix::zeros(da);
            for i in 0..da {
                for j in 0..da {
                    let mut s = Complex64::new(0.0, 0.0);
                    for k in 0..db {
                        s += rho.get(i * db + k, j * db + k);
                    }
                    out.set(i, j, s);
                }
            }
            Ok(out)
        }
        Keep::Second => {
            let mut out = ComplexMatrix::zeros(db);
            for k in 0..db {
                for l in 0..db {
                    let mut s = Complex64::new(0.0, 0.0);
                    for i in 0..da {
                        s += rho.get(i * db + k, i * db + l);
                    }
                    out.set(k, l, s);
                }
            }
            Ok(out)
        }
    }
}

/// Result of a Hermitian eigendecomposition: eigenvalues ascending,
/// eigenvector columns orthonormal.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// V diag(λ) V†.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.eigenvectors.dim();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..d {
                    s += v.get(i, k) * self.eigenvalues[k] * v.get(j, k).conj();
                }
                out.set(i, j, s);
            }
        }
        out
    }

    /// Apply f to each eigenvalue and reassemble V f(λ) V†.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let mapped = EigenDecomposition {
            eigenvalues: self.eigenvalues.iter().map(|&l| f(l)).collect(),
            eigenvectors: self.eigenvectors.clone(),
        };
        mapped.reconstruct()
    }
}

fn offdiag_norm(a: &ComplexMatrix) -> f64 {
    let d = a.dim();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += a.get(i, j).norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Each rotation first dephases the pivot entry to a real value, then
/// applies the classical symmetric Jacobi rotation. Converges when the
/// off-diagonal Frobenius norm drops below 1e-12 (relative to the matrix
/// scale); hard cap 100 sweeps.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    a.check_hermitian()?;
    let d = a.dim();
    let mut work = a.clone();
    let mut v = ComplexMatrix::identity(d);
    let threshold = JACOBI_OFFDIAG_TOL * work.frobenius_norm().max(1.0);

    let mut converged = offdiag_norm(&work) < threshold;
    let mut sweeps = 0;
    while !converged {
        if sweeps >= JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = work.get(p, q);
                let r = apq.norm();
                if r < 1e-300 {
                    continue;
                }
                let phase = apq / r; // e^{iφ}
                let alpha = work.get(p, p).re;
                let beta = work.get(q, q).re;
                // tan(2θ) = 2r / (α - β); pick the small-angle root.
                let tau = (alpha - beta) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // G restricted to (p,q): [[c, -s], [e^{-iφ} s, e^{-iφ} c]]
                let gpp = Complex64::new(c, 0.0);
                let gpq = Complex64::new(-s, 0.0);
                let gqp = phase.conj() * s;
                let gqq = phase.conj() * c;

                // work ← G† work G, columns then rows
                for i in 0..d {
                    let wip = work.get(i, p);
                    let wiq = work.get(i, q);
                    work.set(i, p, wip * gpp + wiq * gqp);
                    work.set(i, q, wip * gpq + wiq * gqq);
                }
                for j in 0..d {
                    let wpj = work.get(p, j);
                    let wqj = work.get(q, j);
                    work.set(p, j, gpp.conj() * wpj + gqp.conj() * wqj);
                    work.set(q, j, gpq.conj() * wpj + gqq.conj() * wqj);
                }
                for i in 0..d {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * gpp + viq * gqp);
                    v.set(i, q, vip * gpq + viq * gqq);
                }
            }
        }
        sweeps += 1;
        converged = offdiag_norm(&work) < threshold;
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| {
        work.get(i, i)
            .re
            .partial_cmp(&work.get(j, j).re)
            .expect("finite eigenvalues")
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| work.get(i, i).re).collect();
    let mut vectors = ComplexMatrix::zeros(d);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..d {
            vectors.set(row, new_col, v.get(row, old_col));
        }
    }
    Ok(EigenDecomposition { eigenvalues, eigenvectors: vectors })
}

/// Hermitian PSD square root: S with S·S ≈ a.
pub fn matrix_sqrt_psd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(a)?;
    for &l in &eig.eigenvalues {
        if l < -PSD_TOL {
            return Err(Error::NegativeEigenvalue { eigenvalue: l });
        }
    }
    Ok(eig.map_eigenvalues(|l| l.max(0.0).sqrt()))
}

/// Trace distance ½ Σ |eig(a − b)| between Hermitian matrices.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    a.check_hermitian()?;
    b.check_hermitian()?;
    let diff = a.sub(b)?;
    let eig = hermitian_eigen(&diff)?;
    Ok(0.5 * eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}
