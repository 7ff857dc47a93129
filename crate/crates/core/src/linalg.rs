//! Dense complex matrix foundation.
//!
//! Every operator in the crate is a `DMatrix<Complex64>` wrapped in a newtype
//! that records which invariant it satisfies: [`Hermitian`], [`Unitary`] or
//! [`DensityMatrix`]. Residual norms are Frobenius throughout.
//!
//! Multi-partite indices are row-major: for subsystem dimensions
//! `(d_0, ..., d_{k-1})` the basis state `|i_0 ... i_{k-1}>` sits at
//! `sum_j i_j * prod_{l>j} d_l`, matching the Kronecker product convention
//! of [`tensor`].

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Relative Hermiticity tolerance: `||M - M^dag||_F <= tol * max(1, ||M||_F)`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Absolute unitarity tolerance on `||U U^dag - 1||_F`.
pub const UNITARY_TOL: f64 = 1e-10;
/// Absolute trace tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue still accepted as positive semi-definite.
pub const PSD_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn diag_real(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| c(v, 0.0)),
    ))
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMatrix {
    diag_real(&[1.0, -1.0])
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.norm()
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.trace()
}

fn check_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Relative deviation from self-adjointness.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    frobenius(&(m - m.adjoint())) / frobenius(m).max(1.0)
}

/// A self-adjoint operator. Construction symmetrizes the input after
/// validation so downstream eigensolvers see an exactly Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Hermitian(CMatrix);

impl Hermitian {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square(&m)?;
        let r = hermiticity_residual(&m);
        if r > HERMITIAN_TOL {
            return Err(Error::NotHermitian(r));
        }
        let sym = (&m + m.adjoint()) * c(0.5, 0.0);
        Ok(Self(sym))
    }

    pub fn zero(dim: usize) -> Self {
        Self(CMatrix::zeros(dim, dim))
    }

    pub fn from_real_diagonal(values: &[f64]) -> Self {
        Self(diag_real(values))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(&self.0 * c(s, 0.0))
    }

    /// Sum of two Hermitian operators plus a real multiple of the identity.
    pub fn sum_shifted(&self, other: &Hermitian, shift: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(Self(&self.0 + &other.0 + identity(self.dim()) * c(shift, 0.0)))
    }
}

/// A unitary operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary(CMatrix);

impl Unitary {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square(&m)?;
        let r = unitarity_residual(&m);
        if r > UNITARY_TOL * (m.nrows() as f64 / 64.0).max(1.0) {
            return Err(Error::NotUnitary(r));
        }
        Ok(Self(m))
    }

    pub(crate) fn new_unchecked(m: CMatrix) -> Self {
        Self(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self(identity(dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn compose(&self, other: &Unitary) -> Self {
        Self(&self.0 * &other.0)
    }
}

pub fn unitarity_residual(m: &CMatrix) -> f64 {
    frobenius(&(m * m.adjoint() - identity(m.nrows())))
}

/// A density matrix together with the dimensions of its subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(m: CMatrix, dims: Vec<usize>) -> Result<Self> {
        check_square(&m)?;
        check_dims(&dims, m.nrows())?;
        let h = Hermitian::new(m)?;
        let tr = h.matrix().trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        let min = hermitian_eig(&h).values.first().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::NotPsd(min));
        }
        Ok(Self {
            matrix: h.into_matrix(),
            dims,
        })
    }

    /// Wraps a matrix known to be a valid state, e.g. the unitary image of
    /// one. Only the subsystem metadata is checked.
    pub(crate) fn from_trusted(matrix: CMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), matrix.nrows());
        Self { matrix, dims }
    }

    /// Projector onto a normalized copy of `psi`.
    pub fn pure(psi: &DVector<Complex64>, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, psi.len())?;
        let n = psi.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidParameter {
                name: "psi".into(),
                reason: "zero or non-finite state vector".into(),
            });
        }
        let v = psi / c(n, 0.0);
        Ok(Self::from_trusted(&v * v.adjoint(), dims))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_trusted(identity(dim) * c(1.0 / dim as f64, 0.0), vec![dim])
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Same matrix, re-labelled with a different factorization of its
    /// dimension, e.g. `(4, N)` viewed as `(2, 2, N)`.
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, self.dim())?;
        Ok(Self::from_trusted(self.matrix.clone(), dims))
    }

    pub fn as_hermitian(&self) -> Hermitian {
        Hermitian(self.matrix.clone())
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eig(&self.as_hermitian()).values
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::from_trusted(tensor(&self.matrix, &other.matrix), dims)
    }
}

fn check_dims(dims: &[usize], dim: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) || dims.iter().product::<usize>() != dim {
        return Err(Error::InvalidSubsystems {
            dims: dims.to_vec(),
            dim,
        });
    }
    Ok(())
}

/// Spectral decomposition `H = V diag(values) V^dag`.
#[derive(Debug, Clone)]
pub struct Eigh {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
}

/// Hermitian eigendecomposition with a deterministic gauge: eigenvalues
/// ascending, first non-negligible component of each eigenvector real and
/// positive.
pub fn hermitian_eig(h: &Hermitian) -> Eigh {
    let n = h.dim();
    if n == 0 {
        return Eigh {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        };
    }
    let eig = SymmetricEigen::new(h.matrix().clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let pivot = v.iter().find(|z| z.norm() > 1e-10).copied().unwrap_or(ONE);
        let phase = pivot.conj() / pivot.norm();
        for row in 0..n {
            vectors[(row, col)] = v[row] * phase;
        }
    }
    Eigh { values, vectors }
}

impl Eigh {
    pub fn reconstruct(&self) -> CMatrix {
        self.map_reconstruct(|v| c(v, 0.0))
    }

    /// `V diag(f(values)) V^dag`.
    pub fn map_reconstruct(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &v) in self.values.iter().enumerate() {
            let fv = f(v);
            for z in scaled.column_mut(j).iter_mut() {
                *z *= fv;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// `exp(-i H t)` by spectral decomposition.
pub fn unitary_exp(h: &Hermitian, t: f64) -> Unitary {
    let eig = hermitian_eig(h);
    Unitary::new_unchecked(eig.map_reconstruct(|lambda| Complex64::from_polar(1.0, -lambda * t)))
}

/// Kronecker product; entry `(i*dim_b + k, j*dim_b + l) = a_ij * b_kl`.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Splits a flat index into per-subsystem digits (row-major).
fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
}

fn flatten(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&i, &d)| acc * d + i)
}

/// Reduced state on the subsystems listed in `keep` (kept in ascending order).
pub fn partial_trace_keep(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let dims = rho.dims();
    let k = dims.len();
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() {
        return Err(Error::InvalidParameter {
            name: "keep".into(),
            reason: "at least one subsystem must be kept".into(),
        });
    }
    if let Some(&bad) = keep.iter().find(|&&i| i >= k) {
        return Err(Error::InvalidSubsystem { index: bad, count: k });
    }
    let kept_dims: Vec<usize> = keep.iter().map(|&i| dims[i]).collect();
    let traced: Vec<usize> = (0..k).filter(|i| !keep.contains(i)).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let dk: usize = kept_dims.iter().product();
    let dt: usize = traced_dims.iter().product();

    let m = rho.matrix();
    let mut out = CMatrix::zeros(dk, dk);
    let mut full = vec![0usize; k];
    let mut kd = vec![0usize; keep.len()];
    let mut td = vec![0usize; traced.len()];
    // index of the full space for (kept digits, traced digits)
    let compose = |kept: usize, tr: usize, full: &mut [usize], kd: &mut [usize], td: &mut [usize]| {
        digits(kept, &kept_dims, kd);
        digits(tr, &traced_dims, td);
        for (slot, &i) in keep.iter().enumerate() {
            full[i] = kd[slot];
        }
        for (slot, &i) in traced.iter().enumerate() {
            full[i] = td[slot];
        }
        flatten(full, dims)
    };
    for r in 0..dk {
        for col in 0..dk {
            let mut acc = ZERO;
            for e in 0..dt {
                let fr = compose(r, e, &mut full, &mut kd, &mut td);
                let fc = compose(col, e, &mut full, &mut kd, &mut td);
                acc += m[(fr, fc)];
            }
            out[(r, col)] = acc;
        }
    }
    Ok(DensityMatrix::from_trusted(out, kept_dims))
}

/// Reduced state of a single subsystem.
pub fn partial_trace(rho: &DensityMatrix, keep: usize) -> Result<DensityMatrix> {
    if rho.dims().len() < 2 {
        return Err(Error::InvalidParameter {
            name: "rho".into(),
            reason: "partial trace needs at least two subsystems".into(),
        });
    }
    partial_trace_keep(rho, &[keep])
}

/// Transposes the listed subsystems' indices, leaving the rest untouched.
pub fn partial_transpose(rho: &DensityMatrix, subsystems: &[usize]) -> Result<CMatrix> {
    let dims = rho.dims();
    if let Some(&bad) = subsystems.iter().find(|&&i| i >= dims.len()) {
        return Err(Error::InvalidSubsystem {
            index: bad,
            count: dims.len(),
        });
    }
    let n = rho.dim();
    let m = rho.matrix();
    let mut out = CMatrix::zeros(n, n);
    let mut rd = vec![0usize; dims.len()];
    let mut cd = vec![0usize; dims.len()];
    for r in 0..n {
        for col in 0..n {
            digits(r, dims, &mut rd);
            digits(col, dims, &mut cd);
            for &s in subsystems {
                std::mem::swap(&mut rd[s], &mut cd[s]);
            }
            out[(flatten(&rd, dims), flatten(&cd, dims))] = m[(r, col)];
        }
    }
    Ok(out)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// `||AB - BA||_F`.
pub fn commutator_residual(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            actual: b.nrows(),
        });
    }
    Ok(frobenius(&commutator(a, b)))
}

/// `[A, A^dag] = 0` up to `tol * max(1, ||A||_F^2)`.
pub fn is_normal(a: &CMatrix, tol: f64) -> bool {
    let r = frobenius(&commutator(a, &a.adjoint()));
    r <= tol * frobenius(a).powi(2).max(1.0)
}

/// Extracts the square block `rows x cols` of side `size` starting at
/// `(row * size, col * size)`.
pub fn block(m: &CMatrix, row: usize, col: usize, size: usize) -> CMatrix {
    m.view((row * size, col * size), (size, size)).into_owned()
}
