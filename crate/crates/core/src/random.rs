//! Seeded random operators and states.
//!
//! All generators draw from [`ChaCha8Rng`] so a seed reproduces the same
//! instance across platforms and releases.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, hermitian_eig, CMatrix, DensityMatrix, Hermitian, Unitary};

pub type SimRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) / 2f64.sqrt()
}

/// `n x n` matrix of i.i.d. standard complex Gaussians.
pub fn ginibre(rng: &mut impl Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| gaussian(rng))
}

/// `scale * (G + G^dag) / 2` for a Ginibre matrix `G`.
pub fn random_hermitian(rng: &mut impl Rng, n: usize, scale: f64) -> Hermitian {
    let g = ginibre(rng, n);
    Hermitian::new((&g + g.adjoint()) * c(0.5 * scale, 0.0)).expect("symmetrized by construction")
}

/// Hilbert-Schmidt random state `G G^dag / Tr(G G^dag)`.
pub fn ginibre_density(rng: &mut impl Rng, n: usize) -> DensityMatrix {
    loop {
        let g = ginibre(rng, n);
        let m = &g * g.adjoint();
        let tr = m.trace().re;
        if tr > 0.0 {
            let m = m / c(tr, 0.0);
            let sym = (&m + m.adjoint()) * c(0.5, 0.0);
            return DensityMatrix::from_trusted(sym, vec![n]);
        }
    }
}

/// Haar-random unitary via QR of a Ginibre matrix with the phases of
/// `R`'s diagonal divided out.
pub fn haar_unitary(rng: &mut impl Rng, n: usize) -> Unitary {
    let (q, r) = ginibre(rng, n).qr().unpack();
    let mut u = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..n {
            u[(i, j)] *= phase;
        }
    }
    Unitary::new_unchecked(u)
}

pub fn random_state_vector(rng: &mut impl Rng, n: usize) -> DVector<Complex64> {
    let v = DVector::from_fn(n, |_, _| gaussian(rng));
    let norm = v.norm();
    v / c(norm, 0.0)
}

pub fn random_pure_density(rng: &mut impl Rng, n: usize) -> DensityMatrix {
    DensityMatrix::pure(&random_state_vector(rng, n), vec![n]).expect("non-zero Gaussian vector")
}

/// Conjugates a real diagonal by `basis`: `Q diag(values) Q^dag`.
pub fn in_basis(basis: &Unitary, values: &[f64]) -> CMatrix {
    let q = basis.matrix();
    q * crate::linalg::diag_real(values) * q.adjoint()
}

/// Hermitian operator `Q diag(values) Q^dag`.
pub fn hermitian_in_basis(basis: &Unitary, values: &[f64]) -> Hermitian {
    Hermitian::new(in_basis(basis, values)).expect("unitary conjugate of a real diagonal")
}

/// Density matrix with the given spectrum in the given basis. `weights`
/// are normalized to unit sum.
pub fn density_in_basis(basis: &Unitary, weights: &[f64]) -> DensityMatrix {
    let total: f64 = weights.iter().sum();
    let w: Vec<f64> = weights.iter().map(|x| x / total).collect();
    let m = in_basis(basis, &w);
    let sym = (&m + m.adjoint()) * c(0.5, 0.0);
    DensityMatrix::from_trusted(sym, vec![basis.dim()])
}

/// Random probability vector of length `n` (flat Dirichlet).
pub fn random_weights(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Smallest eigenvalue, used by tests to confirm positivity.
pub fn min_eigenvalue(rho: &DensityMatrix) -> f64 {
    hermitian_eig(&rho.as_hermitian()).values[0]
}
