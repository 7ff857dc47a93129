//! Pure-dephasing qubit–environment model and its exact evolution.
//!
//! The Hamiltonian is
//! `H = sum_i eps_i |i><i| + H_E + |0><0| (x) V0 + |1><1| (x) V1`,
//! so the evolution operator is block-diagonal in the qubit pointer basis,
//! `U(t) = |0><0| (x) w0(t) + |1><1| (x) w1(t)` with
//! `w_i(t) = exp(-i (H_E + V_i + eps_i) t)`. The qubit self-energies are
//! folded into `w_i` as global phases.
//!
//! States are always propagated from `t = 0` with exact exponentials.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    block, c, hermitian_eig, partial_trace, tensor, unitary_exp, CMatrix, DensityMatrix, Eigh,
    Hermitian, Unitary,
};

/// Hamiltonian data of the qubit–environment model.
#[derive(Debug, Clone, PartialEq)]
pub struct DephasingModel {
    eps0: f64,
    eps1: f64,
    h_env: Hermitian,
    v0: Hermitian,
    v1: Hermitian,
}

impl DephasingModel {
    pub fn new(eps0: f64, eps1: f64, h_env: Hermitian, v0: Hermitian, v1: Hermitian) -> Result<Self> {
        let n = h_env.dim();
        for (name, op) in [("v0", &v0), ("v1", &v1)] {
            if op.dim() != n {
                return Err(Error::InvalidParameter {
                    name: name.into(),
                    reason: format!("dimension {} does not match env_dim {}", op.dim(), n),
                });
            }
        }
        if !eps0.is_finite() || !eps1.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            eps0,
            eps1,
            h_env,
            v0,
            v1,
        })
    }

    pub fn env_dim(&self) -> usize {
        self.h_env.dim()
    }

    pub fn eps(&self) -> (f64, f64) {
        (self.eps0, self.eps1)
    }

    pub fn h_env(&self) -> &Hermitian {
        &self.h_env
    }

    pub fn v0(&self) -> &Hermitian {
        &self.v0
    }

    pub fn v1(&self) -> &Hermitian {
        &self.v1
    }

    /// `H_E + V_i + eps_i`, the generator of `w_i`.
    pub fn conditional_hamiltonian(&self, qubit_state: usize) -> Hermitian {
        let (v, eps) = match qubit_state {
            0 => (&self.v0, self.eps0),
            _ => (&self.v1, self.eps1),
        };
        self.h_env
            .sum_shifted(v, eps)
            .expect("dimensions checked at construction")
    }
}

/// Qubit initial state `alpha|0> + beta|1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitPureState {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl QubitPureState {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { alpha, beta })
    }

    /// Builds the state from (magnitude, phase) pairs and normalizes it.
    pub fn from_polar(alpha: (f64, f64), beta: (f64, f64)) -> Result<Self> {
        let a = Complex64::from_polar(alpha.0, alpha.1);
        let b = Complex64::from_polar(beta.0, beta.1);
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm * norm));
        }
        Self::new(a / norm, b / norm)
    }

    pub fn equal_superposition() -> Self {
        let s = 1.0 / 2f64.sqrt();
        Self {
            alpha: c(s, 0.0),
            beta: c(s, 0.0),
        }
    }

    pub fn amplitude(&self, i: usize) -> Complex64 {
        if i == 0 {
            self.alpha
        } else {
            self.beta
        }
    }

    pub fn density(&self) -> DensityMatrix {
        let v = DVector::from_vec(vec![self.alpha, self.beta]);
        DensityMatrix::from_trusted(&v * v.adjoint(), vec![2])
    }

    /// `|alpha beta*|`, the coherence at `t = 0`.
    pub fn initial_coherence(&self) -> f64 {
        (self.alpha * self.beta.conj()).norm()
    }
}

/// Initial environment state with its spectral data cached.
#[derive(Debug, Clone)]
pub struct EnvironmentState {
    rho: DensityMatrix,
    spectrum: Eigh,
}

impl EnvironmentState {
    pub fn new(rho: DensityMatrix) -> Result<Self> {
        if rho.dims().len() != 1 {
            let rho = rho.with_dims(vec![rho.dim()])?;
            return Self::new(rho);
        }
        let spectrum = hermitian_eig(&rho.as_hermitian());
        Ok(Self { rho, spectrum })
    }

    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        let n = m.nrows();
        Self::new(DensityMatrix::new(m, vec![n])?)
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn density(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn matrix(&self) -> &CMatrix {
        self.rho.matrix()
    }

    /// Eigenvalues `c_n` (ascending) and eigenvectors `|n>` of `R(0)`.
    pub fn spectrum(&self) -> &Eigh {
        &self.spectrum
    }
}

/// Bipartite qubit(s)–environment state with dims `(qubit_dim, N)`.
#[derive(Debug, Clone)]
pub struct JointState(DensityMatrix);

impl JointState {
    pub fn new(rho: DensityMatrix) -> Result<Self> {
        match rho.dims() {
            [q, _] if *q == 2 || *q == 4 => Ok(Self(rho)),
            dims => Err(Error::InvalidSubsystems {
                dims: dims.to_vec(),
                dim: rho.dim(),
            }),
        }
    }

    pub fn density(&self) -> &DensityMatrix {
        &self.0
    }

    pub fn matrix(&self) -> &CMatrix {
        self.0.matrix()
    }

    pub fn qubit_dim(&self) -> usize {
        self.0.dims()[0]
    }

    pub fn env_dim(&self) -> usize {
        self.0.dims()[1]
    }

    pub fn reduced_system(&self) -> DensityMatrix {
        partial_trace(&self.0, 0).expect("two subsystems")
    }

    pub fn reduced_environment(&self) -> DensityMatrix {
        partial_trace(&self.0, 1).expect("two subsystems")
    }
}

/// `(w0(t), w1(t))`.
pub fn conditional_evolutions(model: &DephasingModel, t: f64) -> (Unitary, Unitary) {
    (
        unitary_exp(&model.conditional_hamiltonian(0), t),
        unitary_exp(&model.conditional_hamiltonian(1), t),
    )
}

/// The full `2N x 2N` evolution operator.
pub fn joint_evolution_operator(model: &DephasingModel, t: f64) -> Unitary {
    let (w0, w1) = conditional_evolutions(model, t);
    let p0 = crate::linalg::diag_real(&[1.0, 0.0]);
    let p1 = crate::linalg::diag_real(&[0.0, 1.0]);
    Unitary::new_unchecked(tensor(&p0, w0.matrix()) + tensor(&p1, w1.matrix()))
}

/// `sigma(t) = U(t) (|psi><psi| (x) R(0)) U(t)^dag`.
pub fn evolve_joint(
    psi: &QubitPureState,
    env: &EnvironmentState,
    model: &DephasingModel,
    t: f64,
) -> Result<JointState> {
    if env.dim() != model.env_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.env_dim(),
            actual: env.dim(),
        });
    }
    let u = joint_evolution_operator(model, t);
    let initial = psi.density().tensor(env.density());
    let evolved = u.matrix() * initial.matrix() * u.matrix().adjoint();
    let evolved = (&evolved + evolved.adjoint()) * c(0.5, 0.0);
    JointState::new(DensityMatrix::from_trusted(evolved, vec![2, env.dim()]))
}

/// The four `N x N` blocks `sigma_kq = <k|sigma|q>` of a qubit–environment state.
#[derive(Debug, Clone)]
pub struct QubitBlocks {
    pub b00: CMatrix,
    pub b01: CMatrix,
    pub b10: CMatrix,
    pub b11: CMatrix,
}

impl QubitBlocks {
    pub fn get(&self, k: usize, q: usize) -> &CMatrix {
        match (k, q) {
            (0, 0) => &self.b00,
            (0, 1) => &self.b01,
            (1, 0) => &self.b10,
            _ => &self.b11,
        }
    }
}

pub fn qubit_blocks(sigma: &JointState) -> Result<QubitBlocks> {
    if sigma.qubit_dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: sigma.qubit_dim(),
        });
    }
    let n = sigma.env_dim();
    let m = sigma.matrix();
    Ok(QubitBlocks {
        b00: block(m, 0, 0, n),
        b01: block(m, 0, 1, n),
        b10: block(m, 1, 0, n),
        b11: block(m, 1, 1, n),
    })
}

/// `|<0| Tr_E sigma |1>|`.
pub fn qubit_coherence(sigma: &JointState) -> Result<f64> {
    if sigma.qubit_dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: sigma.qubit_dim(),
        });
    }
    Ok(sigma.reduced_system().matrix()[(0, 1)].norm())
}

/// `Tr(R(0) w0^dag(t) w1(t))`; the qubit coherence is `|alpha beta*|` times
/// its modulus.
pub fn decoherence_factor(env: &EnvironmentState, model: &DephasingModel, t: f64) -> Complex64 {
    let (w0, w1) = conditional_evolutions(model, t);
    let w = w0.matrix().adjoint() * w1.matrix();
    (env.matrix() * w).trace()
}

/// Populations `(<0|rho_Q|0>, <1|rho_Q|1>)` of the reduced qubit state.
pub fn qubit_populations(sigma: &JointState) -> (f64, f64) {
    let q = sigma.reduced_system();
    let m = q.matrix();
    (m[(0, 0)].re, m[(m.nrows() - 1, m.ncols() - 1)].re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag_real, frobenius, identity, pauli_z, unitarity_residual, ZERO};
    use crate::random::{ginibre_density, random_hermitian, seeded_rng};

    fn random_model(seed: u64, n: usize) -> DephasingModel {
        let mut rng = seeded_rng(seed);
        DephasingModel::new(
            0.3,
            -0.8,
            random_hermitian(&mut rng, n, 1.0),
            random_hermitian(&mut rng, n, 1.0),
            random_hermitian(&mut rng, n, 1.0),
        )
        .unwrap()
    }

    #[test]
    fn evolutions_at_zero_are_identity() {
        let m = random_model(1, 3);
        let (w0, w1) = conditional_evolutions(&m, 0.0);
        assert!(frobenius(&(w0.matrix() - identity(3))) < 1e-14);
        assert!(frobenius(&(w1.matrix() - identity(3))) < 1e-14);
        let u = joint_evolution_operator(&m, 0.0);
        assert!(frobenius(&(u.matrix() - identity(6))) < 1e-14);
    }

    #[test]
    fn symmetric_coupling_gives_equal_evolutions() {
        let mut rng = seeded_rng(2);
        let h = random_hermitian(&mut rng, 3, 1.0);
        let v = random_hermitian(&mut rng, 3, 1.0);
        let m = DephasingModel::new(0.5, 0.5, h, v.clone(), v).unwrap();
        for t in [0.3, 1.7, 5.0] {
            let (w0, w1) = conditional_evolutions(&m, t);
            assert!(frobenius(&(w0.matrix() - w1.matrix())) < 1e-14);
        }
    }

    #[test]
    fn pauli_z_coupling_closed_form() {
        let g = 0.7;
        let m = DephasingModel::new(
            0.0,
            0.0,
            Hermitian::zero(2),
            Hermitian::zero(2),
            Hermitian::new(pauli_z() * c(g, 0.0)).unwrap(),
        )
        .unwrap();
        for t in [0.4, 2.0, 9.1] {
            let (_, w1) = conditional_evolutions(&m, t);
            let expected = CMatrix::from_diagonal(&DVector::from_vec(vec![
                Complex64::from_polar(1.0, -g * t),
                Complex64::from_polar(1.0, g * t),
            ]));
            assert!(frobenius(&(w1.matrix() - expected)) < 1e-14);
        }
    }

    #[test]
    fn joint_operator_inverse_and_pointer_invariance() {
        let m = random_model(3, 3);
        let t = 1.3;
        let u = joint_evolution_operator(&m, t);
        let back = joint_evolution_operator(&m, -t);
        assert!(frobenius(&(u.matrix() * back.matrix() - identity(6))) < 1e-10);
        assert!(unitarity_residual(u.matrix()) < 1e-10);
        let (w0, _) = conditional_evolutions(&m, t);
        for n in 0..3 {
            let mut e = DVector::from_element(6, ZERO);
            e[n] = c(1.0, 0.0);
            let out = u.matrix() * &e;
            let expected_env = w0.matrix().column(n);
            for k in 0..3 {
                assert_eq!(out[k], expected_env[k]);
                assert_eq!(out[3 + k], ZERO);
            }
        }
    }

    #[test]
    fn evolve_at_zero_is_product() {
        let m = random_model(4, 3);
        let env = EnvironmentState::new(ginibre_density(&mut seeded_rng(5), 3)).unwrap();
        let psi = QubitPureState::from_polar((0.6, 0.2), (0.8, -1.0)).unwrap();
        let s = evolve_joint(&psi, &env, &m, 0.0).unwrap();
        let product = psi.density().tensor(env.density());
        assert!(frobenius(&(s.matrix() - product.matrix())) < 1e-14);
    }

    #[test]
    fn pointer_initial_state_stays_product() {
        let m = random_model(6, 3);
        let env = EnvironmentState::new(ginibre_density(&mut seeded_rng(7), 3)).unwrap();
        let psi = QubitPureState::new(c(1.0, 0.0), ZERO).unwrap();
        for t in [0.5, 2.5] {
            let s = evolve_joint(&psi, &env, &m, t).unwrap();
            let (w0, _) = conditional_evolutions(&m, t);
            let r = w0.matrix() * env.matrix() * w0.matrix().adjoint();
            let expected = tensor(&diag_real(&[1.0, 0.0]), &r);
            assert!(frobenius(&(s.matrix() - expected)) < 1e-13);
            assert!(qubit_coherence(&s).unwrap() < 1e-15);
        }
    }

    #[test]
    fn blocks_match_independent_construction() {
        let m = random_model(8, 4);
        let env = EnvironmentState::new(ginibre_density(&mut seeded_rng(9), 4)).unwrap();
        let psi = QubitPureState::from_polar((0.3, 0.5), (0.9, 2.0)).unwrap();
        let (a, b) = (psi.alpha, psi.beta);
        for t in [0.0, 0.9, 3.3] {
            let s = evolve_joint(&psi, &env, &m, t).unwrap();
            let blocks = qubit_blocks(&s).unwrap();
            let (w0, w1) = conditional_evolutions(&m, t);
            let r = env.matrix();
            let s00 = w0.matrix() * r * w0.matrix().adjoint() * c(a.norm_sqr(), 0.0);
            let s01 = w0.matrix() * r * w1.matrix().adjoint() * (a * b.conj());
            assert!(frobenius(&(&blocks.b00 - s00)) < 1e-12);
            assert!(frobenius(&(&blocks.b01 - s01)) < 1e-12);
            assert!(frobenius(&(&blocks.b01 - blocks.b10.adjoint())) < 1e-14);
            assert!((blocks.b00.trace().re - a.norm_sqr()).abs() < 1e-12);
            assert!(((&blocks.b00 + &blocks.b11).trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn product_state_block_factorizes() {
        let m = random_model(10, 2);
        let env = EnvironmentState::new(ginibre_density(&mut seeded_rng(11), 2)).unwrap();
        let psi = QubitPureState::equal_superposition();
        let s = evolve_joint(&psi, &env, &m, 0.0).unwrap();
        let blocks = qubit_blocks(&s).unwrap();
        let expected = env.matrix() * (psi.alpha * psi.beta.conj());
        assert!(frobenius(&(&blocks.b01 - expected)) < 1e-15);
    }

    #[test]
    fn coherence_examples() {
        let m = random_model(12, 2);
        let env = EnvironmentState::new(ginibre_density(&mut seeded_rng(13), 2)).unwrap();
        let psi = QubitPureState::equal_superposition();
        let s = evolve_joint(&psi, &env, &m, 0.0).unwrap();
        assert!((qubit_coherence(&s).unwrap() - 0.5).abs() < 1e-14);
        for t in [0.3, 1.1, 4.0] {
            let s = evolve_joint(&psi, &env, &m, t).unwrap();
            let direct = qubit_coherence(&s).unwrap();
            let factor = decoherence_factor(&env, &m, t).norm() * psi.initial_coherence();
            assert!((direct - factor).abs() < 1e-10);
            let (p0, p1) = qubit_populations(&s);
            assert!((p0 - 0.5).abs() < 1e-12 && (p1 - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn normalization_enforced() {
        assert!(matches!(
            QubitPureState::new(c(1.0, 0.0), c(1.0, 0.0)),
            Err(Error::NotNormalized(_))
        ));
        let s = QubitPureState::from_polar((3.0, 0.0), (4.0, 0.0)).unwrap();
        assert!((s.alpha.re - 0.6).abs() < 1e-15);
    }

    #[test]
    fn mismatched_model_rejected() {
        let r = DephasingModel::new(
            0.0,
            0.0,
            Hermitian::zero(2),
            Hermitian::zero(3),
            Hermitian::zero(2),
        );
        assert!(matches!(r, Err(Error::InvalidParameter { ref name, .. }) if name == "v0"));
    }
}
