//! Bell pair with one qubit coupled to the environment.
//!
//! The pair starts in `(|00> + |11>)/sqrt(2) (x) R(0)` and evolves under
//! `H = eps_A |1><1|_A + eps_B |1><1|_B + |1><1|_A (x) V_A + H_E`. The state
//! never leaves the `{|00>, |11>}` subspace, so it behaves as an effective
//! qubit–environment system with `V0 = 0`, `V1 = V_A`, and the
//! single-qubit machinery applies unchanged.

use std::f64::consts::PI;

use nalgebra::DVector;

use crate::correlation::{simultaneous_eigenbasis, EigenphaseDecomposition};
use crate::discord::{block_criterion, BlockCriterion};
use crate::error::{Error, Result};
use crate::linalg::{
    c, diag_real, hermitian_eig, partial_trace, partial_transpose, pauli_y, tensor, unitary_exp,
    CMatrix, DensityMatrix, Hermitian, ZERO,
};
use crate::model::{DephasingModel, EnvironmentState, JointState};
use crate::series::{TimeRecord, TimeSeries};

#[derive(Debug, Clone)]
pub struct TwoQubitModel {
    pub eps_a: f64,
    pub eps_b: f64,
    pub h_env: Hermitian,
    pub v_a: Hermitian,
    pub env: EnvironmentState,
}

impl TwoQubitModel {
    pub fn new(eps_a: f64, eps_b: f64, h_env: Hermitian, v_a: Hermitian, env: EnvironmentState) -> Result<Self> {
        let n = h_env.dim();
        if v_a.dim() != n {
            return Err(Error::InvalidParameter {
                name: "v_a".into(),
                reason: format!("dimension {} does not match env_dim {}", v_a.dim(), n),
            });
        }
        if env.dim() != n {
            return Err(Error::InvalidParameter {
                name: "env".into(),
                reason: format!("dimension {} does not match env_dim {}", env.dim(), n),
            });
        }
        Ok(Self {
            eps_a,
            eps_b,
            h_env,
            v_a,
            env,
        })
    }

    /// The minimal static-basis realization: `N = 2`, `H_E = 0`,
    /// `V_A = diag(phi0, phi1)`, `R(0) = diag(c0, 1 - c0)`.
    pub fn diagonal(c0: f64, phi0: f64, phi1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c0) {
            return Err(Error::InvalidParameter {
                name: "c0".into(),
                reason: format!("{c0} is not a probability"),
            });
        }
        Self::new(
            0.0,
            0.0,
            Hermitian::zero(2),
            Hermitian::from_real_diagonal(&[phi0, phi1]),
            EnvironmentState::from_matrix(diag_real(&[c0, 1.0 - c0]))?,
        )
    }

    pub fn env_dim(&self) -> usize {
        self.h_env.dim()
    }

    /// Effective qubit–environment model on the `{|00>, |11>}` subspace.
    pub fn effective_model(&self) -> DephasingModel {
        let n = self.env_dim();
        DephasingModel::new(
            0.0,
            self.eps_a + self.eps_b,
            self.h_env.clone(),
            Hermitian::zero(n),
            self.v_a.clone(),
        )
        .expect("dimensions checked at construction")
    }

    /// `exp(-i H t)` on the full `4N`-dimensional space.
    pub fn evolution_operator(&self, t: f64) -> CMatrix {
        let n = self.env_dim();
        let w = [
            unitary_exp(&self.h_env, t),
            unitary_exp(
                &self.h_env.sum_shifted(&self.v_a, 0.0).expect("same dimension"),
                t,
            ),
        ];
        let mut u = CMatrix::zeros(4 * n, 4 * n);
        for (a, w_a) in w.iter().enumerate() {
            for b in 0..2 {
                let idx = 2 * a + b;
                let energy = self.eps_a * a as f64 + self.eps_b * b as f64;
                let phase = num_complex::Complex64::from_polar(1.0, -energy * t);
                let mut projector = CMatrix::zeros(4, 4);
                projector[(idx, idx)] = c(1.0, 0.0);
                u += tensor(&projector, w_a.matrix()) * phase;
            }
        }
        u
    }
}

pub fn bell_state() -> DensityMatrix {
    let s = 1.0 / 2f64.sqrt();
    let psi = DVector::from_vec(vec![c(s, 0.0), ZERO, ZERO, c(s, 0.0)]);
    DensityMatrix::pure(&psi, vec![4]).expect("normalized")
}

/// Pair–environment state at time `t`, dims `(4, N)`.
pub fn evolve_bell(model: &TwoQubitModel, t: f64) -> JointState {
    let u = model.evolution_operator(t);
    let initial = bell_state().tensor(model.env.density());
    let m = &u * initial.matrix() * u.adjoint();
    let m = (&m + m.adjoint()) * c(0.5, 0.0);
    JointState::new(DensityMatrix::from_trusted(m, vec![4, model.env_dim()])).expect("dims (4, N)")
}

/// Reduced two-qubit state with dims `(2, 2)`.
pub fn reduced_pair(sigma: &JointState) -> DensityMatrix {
    sigma
        .reduced_system()
        .with_dims(vec![2, 2])
        .expect("4 = 2 x 2")
}

/// `|sum_n c_n' exp(i phi_n)|`.
pub fn concurrence_closed_form(decomp: &EigenphaseDecomposition) -> f64 {
    decomp.weighted_phase_sum().norm().min(1.0)
}

/// Closed-form concurrence of the pair at time `t`, via the joint eigenbasis.
pub fn pair_concurrence(model: &TwoQubitModel, t: f64) -> Result<f64> {
    let d = simultaneous_eigenbasis(&model.env, &model.effective_model(), t)?;
    Ok(concurrence_closed_form(&d))
}

/// Wootters concurrence of a two-qubit state.
///
/// The values `lambda_i` are the singular values of `sqrt(rho) sqrt(rho~)`
/// with `rho~ = (Y (x) Y) rho* (Y (x) Y)`, which equal the square roots of
/// the eigenvalues of `rho rho~` without squaring round-off.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: rho.dim(),
        });
    }
    let yy = tensor(&pauli_y(), &pauli_y());
    let tilde = &yy * rho.matrix().conjugate() * &yy;
    let sqrt_rho = psd_sqrt(rho.matrix());
    let sqrt_tilde = psd_sqrt(&tilde);
    let mut s: Vec<f64> = (sqrt_rho * sqrt_tilde)
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok((s[0] - s[1] - s[2] - s[3]).max(0.0))
}

fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let e = hermitian_eig(&Hermitian::new(m.clone()).expect("density matrix"));
    e.map_reconstruct(|v| c(v.max(0.0).sqrt(), 0.0))
}

/// Sum of the moduli of the negative eigenvalues of the partial transpose
/// over the subsystems in `cut` (Bell state gives 1/2).
pub fn negativity(sigma: &DensityMatrix, cut: &[usize]) -> Result<f64> {
    if cut.is_empty() || cut.len() >= sigma.dims().len() {
        return Err(Error::InvalidParameter {
            name: "cut".into(),
            reason: format!(
                "{cut:?} is not a proper bipartition of {} subsystems",
                sigma.dims().len()
            ),
        });
    }
    let pt = partial_transpose(sigma, cut)?;
    let e = hermitian_eig(&Hermitian::new(pt)?);
    Ok(e.values.iter().filter(|&&v| v < 0.0).map(|v| -v).sum())
}

/// Negativity across qubit A versus (qubit B, environment).
pub fn single_qubit_cut_negativity(sigma: &JointState) -> Result<f64> {
    let split = sigma.density().with_dims(vec![2, 2, sigma.env_dim()])?;
    negativity(&split, &[0])
}

/// Zero discord of the pair–environment state with respect to the pair.
pub fn pair_discord_check(sigma: &JointState, tol: f64) -> Result<BlockCriterion> {
    block_criterion(sigma.density(), 0, tol)
}

/// Zero discord of the pair–environment state with respect to the environment.
pub fn pair_env_discord_check(sigma: &JointState, tol: f64) -> Result<BlockCriterion> {
    block_criterion(sigma.density(), 1, tol)
}

/// Cycle structure when the joint eigenbasis is static and `phi_n(t) = phi_n t`.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleTimes {
    pub phi0: f64,
    pub phi1: f64,
    pub period: f64,
    /// Pure-Bell return times `2 pi p / |phi1 - phi0|`.
    pub t_p: Vec<f64>,
    /// Mid-cycle times `(2q + 1) pi / |phi1 - phi0|`, where `exp(i phi0 t) = -exp(i phi1 t)`.
    pub t_q: Vec<f64>,
}

impl CycleTimes {
    /// Closed-form concurrence `|c0 exp(i phi0 t) + c1 exp(i phi1 t)|`.
    pub fn concurrence(&self, c0: f64, t: f64) -> f64 {
        let z = num_complex::Complex64::from_polar(c0, self.phi0 * t)
            + num_complex::Complex64::from_polar(1.0 - c0, self.phi1 * t);
        z.norm()
    }
}

pub fn cycle_times(phi0: f64, phi1: f64, count: usize) -> Result<CycleTimes> {
    let gap = (phi1 - phi0).abs();
    if gap == 0.0 || !gap.is_finite() {
        return Err(Error::NoDephasingCycle);
    }
    let period = 2.0 * PI / gap;
    let t_p = (0..count).map(|p| p as f64 * period).collect();
    let t_q = (0..count).map(|q| (2 * q + 1) as f64 * PI / gap).collect();
    Ok(CycleTimes {
        phi0,
        phi1,
        period,
        t_p,
        t_q,
    })
}

/// Agreement required between the closed-form and Wootters concurrences.
pub const CONCURRENCE_CROSSCHECK_TOL: f64 = 1e-10;

/// One full cycle of pair concurrence for `R(0) = diag(c0, 1 - c0)` and
/// `V_A = diag(0, phi_gap)`, sampled uniformly on `[0, 2 pi / phi_gap]`.
///
/// Each sample is computed through the joint eigenbasis and verified against
/// the Wootters concurrence of the fully evolved reduced state.
pub fn fig1_curve(c0: f64, phi_gap: f64, samples: usize) -> Result<TimeSeries> {
    if !(0.5..=1.0).contains(&c0) {
        return Err(Error::InvalidParameter {
            name: "c0".into(),
            reason: format!("{c0} is outside [0.5, 1]"),
        });
    }
    if !(phi_gap > 0.0 && phi_gap.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "phi_gap".into(),
            reason: "must be positive and finite".into(),
        });
    }
    if samples < 2 {
        return Err(Error::InvalidParameter {
            name: "samples".into(),
            reason: "need at least the two cycle endpoints".into(),
        });
    }
    let model = TwoQubitModel::diagonal(c0, 0.0, phi_gap)?;
    let cycle = cycle_times(0.0, phi_gap, 2)?;
    let mut records = Vec::with_capacity(samples);
    for k in 0..samples {
        let t = cycle.period * k as f64 / (samples - 1) as f64;
        let closed = pair_concurrence(&model, t)?;
        let formula = cycle.concurrence(c0, t);
        let sigma = evolve_bell(&model, t);
        let oracle = wootters_concurrence(&reduced_pair(&sigma))?;
        if (closed - oracle).abs() > CONCURRENCE_CROSSCHECK_TOL
            || (closed - formula).abs() > CONCURRENCE_CROSSCHECK_TOL
        {
            return Err(Error::CrossCheck(format!(
                "concurrence at t={t}: closed form {closed}, formula {formula}, Wootters {oracle}"
            )));
        }
        records.push(TimeRecord {
            t,
            t_normalized: Some(t / cycle.period),
            concurrence: Some(closed),
            negativity: Some(single_qubit_cut_negativity(&sigma)?),
            ..TimeRecord::at(t)
        });
    }
    Ok(TimeSeries { records })
}

/// Partial trace over the environment of a `(4, N)` state, re-exported for
/// callers that only hold a density matrix.
pub fn trace_out_environment(sigma: &DensityMatrix) -> Result<DensityMatrix> {
    partial_trace(sigma, 0)?.with_dims(vec![2, 2])
}
