//! Separability and zero-discord detectors for pure-dephasing states.
//!
//! Three independent verdicts are produced for a state evolved from
//! `|psi><psi| (x) R(0)`:
//!
//! * **separability**: `[R(0), w(t)] = 0` with `w(t) = w0^dag(t) w1(t)`,
//!   cross-checked against the equivalent form `w0 R w0^dag = w1 R w1^dag`;
//! * **zero discord with respect to the environment**: the six commutation
//!   conditions among `R_ij(t) = w_i(t) R(0) w_j^dag(t)`, evaluated literally;
//! * **zero discord with respect to the qubit**: pairwise commutation of
//!   the 2x2 diagonal blocks of the state written in the joint eigenbasis
//!   of `R(0)` and `w(t)`.
//!
//! Residuals are Frobenius norms divided by `max(1, ||R(0)||_F^2)`, so a
//! verdict is "zero" when the residual is at most the tolerance.

use nalgebra::linalg::Schur;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::discord::block_criterion;
use crate::error::{Error, Result};
use crate::linalg::{c, commutator, frobenius, CMatrix, Unitary};
use crate::model::{conditional_evolutions, DephasingModel, EnvironmentState, JointState, QubitPureState};

/// Default relative tolerance for every zero/non-zero verdict.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Weights `c_n'` at or below this are treated as absent.
pub const ACTIVE_WEIGHT_CUTOFF: f64 = 1e-12;
/// Relative eigenvalue gap below which eigenvalues of `R(0)` form one cluster.
pub const CLUSTER_GAP: f64 = 1e-9;
/// Reconstruction tolerance for the joint eigenbasis.
pub const DECOMPOSITION_TOL: f64 = 1e-9;

fn residual_scale(r: &CMatrix) -> f64 {
    frobenius(r).powi(2).max(1.0)
}

/// `w0^dag(t) w1(t)`.
pub fn dephasing_operator(model: &DephasingModel, t: f64) -> CMatrix {
    let (w0, w1) = conditional_evolutions(model, t);
    w0.matrix().adjoint() * w1.matrix()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityCheck {
    pub separable: bool,
    /// `||[R(0), w(t)]||_F`, relative.
    pub residual: f64,
    /// `||w0 R w0^dag - w1 R w1^dag||_F`, relative.
    pub conjugation_residual: f64,
    pub conjugation_separable: bool,
}

/// Separability of the evolved qubit–environment state at time `t`.
///
/// Only the environment data enters; a qubit that starts in a pointer
/// state never correlates and is handled by [`analyze`].
pub fn separability_check(
    env: &EnvironmentState,
    model: &DephasingModel,
    t: f64,
    tol: f64,
) -> SeparabilityCheck {
    let (w0, w1) = conditional_evolutions(model, t);
    let (w0, w1) = (w0.matrix(), w1.matrix());
    let r = env.matrix();
    let scale = residual_scale(r);
    let w = w0.adjoint() * w1;
    let residual = frobenius(&commutator(r, &w)) / scale;
    let r00 = w0 * r * w0.adjoint();
    let r11 = w1 * r * w1.adjoint();
    let conjugation_residual = frobenius(&(r00 - r11)) / scale;
    SeparabilityCheck {
        separable: residual <= tol,
        residual,
        conjugation_residual,
        conjugation_separable: conjugation_residual <= tol,
    }
}

/// `R_ij(t) = w_i(t) R(0) w_j^dag(t)` for `i, j` in `{0, 1}`.
#[derive(Debug, Clone)]
pub struct RijFamily {
    pub r00: CMatrix,
    pub r01: CMatrix,
    pub r10: CMatrix,
    pub r11: CMatrix,
}

pub fn build_rij(env: &EnvironmentState, model: &DephasingModel, t: f64) -> RijFamily {
    let (w0, w1) = conditional_evolutions(model, t);
    let (w0, w1) = (w0.matrix(), w1.matrix());
    let r = env.matrix();
    let r00 = w0 * r * w0.adjoint();
    let r11 = w1 * r * w1.adjoint();
    let r01 = w0 * r * w1.adjoint();
    let r10 = w1 * r * w0.adjoint();
    RijFamily { r00, r01, r10, r11 }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvDiscordCheck {
    pub zero_discord: bool,
    /// Largest of the six relative commutator norms.
    pub residual: f64,
    /// `[R00,R11], [R00,R01], [R00,R10], [R11,R01], [R11,R10], [R01,R10]`.
    pub conditions: [f64; 6],
    /// `||[R01, R01^dag]||_F`, relative; the normality of the off-diagonal block.
    pub normality: f64,
}

/// Zero discord with respect to the environment: all six commutators of the
/// `R_ij` family, plus normality of `R01`, must vanish.
pub fn env_discord_check(family: &RijFamily, tol: f64) -> EnvDiscordCheck {
    let scale = residual_scale(&family.r00);
    let rel = |a: &CMatrix, b: &CMatrix| frobenius(&commutator(a, b)) / scale;
    let conditions = [
        rel(&family.r00, &family.r11),
        rel(&family.r00, &family.r01),
        rel(&family.r00, &family.r10),
        rel(&family.r11, &family.r01),
        rel(&family.r11, &family.r10),
        rel(&family.r01, &family.r10),
    ];
    let normality = rel(&family.r01, &family.r01.adjoint());
    let residual = conditions.iter().copied().fold(normality, f64::max);
    EnvDiscordCheck {
        zero_discord: residual <= tol,
        residual,
        conditions,
        normality,
    }
}

/// Joint eigenbasis of `R(0)` and `w(t)` for a separable state:
/// `R(0) = sum_n c_n' |n'><n'|` and `w(t) = sum_n exp(-i phi_n) |n'><n'|`.
#[derive(Debug, Clone)]
pub struct EigenphaseDecomposition {
    /// Columns are the basis vectors `|n'(t)>`.
    pub basis: Unitary,
    pub weights: Vec<f64>,
    /// In `(-pi, pi]`.
    pub phases: Vec<f64>,
    pub weight_residual: f64,
    pub phase_residual: f64,
}

impl EigenphaseDecomposition {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Indices with `c_n' > ACTIVE_WEIGHT_CUTOFF`.
    pub fn active(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&n| self.weights[n] > ACTIVE_WEIGHT_CUTOFF)
            .collect()
    }

    /// `sum_n c_n' exp(i phi_n)`.
    pub fn weighted_phase_sum(&self) -> Complex64 {
        self.weights
            .iter()
            .zip(&self.phases)
            .map(|(&w, &p)| Complex64::from_polar(w, p))
            .sum()
    }
}

/// Maps an angle onto `(-pi, pi]`.
pub fn wrap_phase(phi: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut x = phi.rem_euclid(TAU);
    if x > PI {
        x -= TAU;
    }
    if x <= -PI {
        x += TAU;
    }
    x
}

/// Builds the joint eigenbasis by diagonalizing `R(0)` and then, within each
/// degenerate cluster of `R(0)`, the compression of `w(t)`.
pub fn simultaneous_eigenbasis(
    env: &EnvironmentState,
    model: &DephasingModel,
    t: f64,
) -> Result<EigenphaseDecomposition> {
    let check = separability_check(env, model, t, DEFAULT_TOLERANCE);
    if !check.separable {
        return Err(Error::NotSeparable(check.residual));
    }
    let r = env.matrix();
    let w = dephasing_operator(model, t);
    let n = env.dim();
    let spectrum = env.spectrum();
    let gap = CLUSTER_GAP * frobenius(r).max(1.0);

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for k in 0..n {
        match clusters.last_mut() {
            Some(cl) if spectrum.values[k] - spectrum.values[*cl.last().unwrap()] <= gap => cl.push(k),
            _ => clusters.push(vec![k]),
        }
    }

    let mut basis = CMatrix::zeros(n, n);
    let mut eigenphases = Vec::with_capacity(n);
    let mut col = 0;
    for cl in &clusters {
        let k = cl.len();
        let mut v = CMatrix::zeros(n, k);
        for (j, &idx) in cl.iter().enumerate() {
            v.set_column(j, &spectrum.vectors.column(idx));
        }
        let compressed = v.adjoint() * &w * &v;
        let (q, diag) = if k == 1 {
            (CMatrix::identity(1, 1), vec![compressed[(0, 0)]])
        } else {
            let (q, t_mat) = Schur::new(compressed).unpack();
            let d = (0..k).map(|i| t_mat[(i, i)]).collect();
            (q, d)
        };
        let rotated = &v * q;
        for (j, z) in diag.iter().enumerate() {
            basis.set_column(col, &rotated.column(j));
            eigenphases.push(wrap_phase(-z.arg()));
            col += 1;
        }
    }

    let weights: Vec<f64> = (0..n)
        .map(|j| {
            let v = basis.column(j);
            (v.adjoint() * r * v)[(0, 0)].re
        })
        .collect();

    let weight_recon = reconstruct(&basis, weights.iter().map(|&x| c(x, 0.0)));
    let phase_recon = reconstruct(
        &basis,
        eigenphases.iter().map(|&p| Complex64::from_polar(1.0, -p)),
    );
    let weight_residual = frobenius(&(weight_recon - r));
    let phase_residual = frobenius(&(phase_recon - &w));
    if weight_residual > DECOMPOSITION_TOL || phase_residual > DECOMPOSITION_TOL {
        return Err(Error::NotSeparable(weight_residual.max(phase_residual)));
    }
    Ok(EigenphaseDecomposition {
        basis: Unitary::new_unchecked(basis),
        weights,
        phases: eigenphases,
        weight_residual,
        phase_residual,
    })
}

fn reconstruct(basis: &CMatrix, diag: impl Iterator<Item = Complex64>) -> CMatrix {
    let mut scaled = basis.clone();
    for (j, d) in diag.enumerate() {
        for z in scaled.column_mut(j).iter_mut() {
            *z *= d;
        }
    }
    scaled * basis.adjoint()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitDiscordCheck {
    pub zero_discord: bool,
    /// Largest Frobenius norm over active pairs `(n, m)`.
    pub residual: f64,
}

/// 2x2 diagonal block `<n'| sigma~ |n'>` of the environment-rotated state
/// `w0^dag sigma w0`, where `w0^dag w1 |n'> = exp(-i phase) |n'>`.
pub fn qubit_block(psi: &QubitPureState, weight: f64, phase: f64) -> CMatrix {
    let (a, b) = (psi.alpha, psi.beta);
    let e = Complex64::from_polar(1.0, phase);
    CMatrix::from_row_slice(
        2,
        2,
        &[
            c(a.norm_sqr(), 0.0),
            a * b.conj() * e,
            a.conj() * b * e.conj(),
            c(b.norm_sqr(), 0.0),
        ],
    ) * c(weight, 0.0)
}

/// Zero discord with respect to the qubit: all diagonal 2x2 blocks of the
/// state in the joint eigenbasis must commute pairwise.
pub fn qubit_discord_check(
    psi: &QubitPureState,
    decomp: &EigenphaseDecomposition,
    tol: f64,
) -> QubitDiscordCheck {
    let active = decomp.active();
    let blocks: Vec<CMatrix> = active
        .iter()
        .map(|&n| qubit_block(psi, decomp.weights[n], decomp.phases[n]))
        .collect();
    let mut residual: f64 = 0.0;
    for i in 0..blocks.len() {
        for j in (i + 1)..blocks.len() {
            let r = frobenius(&commutator(&blocks[i], &blocks[j]));
            let scale = (frobenius(&blocks[i]) * frobenius(&blocks[j])).max(1.0);
            residual = residual.max(r / scale);
        }
    }
    QubitDiscordCheck {
        zero_discord: residual <= tol,
        residual,
    }
}

/// Residuals and verdicts of all detectors at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub t: f64,
    pub sep_residual: f64,
    pub separable: bool,
    pub sep_conjugation_residual: f64,
    pub sep_conjugation_separable: bool,
    pub env_discord_residual: f64,
    pub env_zero_discord: bool,
    pub qubit_discord_residual: f64,
    pub qubit_zero_discord: bool,
    pub tolerance_used: f64,
}

fn is_pointer_state(psi: &QubitPureState) -> bool {
    psi.alpha.norm_sqr() <= ACTIVE_WEIGHT_CUTOFF || psi.beta.norm_sqr() <= ACTIVE_WEIGHT_CUTOFF
}

/// Runs every detector at time `t`.
///
/// A pointer-state qubit (`alpha = 0` or `beta = 0`) never leaves the product
/// form, so all residuals are zero. An entangled state is discordant on both
/// sides; its qubit-side residual is taken from the block criterion on the
/// evolved state itself.
pub fn analyze(
    psi: &QubitPureState,
    env: &EnvironmentState,
    model: &DephasingModel,
    t: f64,
    tol: f64,
) -> Result<CorrelationReport> {
    if env.dim() != model.env_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.env_dim(),
            actual: env.dim(),
        });
    }
    if is_pointer_state(psi) {
        return Ok(CorrelationReport {
            t,
            sep_residual: 0.0,
            separable: true,
            sep_conjugation_residual: 0.0,
            sep_conjugation_separable: true,
            env_discord_residual: 0.0,
            env_zero_discord: true,
            qubit_discord_residual: 0.0,
            qubit_zero_discord: true,
            tolerance_used: tol,
        });
    }
    let sep = separability_check(env, model, t, tol);
    let env_check = env_discord_check(&build_rij(env, model, t), tol);
    let decomposition = if sep.separable {
        simultaneous_eigenbasis(env, model, t).ok()
    } else {
        None
    };
    let (qubit_discord_residual, qubit_zero_discord) = match decomposition {
        Some(d) => {
            let q = qubit_discord_check(psi, &d, tol);
            (q.residual, q.zero_discord)
        }
        None => {
            let sigma = crate::model::evolve_joint(psi, env, model, t)?;
            (qubit_side_block_residual(&sigma)?, false)
        }
    };
    Ok(CorrelationReport {
        t,
        sep_residual: sep.residual,
        separable: sep.separable,
        sep_conjugation_residual: sep.conjugation_residual,
        sep_conjugation_separable: sep.conjugation_separable,
        env_discord_residual: env_check.residual,
        env_zero_discord: env_check.zero_discord,
        qubit_discord_residual,
        qubit_zero_discord,
        tolerance_used: tol,
    })
}

fn qubit_side_block_residual(sigma: &JointState) -> Result<f64> {
    Ok(block_criterion(sigma.density(), 0, DEFAULT_TOLERANCE)?.residual)
}
