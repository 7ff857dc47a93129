//! General bipartite zero-discord test and a brute-force discord oracle.
//!
//! [`block_criterion`] decides zero discord with respect to one subsystem by
//! partitioning the state into blocks over the other subsystem and requiring
//! all blocks to be normal and mutually commuting. [`discord_oracle`]
//! evaluates the mutual-information definition of discord directly,
//! minimizing over projective measurements on a qubit; it is an upper bound
//! on the true value and serves as an independent cross-check.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c, commutator, frobenius, hermitian_eig, partial_trace, CMatrix, DensityMatrix, Hermitian,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockCriterion {
    pub zero_discord: bool,
    /// Largest relative normality or commutator residual among the blocks.
    pub residual: f64,
}

fn bipartite_dims(rho: &DensityMatrix) -> Result<(usize, usize)> {
    match rho.dims() {
        [a, b] => Ok((*a, *b)),
        dims => Err(Error::InvalidSubsystems {
            dims: dims.to_vec(),
            dim: rho.dim(),
        }),
    }
}

/// Blocks `<k|rho|q>` over the unmeasured subsystem; each block acts on the
/// measured subsystem.
pub fn measured_blocks(rho: &DensityMatrix, measured: usize) -> Result<Vec<CMatrix>> {
    let (da, db) = bipartite_dims(rho)?;
    let m = rho.matrix();
    let blocks = match measured {
        1 => {
            let mut out = Vec::with_capacity(da * da);
            for k in 0..da {
                for q in 0..da {
                    out.push(m.view((k * db, q * db), (db, db)).into_owned());
                }
            }
            out
        }
        0 => {
            let mut out = Vec::with_capacity(db * db);
            for k in 0..db {
                for q in 0..db {
                    out.push(CMatrix::from_fn(da, da, |i, j| m[(i * db + k, j * db + q)]));
                }
            }
            out
        }
        index => return Err(Error::InvalidSubsystem { index, count: 2 }),
    };
    Ok(blocks)
}

/// Zero discord with respect to subsystem `measured` of a bipartite state.
pub fn block_criterion(rho: &DensityMatrix, measured: usize, tol: f64) -> Result<BlockCriterion> {
    let blocks = measured_blocks(rho, measured)?;
    let norms: Vec<f64> = blocks.iter().map(frobenius).collect();
    let mut residual: f64 = 0.0;
    for (i, b) in blocks.iter().enumerate() {
        let r = frobenius(&commutator(b, &b.adjoint())) / norms[i].powi(2).max(1.0);
        residual = residual.max(r);
        for j in (i + 1)..blocks.len() {
            let r = frobenius(&commutator(b, &blocks[j])) / (norms[i] * norms[j]).max(1.0);
            residual = residual.max(r);
        }
    }
    Ok(BlockCriterion {
        zero_discord: residual <= tol,
        residual,
    })
}

/// Shannon entropy in bits of a spectrum, with `0 log 0 = 0`.
pub fn entropy_bits(spectrum: &[f64]) -> f64 {
    spectrum
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &CMatrix) -> f64 {
    if rho.nrows() == 2 {
        return entropy_bits(&eig2(rho));
    }
    let h = Hermitian::new(rho.clone()).expect("density matrices are Hermitian");
    entropy_bits(&hermitian_eig(&h).values)
}

/// Eigenvalues of a 2x2 Hermitian matrix.
fn eig2(m: &CMatrix) -> [f64; 2] {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    let mean = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [mean - r, mean + r]
}

/// Resolution of the Bloch-sphere search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleGrid {
    pub theta_points: usize,
    pub phi_points: usize,
    pub refine: bool,
}

impl Default for OracleGrid {
    fn default() -> Self {
        Self {
            theta_points: 60,
            phi_points: 120,
            refine: true,
        }
    }
}

/// Post-measurement ensemble evaluator for a fixed state.
struct MeasurementProblem {
    /// `<i|rho|j>` over the measured qubit, acting on the other subsystem.
    blocks: [[CMatrix; 2]; 2],
}

impl MeasurementProblem {
    /// `sum_k p_k S(rho_k)` after measuring along the Bloch direction `(theta, phi)`.
    fn conditional_entropy(&self, theta: f64, phi: f64) -> f64 {
        let (st, ct) = theta.sin_cos();
        let n = [st * phi.cos(), st * phi.sin(), ct];
        let mut total = 0.0;
        for sign in [1.0, -1.0] {
            // projector (1 + s n.sigma)/2, entries P_ij
            let p00 = c(0.5 * (1.0 + sign * n[2]), 0.0);
            let p11 = c(0.5 * (1.0 - sign * n[2]), 0.0);
            let p01 = c(0.5 * sign * n[0], -0.5 * sign * n[1]);
            let p10 = p01.conj();
            // Tr_M[(P (x) 1) rho] = sum_ij P_ji <i|rho|j>
            let cond = &self.blocks[0][0] * p00
                + &self.blocks[0][1] * p10
                + &self.blocks[1][0] * p01
                + &self.blocks[1][1] * p11;
            let prob = cond.trace().re;
            if prob <= 1e-15 {
                continue;
            }
            total += prob * von_neumann_entropy(&(cond / c(prob, 0.0)));
        }
        total
    }
}

fn golden_section(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Ollivier–Zurek discord (bits) with respect to the qubit `measured`:
/// `S(M) - S(MO) + min sum_k p_k S(rho_O|k)` over projective measurements
/// on the Bloch-sphere grid, followed by a golden-section refinement around
/// the best grid point.
pub fn discord_oracle(rho: &DensityMatrix, measured: usize, grid: OracleGrid) -> Result<f64> {
    let (da, db) = bipartite_dims(rho)?;
    if measured > 1 {
        return Err(Error::InvalidSubsystem {
            index: measured,
            count: 2,
        });
    }
    let dm = if measured == 0 { da } else { db };
    if dm != 2 {
        return Err(Error::MeasuredNotQubit(dm));
    }
    if rho.dim() > 16 {
        return Err(Error::OracleTooLarge(rho.dim()));
    }
    if grid.theta_points < 2 || grid.phi_points < 1 {
        return Err(Error::InvalidParameter {
            name: "grid".into(),
            reason: "need at least 2 polar and 1 azimuthal points".into(),
        });
    }
    let reduced_m = partial_trace(rho, measured)?;
    let s_m = von_neumann_entropy(reduced_m.matrix());
    let s_joint = entropy_bits(&rho.eigenvalues());

    // blocks over the measured qubit index
    let dother = rho.dim() / 2;
    let m = rho.matrix();
    let block = |i: usize, j: usize| -> CMatrix {
        CMatrix::from_fn(dother, dother, |k, l| {
            if measured == 0 {
                m[(i * dother + k, j * dother + l)]
            } else {
                m[(k * 2 + i, l * 2 + j)]
            }
        })
    };
    let problem = MeasurementProblem {
        blocks: [[block(0, 0), block(0, 1)], [block(1, 0), block(1, 1)]],
    };

    let dtheta = PI / (grid.theta_points - 1) as f64;
    let dphi = 2.0 * PI / grid.phi_points as f64;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..grid.theta_points {
        let theta = i as f64 * dtheta;
        for j in 0..grid.phi_points {
            let phi = j as f64 * dphi;
            let v = problem.conditional_entropy(theta, phi);
            if v < best.0 {
                best = (v, theta, phi);
            }
        }
    }
    if grid.refine {
        let (mut val, mut theta, mut phi) = best;
        let (mut wt, mut wp) = (dtheta, dphi);
        for _ in 0..4 {
            let (t, v) = golden_section(|x| problem.conditional_entropy(x, phi), theta - wt, theta + wt, 40);
            if v < val {
                val = v;
                theta = t;
            }
            let (p, v) = golden_section(|x| problem.conditional_entropy(theta, x), phi - wp, phi + wp, 40);
            if v < val {
                val = v;
                phi = p;
            }
            wt *= 0.5;
            wp *= 0.5;
        }
        best = (val, theta, phi);
    }
    Ok(s_m - s_joint + best.0)
}

/// Mutual information `S(A) + S(B) - S(AB)` in bits.
pub fn mutual_information(rho: &DensityMatrix) -> Result<f64> {
    bipartite_dims(rho)?;
    let a = von_neumann_entropy(partial_trace(rho, 0)?.matrix());
    let b = von_neumann_entropy(partial_trace(rho, 1)?.matrix());
    Ok(a + b - entropy_bits(&rho.eigenvalues()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag_real, tensor, ZERO};
    use crate::random::{ginibre_density, haar_unitary, seeded_rng};
    use nalgebra::DVector;

    fn bell() -> DensityMatrix {
        let s = 1.0 / 2f64.sqrt();
        let psi = DVector::from_vec(vec![c(s, 0.0), ZERO, ZERO, c(s, 0.0)]);
        DensityMatrix::pure(&psi, vec![2, 2]).unwrap()
    }

    fn classical_classical(p: &[f64; 4]) -> DensityMatrix {
        DensityMatrix::new(diag_real(p), vec![2, 2]).unwrap()
    }

    #[test]
    fn classical_state_has_zero_discord() {
        let rho = classical_classical(&[0.1, 0.2, 0.3, 0.4]);
        for side in [0, 1] {
            let d = discord_oracle(&rho, side, OracleGrid::default()).unwrap();
            assert!(d.abs() < 1e-6, "side {side}: {d}");
            assert!(block_criterion(&rho, side, 1e-9).unwrap().zero_discord);
        }
    }

    #[test]
    fn bell_state_has_one_bit() {
        let rho = bell();
        for side in [0, 1] {
            let d = discord_oracle(&rho, side, OracleGrid::default()).unwrap();
            assert!((d - 1.0).abs() < 2e-3, "{d}");
            assert!(!block_criterion(&rho, side, 1e-9).unwrap().zero_discord);
        }
        assert!((mutual_information(&rho).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rotated_classical_quantum_state_found_by_refinement() {
        // zero discord w.r.t. qubit B measured in a rotated basis
        let mut rng = seeded_rng(4);
        let u = haar_unitary(&mut rng, 2);
        let (b0, b1) = (u.matrix().column(0).into_owned(), u.matrix().column(1).into_owned());
        let a0 = ginibre_density(&mut rng, 2);
        let a1 = ginibre_density(&mut rng, 2);
        let m = tensor(a0.matrix(), &(&b0 * b0.adjoint())) * c(0.35, 0.0)
            + tensor(a1.matrix(), &(&b1 * b1.adjoint())) * c(0.65, 0.0);
        let rho = DensityMatrix::new(m, vec![2, 2]).unwrap();
        assert!(block_criterion(&rho, 1, 1e-9).unwrap().zero_discord);
        let d = discord_oracle(&rho, 1, OracleGrid::default()).unwrap();
        assert!(d.abs() < 1e-6, "{d}");
        // the A side generally is discordant
        assert!(!block_criterion(&rho, 0, 1e-9).unwrap().zero_discord);
    }

    #[test]
    fn oracle_bounds_on_random_states() {
        let mut rng = seeded_rng(17);
        for _ in 0..10 {
            let rho = ginibre_density(&mut rng, 4).with_dims(vec![2, 2]).unwrap();
            for side in [0, 1] {
                let d = discord_oracle(&rho, side, OracleGrid::default()).unwrap();
                assert!((-1e-9..=1.0 + 1e-9).contains(&d));
                assert!(d <= mutual_information(&rho).unwrap() + 1e-9);
            }
        }
    }

    #[test]
    fn qubit_qutrit_supported() {
        let mut rng = seeded_rng(18);
        let rho = ginibre_density(&mut rng, 6).with_dims(vec![3, 2]).unwrap();
        let d = discord_oracle(&rho, 1, OracleGrid::default()).unwrap();
        assert!((-1e-9..=1.0 + 1e-9).contains(&d));
        assert!(matches!(
            discord_oracle(&rho, 0, OracleGrid::default()),
            Err(Error::MeasuredNotQubit(3))
        ));
    }

    #[test]
    fn oracle_rejects_large_states() {
        let rho = DensityMatrix::maximally_mixed(18).with_dims(vec![9, 2]).unwrap();
        assert!(matches!(
            discord_oracle(&rho, 1, OracleGrid::default()),
            Err(Error::OracleTooLarge(18))
        ));
    }

    #[test]
    fn entropy_conventions() {
        assert_eq!(entropy_bits(&[1.0, 0.0]), 0.0);
        assert!((entropy_bits(&[0.5, 0.5]) - 1.0).abs() < 1e-15);
        let m = diag_real(&[0.25, 0.25, 0.25, 0.25]);
        assert!((von_neumann_entropy(&m) - 2.0).abs() < 1e-12);
    }
}
