//! JSON run configuration for `simulate`.
//!
//! Operators are either explicit matrices (row-major nested arrays of
//! `[re, im]` pairs) or preset strings:
//!
//! | preset | meaning |
//! |---|---|
//! | `zero` | zero matrix |
//! | `identity` | identity (as an environment state: maximally mixed) |
//! | `pauli_z(g)`, `pauli_x(g)` | `g` times a Pauli matrix, `env_dim = 2` only |
//! | `diag(v1, ..., vN)` | real diagonal (as a state: normalized weights) |
//! | `random_hermitian(seed, scale)` | `scale (G + G^dag) / 2` for a seeded Ginibre `G` |
//! | `ginibre_density(seed)` | seeded Hilbert-Schmidt random state |
//! | `basis(k)` | pure state `|k><k|` |
//!
//! ```json
//! {
//!   "model": {
//!     "env_dim": 2,
//!     "h_env": "zero",
//!     "v0": "zero",
//!     "v1": "pauli_z(1.0)",
//!     "env_state": "diag(0.7, 0.3)"
//!   },
//!   "qubit": { "alpha": [1.0, 0.0], "beta": [1.0, 0.0] },
//!   "time_grid": { "t_max": 6.283185307179586, "steps": 100 }
//! }
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::correlation::DEFAULT_TOLERANCE;
use crate::error::{Error, Result};
use crate::linalg::{c, diag_real, identity, pauli_x, pauli_z, CMatrix, DensityMatrix, Hermitian};
use crate::model::{DephasingModel, EnvironmentState, QubitPureState};
use crate::random::{ginibre_density, random_hermitian, seeded_rng};

/// Environment variable that overrides [`DEFAULT_TOLERANCE`].
pub const TOLERANCE_ENV: &str = "DEPHASING_TOL";

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OperatorSpec {
    Preset(String),
    Matrix(Vec<Vec<[f64; 2]>>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub env_dim: usize,
    #[serde(default)]
    pub eps0: f64,
    #[serde(default)]
    pub eps1: f64,
    pub h_env: OperatorSpec,
    pub v0: OperatorSpec,
    pub v1: OperatorSpec,
    pub env_state: OperatorSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitSpec {
    /// `[magnitude, phase]`.
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
}

/// Uniform grid `t_k = t_max k / steps`, `k = 0..=steps`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_max: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn times(&self) -> Vec<f64> {
        if self.steps == 0 {
            return vec![0.0];
        }
        (0..=self.steps)
            .map(|k| self.t_max * k as f64 / self.steps as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub mode: Option<String>,
    pub model: ModelSpec,
    pub qubit: QubitSpec,
    pub time_grid: TimeGrid,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// A validated configuration with all presets expanded.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub model: DephasingModel,
    pub env: EnvironmentState,
    pub psi: QubitPureState,
    pub times: Vec<f64>,
    pub tolerance: f64,
    pub output: Option<PathBuf>,
}

fn config_error(field: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        reason: reason.into(),
    }
}

/// Tolerance from [`TOLERANCE_ENV`] if set, else [`DEFAULT_TOLERANCE`].
pub fn default_tolerance() -> Result<f64> {
    match std::env::var(TOLERANCE_ENV) {
        Ok(s) => parse_tolerance(TOLERANCE_ENV, &s),
        Err(_) => Ok(DEFAULT_TOLERANCE),
    }
}

fn parse_tolerance(field: &str, s: &str) -> Result<f64> {
    let tol: f64 = s
        .trim()
        .parse()
        .map_err(|_| config_error(field, format!("`{s}` is not a number")))?;
    check_tolerance(field, tol)
}

fn check_tolerance(field: &str, tol: f64) -> Result<f64> {
    if tol > 0.0 && tol.is_finite() {
        Ok(tol)
    } else {
        Err(config_error(field, "must be positive and finite"))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| config_error("<json>", e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error("--config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn resolve(&self) -> Result<ResolvedRun> {
        if let Some(mode) = &self.mode {
            if mode != "simulate" {
                return Err(config_error("mode", format!("unsupported mode `{mode}`")));
            }
        }
        let m = &self.model;
        if m.env_dim == 0 {
            return Err(config_error("model.env_dim", "must be at least 1"));
        }
        for (field, eps) in [("model.eps0", m.eps0), ("model.eps1", m.eps1)] {
            if !eps.is_finite() {
                return Err(config_error(field, "must be finite"));
            }
        }
        let n = m.env_dim;
        let h_env = hermitian_operator("model.h_env", &m.h_env, n)?;
        let v0 = hermitian_operator("model.v0", &m.v0, n)?;
        let v1 = hermitian_operator("model.v1", &m.v1, n)?;
        let env = environment_state("model.env_state", &m.env_state, n)?;
        let model = DephasingModel::new(m.eps0, m.eps1, h_env, v0, v1)?;

        let [am, ap] = self.qubit.alpha;
        let [bm, bp] = self.qubit.beta;
        if [am, ap, bm, bp].iter().any(|x| !x.is_finite()) || am < 0.0 || bm < 0.0 {
            return Err(config_error(
                "qubit",
                "magnitudes must be non-negative and all entries finite",
            ));
        }
        let psi = QubitPureState::from_polar((am, ap), (bm, bp))
            .map_err(|_| config_error("qubit", "alpha and beta are both zero"))?;

        let grid = self.time_grid;
        if !(grid.t_max >= 0.0 && grid.t_max.is_finite()) {
            return Err(config_error("time_grid.t_max", "must be non-negative and finite"));
        }
        let tolerance = match self.tolerance {
            Some(t) => check_tolerance("tolerance", t)?,
            None => default_tolerance()?,
        };
        Ok(ResolvedRun {
            model,
            env,
            psi,
            times: grid.times(),
            tolerance,
            output: self.output.clone(),
        })
    }
}

/// Splits `name(a, b)` into `("name", ["a", "b"])`; a bare `name` has no arguments.
fn split_preset(s: &str) -> Option<(&str, Vec<&str>)> {
    let s = s.trim();
    match s.find('(') {
        None => Some((s, Vec::new())),
        Some(open) => {
            let inner = s[open + 1..].strip_suffix(')')?;
            let args = if inner.trim().is_empty() {
                Vec::new()
            } else {
                inner.split(',').map(str::trim).collect()
            };
            Some((s[..open].trim(), args))
        }
    }
}

fn number(field: &str, arg: &str) -> Result<f64> {
    arg.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| config_error(field, format!("`{arg}` is not a finite number")))
}

fn seed(field: &str, arg: &str) -> Result<u64> {
    arg.parse::<u64>()
        .map_err(|_| config_error(field, format!("`{arg}` is not a non-negative integer seed")))
}

fn arity(field: &str, name: &str, args: &[&str], expected: usize) -> Result<()> {
    if args.len() == expected {
        Ok(())
    } else {
        Err(config_error(
            field,
            format!("`{name}` takes {expected} argument(s), got {}", args.len()),
        ))
    }
}

fn require_qubit_env(field: &str, name: &str, n: usize) -> Result<()> {
    if n == 2 {
        Ok(())
    } else {
        Err(config_error(field, format!("`{name}` needs env_dim 2, got {n}")))
    }
}

fn explicit_matrix(field: &str, rows: &[Vec<[f64; 2]>], n: usize) -> Result<CMatrix> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(config_error(
            field,
            format!("expected a {n}x{n} matrix (dimension mismatch with env_dim)"),
        ));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

fn hermitian_operator(field: &str, spec: &OperatorSpec, n: usize) -> Result<Hermitian> {
    let m = match spec {
        OperatorSpec::Matrix(rows) => explicit_matrix(field, rows, n)?,
        OperatorSpec::Preset(p) => {
            let (name, args) =
                split_preset(p).ok_or_else(|| config_error(field, format!("cannot parse `{p}`")))?;
            match name {
                "zero" => {
                    arity(field, name, &args, 0)?;
                    CMatrix::zeros(n, n)
                }
                "identity" => {
                    arity(field, name, &args, 0)?;
                    identity(n)
                }
                "pauli_z" | "pauli_x" => {
                    arity(field, name, &args, 1)?;
                    require_qubit_env(field, name, n)?;
                    let g = number(field, args[0])?;
                    let p = if name == "pauli_z" { pauli_z() } else { pauli_x() };
                    p * c(g, 0.0)
                }
                "diag" => {
                    let values = args
                        .iter()
                        .map(|a| number(field, a))
                        .collect::<Result<Vec<_>>>()?;
                    if values.len() != n {
                        return Err(config_error(
                            field,
                            format!("diag has {} entries, env_dim is {n}", values.len()),
                        ));
                    }
                    diag_real(&values)
                }
                "random_hermitian" => {
                    arity(field, name, &args, 2)?;
                    let s = seed(field, args[0])?;
                    let scale = number(field, args[1])?;
                    random_hermitian(&mut seeded_rng(s), n, scale).into_matrix()
                }
                other => {
                    return Err(config_error(field, format!("unknown operator preset `{other}`")))
                }
            }
        }
    };
    Hermitian::new(m).map_err(|e| config_error(field, e.to_string()))
}

fn environment_state(field: &str, spec: &OperatorSpec, n: usize) -> Result<EnvironmentState> {
    let rho = match spec {
        OperatorSpec::Matrix(rows) => {
            DensityMatrix::new(explicit_matrix(field, rows, n)?, vec![n])
                .map_err(|e| config_error(field, e.to_string()))?
        }
        OperatorSpec::Preset(p) => {
            let (name, args) =
                split_preset(p).ok_or_else(|| config_error(field, format!("cannot parse `{p}`")))?;
            match name {
                "identity" | "maximally_mixed" => {
                    arity(field, name, &args, 0)?;
                    DensityMatrix::maximally_mixed(n)
                }
                "diag" => {
                    let w = args
                        .iter()
                        .map(|a| number(field, a))
                        .collect::<Result<Vec<_>>>()?;
                    if w.len() != n {
                        return Err(config_error(
                            field,
                            format!("diag has {} entries, env_dim is {n}", w.len()),
                        ));
                    }
                    let total: f64 = w.iter().sum();
                    if w.iter().any(|&x| x < 0.0) || total <= 0.0 {
                        return Err(config_error(field, "weights must be non-negative, not all zero"));
                    }
                    let w: Vec<f64> = w.iter().map(|x| x / total).collect();
                    DensityMatrix::new(diag_real(&w), vec![n])
                        .map_err(|e| config_error(field, e.to_string()))?
                }
                "ginibre_density" => {
                    arity(field, name, &args, 1)?;
                    ginibre_density(&mut seeded_rng(seed(field, args[0])?), n)
                }
                "basis" => {
                    arity(field, name, &args, 1)?;
                    let k = seed(field, args[0])? as usize;
                    if k >= n {
                        return Err(config_error(field, format!("basis index {k} >= env_dim {n}")));
                    }
                    let mut w = vec![0.0; n];
                    w[k] = 1.0;
                    DensityMatrix::new(diag_real(&w), vec![n]).expect("projector")
                }
                other => {
                    return Err(config_error(field, format!("unknown state preset `{other}`")))
                }
            }
        }
    };
    EnvironmentState::new(rho).map_err(|e| config_error(field, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(model: &str) -> String {
        format!(
            r#"{{"model": {model}, "qubit": {{"alpha": [1, 0], "beta": [1, 0]}},
                "time_grid": {{"t_max": 1.0, "steps": 4}}}}"#
        )
    }

    fn field_of(e: Error) -> String {
        match e {
            Error::Config { field, .. } => field,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn presets_resolve() {
        let text = config(
            r#"{"env_dim": 2, "eps1": 0.5, "h_env": "random_hermitian(3, 0.5)", "v0": "zero",
                "v1": "pauli_z(1.5)", "env_state": "diag(7, 3)"}"#,
        );
        let run = RunConfig::from_json(&text).unwrap().resolve().unwrap();
        assert_eq!(run.times, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!((run.psi.alpha.re - 2f64.sqrt().recip()).abs() < 1e-15);
        assert!((run.env.matrix()[(0, 0)].re - 0.7).abs() < 1e-15);
        assert_eq!(run.model.v1().matrix()[(1, 1)].re, -1.5);
        assert_eq!(run.model.eps(), (0.0, 0.5));
    }

    #[test]
    fn explicit_matrices() {
        let text = config(
            r#"{"env_dim": 2, "h_env": [[[1,0],[0,-1]],[[0,1],[2,0]]], "v0": "zero",
                "v1": "zero", "env_state": [[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#,
        );
        let run = RunConfig::from_json(&text).unwrap().resolve().unwrap();
        assert_eq!(run.model.h_env().matrix()[(0, 1)], c(0.0, -1.0));
    }

    #[test]
    fn errors_name_the_field() {
        let bad_dim = config(
            r#"{"env_dim": 3, "h_env": "zero", "v0": "zero", "v1": "diag(1, 2)",
                "env_state": "identity"}"#,
        );
        let e = RunConfig::from_json(&bad_dim).unwrap().resolve().unwrap_err();
        assert_eq!(field_of(e), "model.v1");

        let non_hermitian = config(
            r#"{"env_dim": 2, "h_env": [[[0,0],[1,0]],[[0,0],[0,0]]], "v0": "zero",
                "v1": "zero", "env_state": "identity"}"#,
        );
        let e = RunConfig::from_json(&non_hermitian).unwrap().resolve().unwrap_err();
        assert_eq!(field_of(e), "model.h_env");

        let pauli_big = config(
            r#"{"env_dim": 3, "h_env": "zero", "v0": "pauli_x(1)", "v1": "zero",
                "env_state": "identity"}"#,
        );
        let e = RunConfig::from_json(&pauli_big).unwrap().resolve().unwrap_err();
        assert_eq!(field_of(e), "model.v0");

        let bad_state = config(
            r#"{"env_dim": 2, "h_env": "zero", "v0": "zero", "v1": "zero",
                "env_state": "diag(1, -1)"}"#,
        );
        let e = RunConfig::from_json(&bad_state).unwrap().resolve().unwrap_err();
        assert_eq!(field_of(e), "model.env_state");

        assert_eq!(field_of(RunConfig::from_json("{").unwrap_err()), "<json>");
        let unknown = config(
            r#"{"env_dim": 2, "h_env": "zero", "v0": "zero", "v1": "zero",
                "env_state": "identity", "extra": 1}"#,
        );
        assert_eq!(field_of(RunConfig::from_json(&unknown).unwrap_err()), "<json>");
    }

    #[test]
    fn preset_splitting() {
        assert_eq!(split_preset("zero"), Some(("zero", vec![])));
        assert_eq!(split_preset(" diag( 1, 2 ,3)"), Some(("diag", vec!["1", "2", "3"])));
        assert_eq!(split_preset("diag(1"), None);
    }

    #[test]
    fn single_point_grid() {
        let g = TimeGrid { t_max: 3.0, steps: 0 };
        assert_eq!(g.times(), vec![0.0]);
    }
}
