//! The four CLI campaigns as library functions returning data and reports.

use rayon::prelude::*;
use serde::Serialize;

use crate::config::ResolvedRun;
use crate::correlation::{analyze, CorrelationReport};
use crate::discord::{block_criterion, discord_oracle, OracleGrid};
use crate::error::Result;
use crate::linalg::{
    c, diag_real, hermitian_eig, tensor, CMatrix, DensityMatrix, Hermitian,
};
use crate::model::{
    evolve_joint, qubit_coherence, qubit_populations, DephasingModel, EnvironmentState,
    QubitPureState,
};
use crate::random::{
    density_in_basis, ginibre_density, haar_unitary, hermitian_in_basis, random_hermitian,
    random_pure_density, random_weights, seeded_rng, SimRng,
};
use crate::series::{fig1_csv, simulate_csv, TimeRecord, TimeSeries};
use crate::two_qubit::{bell_state, fig1_curve};

pub const POPULATION_TOL: f64 = 1e-12;
pub const SPECTRUM_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-12;

/// Residuals strictly between these bounds are too close to call.
pub const GREY_ZONE: (f64, f64) = (1e-12, 1e-6);

/// Independent stream for item `index` of a campaign seeded with `seed`.
fn stream(seed: u64, index: u64) -> SimRng {
    seeded_rng(seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

#[derive(Debug, Clone, Serialize)]
pub struct Transitions {
    pub separable: Vec<f64>,
    pub env_zero_discord: Vec<f64>,
    pub qubit_zero_discord: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Conservation {
    pub max_population_drift: f64,
    pub max_spectrum_drift: f64,
    pub max_trace_error: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateSummary {
    pub rows: usize,
    pub tolerance: f64,
    pub coherence_min: f64,
    pub coherence_max: f64,
    /// Times at which a verdict differs from the previous row.
    pub transitions: Transitions,
    pub conservation: Conservation,
    /// Rows where separability and environment-side zero discord disagree.
    pub equivalence_disagreements: usize,
}

impl SimulateSummary {
    pub fn violation(&self) -> bool {
        !self.conservation.ok || self.equivalence_disagreements > 0
    }
}

pub struct SimulateOutput {
    pub series: TimeSeries,
    pub csv: String,
    pub summary: SimulateSummary,
}

struct Row {
    record: TimeRecord,
    population_drift: f64,
    spectrum_drift: f64,
    trace_error: f64,
}

fn sorted_spectrum(m: &CMatrix) -> Vec<f64> {
    hermitian_eig(&Hermitian::new(m.clone()).expect("evolved state is Hermitian")).values
}

/// Evolves and analyzes the configured model on its time grid.
pub fn cmd_simulate(run: &ResolvedRun) -> Result<SimulateOutput> {
    let initial = run.psi.density().tensor(run.env.density());
    let initial_spectrum = sorted_spectrum(initial.matrix());
    let p0 = (run.psi.alpha.norm_sqr(), run.psi.beta.norm_sqr());

    let rows = run
        .times
        .par_iter()
        .map(|&t| -> Result<Row> {
            let sigma = evolve_joint(&run.psi, &run.env, &run.model, t)?;
            let coherence = qubit_coherence(&sigma)?;
            let report = analyze(&run.psi, &run.env, &run.model, t, run.tolerance)?;
            let (q0, q1) = qubit_populations(&sigma);
            let spectrum = sorted_spectrum(sigma.matrix());
            let spectrum_drift = spectrum
                .iter()
                .zip(&initial_spectrum)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            Ok(Row {
                record: TimeRecord {
                    coherence: Some(coherence),
                    report: Some(report),
                    ..TimeRecord::at(t)
                },
                population_drift: (q0 - p0.0).abs().max((q1 - p0.1).abs()),
                spectrum_drift,
                trace_error: (sigma.density().trace() - 1.0).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let max_of = |f: fn(&Row) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let (population, spectrum, trace) = (
        max_of(|r| r.population_drift),
        max_of(|r| r.spectrum_drift),
        max_of(|r| r.trace_error),
    );
    let conservation = Conservation {
        max_population_drift: population,
        max_spectrum_drift: spectrum,
        max_trace_error: trace,
        ok: population <= POPULATION_TOL && spectrum <= SPECTRUM_TOL && trace <= TRACE_TOL,
    };

    let series = TimeSeries {
        records: rows.into_iter().map(|r| r.record).collect(),
    };
    let reports: Vec<CorrelationReport> = series.records.iter().map(|r| r.report.unwrap()).collect();
    let transitions_of = |f: fn(&CorrelationReport) -> bool| -> Vec<f64> {
        reports
            .windows(2)
            .filter(|w| f(&w[0]) != f(&w[1]))
            .map(|w| w[1].t)
            .collect()
    };
    let coherences = series.records.iter().map(|r| r.coherence.unwrap());
    let summary = SimulateSummary {
        rows: series.len(),
        tolerance: run.tolerance,
        coherence_min: coherences.clone().fold(f64::INFINITY, f64::min),
        coherence_max: coherences.fold(f64::NEG_INFINITY, f64::max),
        transitions: Transitions {
            separable: transitions_of(|r| r.separable),
            env_zero_discord: transitions_of(|r| r.env_zero_discord),
            qubit_zero_discord: transitions_of(|r| r.qubit_zero_discord),
        },
        conservation,
        equivalence_disagreements: reports
            .iter()
            .filter(|r| r.separable != r.env_zero_discord)
            .count(),
    };
    Ok(SimulateOutput {
        csv: simulate_csv(&series),
        series,
        summary,
    })
}

/// Instance families used by the equivalence campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    /// Random `H_E`, `V0`, `V1`, `R(0)`; generically non-commuting.
    RandomNonCommuting,
    /// Everything diagonal in one random basis; separable at all times.
    DiagonalCommuting,
    /// Random Hamiltonians with a pure environment state.
    PureEnvironment,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 3] = [
        InstanceKind::RandomNonCommuting,
        InstanceKind::DiagonalCommuting,
        InstanceKind::PureEnvironment,
    ];
}

/// Draws one instance of the given family.
pub fn random_instance(
    rng: &mut SimRng,
    kind: InstanceKind,
    n: usize,
) -> (DephasingModel, EnvironmentState) {
    use rand::Rng;
    let eps0 = rng.random_range(-1.0..1.0);
    let eps1 = rng.random_range(-1.0..1.0);
    let (h, v0, v1, rho) = match kind {
        InstanceKind::RandomNonCommuting => (
            random_hermitian(rng, n, 1.0),
            random_hermitian(rng, n, 1.0),
            random_hermitian(rng, n, 1.0),
            ginibre_density(rng, n),
        ),
        InstanceKind::DiagonalCommuting => {
            let q = haar_unitary(rng, n);
            let spectrum = |rng: &mut SimRng| -> Vec<f64> {
                (0..n).map(|_| rng.random_range(-2.0..2.0)).collect()
            };
            let h = hermitian_in_basis(&q, &spectrum(rng));
            let v0 = hermitian_in_basis(&q, &spectrum(rng));
            let v1 = hermitian_in_basis(&q, &spectrum(rng));
            let w = random_weights(rng, n);
            (h, v0, v1, density_in_basis(&q, &w))
        }
        InstanceKind::PureEnvironment => (
            random_hermitian(rng, n, 1.0),
            random_hermitian(rng, n, 1.0),
            random_hermitian(rng, n, 1.0),
            random_pure_density(rng, n),
        ),
    };
    (
        DephasingModel::new(eps0, eps1, h, v0, v1).expect("matching dimensions"),
        EnvironmentState::new(rho).expect("valid state"),
    )
}

#[derive(Debug, Clone)]
pub struct EquivalenceParams {
    pub env_dims: Vec<usize>,
    pub trials: usize,
    pub times: usize,
    pub seed: u64,
    pub tol: f64,
    /// Sampled times are uniform on this interval.
    pub t_range: (f64, f64),
}

impl Default for EquivalenceParams {
    fn default() -> Self {
        Self {
            env_dims: vec![2, 3, 4],
            trials: 100,
            times: 16,
            seed: 2024,
            tol: crate::correlation::DEFAULT_TOLERANCE,
            t_range: (0.05, 6.0),
        }
    }
}

pub const TOLERANCE_SWEEP: [f64; 3] = [1e-6, 1e-9, 1e-12];

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceSample {
    pub trial: usize,
    pub kind: InstanceKind,
    pub env_dim: usize,
    pub t: f64,
    pub sep_residual: f64,
    pub sep_conjugation_residual: f64,
    pub env_discord_residual: f64,
    pub separable: bool,
    pub sep_conjugation_separable: bool,
    pub env_zero_discord: bool,
}

impl EquivalenceSample {
    fn grey(&self) -> bool {
        [self.sep_residual, self.sep_conjugation_residual, self.env_discord_residual]
            .iter()
            .any(|&r| r > GREY_ZONE.0 && r < GREY_ZONE.1)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KindCounts {
    pub kind: InstanceKind,
    pub samples: usize,
    pub separable: usize,
    pub entangled: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub tolerance: f64,
    pub separable: usize,
    pub env_zero_discord: usize,
    /// Well-separated samples whose verdicts differ from those at the campaign tolerance.
    pub changed_verdicts: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub seed: u64,
    pub tolerance: f64,
    pub env_dims: Vec<usize>,
    pub trials: usize,
    pub times_per_trial: usize,
    pub samples: usize,
    pub by_kind: Vec<KindCounts>,
    pub separable: usize,
    pub entangled: usize,
    /// Separable by commutator but not zero-discord on the environment side, or vice versa.
    pub disagreements: usize,
    /// The commutator and conjugation forms of separability disagree.
    pub form_disagreements: usize,
    /// Zero environment-side discord without separability.
    pub subset_violations: usize,
    /// Samples with some residual in the grey zone; excluded from the sweep.
    pub grey_zone: usize,
    /// Largest residual among samples judged separable / zero-discord.
    pub max_zero_residual: f64,
    /// Smallest residual among samples judged entangled / discordant.
    pub min_nonzero_residual: f64,
    pub tolerance_sweep: Vec<SweepResult>,
    pub violations: Vec<EquivalenceSample>,
}

impl EquivalenceReport {
    pub fn violation(&self) -> bool {
        self.disagreements + self.form_disagreements + self.subset_violations > 0
    }
}

fn equivalence_trial(params: &EquivalenceParams, trial: usize) -> Result<Vec<EquivalenceSample>> {
    use rand::Rng;
    let n = params.env_dims[trial % params.env_dims.len()];
    let kind = InstanceKind::ALL[(trial / params.env_dims.len()) % 3];
    let mut rng = stream(params.seed, trial as u64);
    let (model, env) = random_instance(&mut rng, kind, n);
    let psi = QubitPureState::equal_superposition();
    (0..params.times)
        .map(|_| {
            let t = rng.random_range(params.t_range.0..params.t_range.1);
            let r = analyze(&psi, &env, &model, t, params.tol)?;
            Ok(EquivalenceSample {
                trial,
                kind,
                env_dim: n,
                t,
                sep_residual: r.sep_residual,
                sep_conjugation_residual: r.sep_conjugation_residual,
                env_discord_residual: r.env_discord_residual,
                separable: r.separable,
                sep_conjugation_separable: r.sep_conjugation_separable,
                env_zero_discord: r.env_zero_discord,
            })
        })
        .collect()
}

/// Checks separability against environment-side zero discord over random
/// instances and times.
pub fn cmd_verify_equivalence(params: &EquivalenceParams) -> Result<EquivalenceReport> {
    if params.trials == 0 || params.times == 0 || params.env_dims.is_empty() {
        return Err(crate::Error::Config {
            field: "trials/times/env_dims".into(),
            reason: "must be non-empty".into(),
        });
    }
    if let Some(&n) = params.env_dims.iter().find(|&&n| n == 0) {
        return Err(crate::Error::Config {
            field: "env_dims".into(),
            reason: format!("dimension {n} is not allowed"),
        });
    }
    let per_trial = (0..params.trials)
        .into_par_iter()
        .map(|trial| equivalence_trial(params, trial))
        .collect::<Result<Vec<_>>>()?;
    let samples: Vec<EquivalenceSample> = per_trial.into_iter().flatten().collect();

    let by_kind = InstanceKind::ALL
        .iter()
        .map(|&kind| {
            let of_kind: Vec<_> = samples.iter().filter(|s| s.kind == kind).collect();
            KindCounts {
                kind,
                samples: of_kind.len(),
                separable: of_kind.iter().filter(|s| s.separable).count(),
                entangled: of_kind.iter().filter(|s| !s.separable).count(),
            }
        })
        .collect();

    let mut max_zero_residual: f64 = 0.0;
    let mut min_nonzero_residual = f64::INFINITY;
    for s in &samples {
        for (residual, verdict) in [
            (s.sep_residual, s.separable),
            (s.sep_conjugation_residual, s.sep_conjugation_separable),
            (s.env_discord_residual, s.env_zero_discord),
        ] {
            if verdict {
                max_zero_residual = max_zero_residual.max(residual);
            } else {
                min_nonzero_residual = min_nonzero_residual.min(residual);
            }
        }
    }

    let well_separated: Vec<_> = samples.iter().filter(|s| !s.grey()).collect();
    let tolerance_sweep = TOLERANCE_SWEEP
        .iter()
        .map(|&tol| SweepResult {
            tolerance: tol,
            separable: well_separated.iter().filter(|s| s.sep_residual <= tol).count(),
            env_zero_discord: well_separated
                .iter()
                .filter(|s| s.env_discord_residual <= tol)
                .count(),
            changed_verdicts: well_separated
                .iter()
                .filter(|s| {
                    (s.sep_residual <= tol) != s.separable
                        || (s.env_discord_residual <= tol) != s.env_zero_discord
                })
                .count(),
        })
        .collect();

    let disagreement = |s: &&EquivalenceSample| s.separable != s.env_zero_discord;
    let form = |s: &&EquivalenceSample| s.separable != s.sep_conjugation_separable;
    let subset = |s: &&EquivalenceSample| s.env_zero_discord && !s.separable;
    Ok(EquivalenceReport {
        seed: params.seed,
        tolerance: params.tol,
        env_dims: params.env_dims.clone(),
        trials: params.trials,
        times_per_trial: params.times,
        samples: samples.len(),
        by_kind,
        separable: samples.iter().filter(|s| s.separable).count(),
        entangled: samples.iter().filter(|s| !s.separable).count(),
        disagreements: samples.iter().filter(disagreement).count(),
        form_disagreements: samples.iter().filter(form).count(),
        subset_violations: samples.iter().filter(subset).count(),
        grey_zone: samples.len() - well_separated.len(),
        max_zero_residual,
        min_nonzero_residual,
        tolerance_sweep,
        violations: samples
            .iter()
            .filter(|s| disagreement(s) || form(s) || subset(s))
            .cloned()
            .collect(),
    })
}

pub const FIG1_DEFAULT_C0: [f64; 3] = [0.5, 0.7, 0.9];
pub const FIG1_DEFAULT_SAMPLES: usize = 201;

/// Long-format concurrence CSV, one full cycle per `c0`, with unit phase gap.
pub fn cmd_fig1(c0s: &[f64], samples: usize) -> Result<(Vec<(f64, TimeSeries)>, String)> {
    let curves = c0s
        .par_iter()
        .map(|&c0| fig1_curve(c0, 1.0, samples).map(|s| (c0, s)))
        .collect::<Result<Vec<_>>>()?;
    let csv = fig1_csv(&curves);
    Ok((curves, csv))
}

/// Zero-discord threshold for the oracle.
pub const ORACLE_ZERO: f64 = 5e-3;
pub const CLASSICAL_INJECTED: usize = 20;
pub const BELL_INJECTED: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StateClass {
    Ginibre,
    ClassicalClassical,
    BellDerived,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleComparison {
    pub class: StateClass,
    pub index: usize,
    pub measured: usize,
    pub oracle: f64,
    pub criterion_residual: f64,
    pub criterion_zero: bool,
    pub oracle_zero: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleDisagreement {
    pub comparison: OracleComparison,
    /// Row-major `[re, im]` entries of the 4x4 state.
    pub state: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub seed: u64,
    pub threshold: f64,
    pub random_states: usize,
    pub classical_states: usize,
    pub bell_states: usize,
    pub comparisons: usize,
    pub agreements: usize,
    pub agreement_rate: f64,
    /// Oracle value on `(|00> + |11>)/sqrt(2)`, measuring qubit 0.
    pub bell_oracle: f64,
    pub max_oracle_classical: f64,
    pub min_oracle_random: f64,
    pub min_oracle_bell_derived: f64,
    pub disagreements: Vec<OracleDisagreement>,
}

impl OracleReport {
    pub fn violation(&self) -> bool {
        !self.disagreements.is_empty()
    }
}

fn local_pair(rng: &mut SimRng) -> CMatrix {
    tensor(haar_unitary(rng, 2).matrix(), haar_unitary(rng, 2).matrix())
}

fn conjugate(u: &CMatrix, rho: &CMatrix) -> DensityMatrix {
    let m = u * rho * u.adjoint();
    DensityMatrix::from_trusted((&m + m.adjoint()) * c(0.5, 0.0), vec![2, 2])
}

/// `sum_ij p_ij |a_i><a_i| (x) |b_j><b_j|` in random local bases.
pub fn classical_classical_state(rng: &mut SimRng) -> DensityMatrix {
    let p = random_weights(rng, 4);
    conjugate(&local_pair(rng), &diag_real(&p))
}

/// Locally rotated mixture `p |Phi+><Phi+| + (1 - p) I/4`. Index 0 is the
/// unrotated Bell state, indices below `BELL_INJECTED / 2` are pure.
pub fn bell_derived_state(rng: &mut SimRng, index: usize) -> DensityMatrix {
    use rand::Rng;
    let bell = bell_state().into_matrix();
    if index == 0 {
        return DensityMatrix::from_trusted(bell, vec![2, 2]);
    }
    let p = if index < BELL_INJECTED / 2 {
        1.0
    } else {
        rng.random_range(0.5..1.0)
    };
    let mixed = bell * c(p, 0.0) + crate::linalg::identity(4) * c((1.0 - p) / 4.0, 0.0);
    conjugate(&local_pair(rng), &mixed)
}

fn dump(rho: &DensityMatrix) -> Vec<Vec<[f64; 2]>> {
    let m = rho.matrix();
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// Compares the discord oracle with the block criterion on random and
/// constructed two-qubit states, measuring each qubit in turn.
pub fn cmd_oracle_crosscheck(trials: usize, seed: u64) -> Result<OracleReport> {
    if trials == 0 {
        return Err(crate::Error::Config {
            field: "trials".into(),
            reason: "must be at least 1".into(),
        });
    }
    let mut jobs: Vec<(StateClass, usize)> = (0..trials).map(|i| (StateClass::Ginibre, i)).collect();
    jobs.extend((0..CLASSICAL_INJECTED).map(|i| (StateClass::ClassicalClassical, i)));
    jobs.extend((0..BELL_INJECTED).map(|i| (StateClass::BellDerived, i)));

    let results = jobs
        .par_iter()
        .enumerate()
        .map(|(k, &(class, index))| -> Result<Vec<(OracleComparison, DensityMatrix)>> {
            let mut rng = stream(seed, k as u64);
            let rho = match class {
                StateClass::Ginibre => ginibre_density(&mut rng, 4).with_dims(vec![2, 2])?,
                StateClass::ClassicalClassical => classical_classical_state(&mut rng),
                StateClass::BellDerived => bell_derived_state(&mut rng, index),
            };
            (0..2)
                .map(|measured| {
                    let oracle = discord_oracle(&rho, measured, OracleGrid::default())?;
                    let crit = block_criterion(&rho, measured, crate::correlation::DEFAULT_TOLERANCE)?;
                    Ok((
                        OracleComparison {
                            class,
                            index,
                            measured,
                            oracle,
                            criterion_residual: crit.residual,
                            criterion_zero: crit.zero_discord,
                            oracle_zero: oracle <= ORACLE_ZERO,
                        },
                        rho.clone(),
                    ))
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    let results: Vec<_> = results.into_iter().flatten().collect();

    let oracle_of = |class: StateClass| results.iter().filter(move |(c, _)| c.class == class).map(|(c, _)| c.oracle);
    let agreements = results
        .iter()
        .filter(|(c, _)| c.oracle_zero == c.criterion_zero)
        .count();
    let bell_oracle = results
        .iter()
        .find(|(c, _)| c.class == StateClass::BellDerived && c.index == 0 && c.measured == 0)
        .map(|(c, _)| c.oracle)
        .expect("Bell state is always injected");
    Ok(OracleReport {
        seed,
        threshold: ORACLE_ZERO,
        random_states: trials,
        classical_states: CLASSICAL_INJECTED,
        bell_states: BELL_INJECTED,
        comparisons: results.len(),
        agreements,
        agreement_rate: agreements as f64 / results.len() as f64,
        bell_oracle,
        max_oracle_classical: oracle_of(StateClass::ClassicalClassical).fold(0.0, f64::max),
        min_oracle_random: oracle_of(StateClass::Ginibre).fold(f64::INFINITY, f64::min),
        min_oracle_bell_derived: oracle_of(StateClass::BellDerived).fold(f64::INFINITY, f64::min),
        disagreements: results
            .iter()
            .filter(|(c, _)| c.oracle_zero != c.criterion_zero)
            .map(|(c, rho)| OracleDisagreement {
                comparison: c.clone(),
                state: dump(rho),
            })
            .collect(),
    })
}

/// Serializes a report as pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}
