use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dephasing::commands::{
    cmd_fig1, cmd_oracle_crosscheck, cmd_simulate, cmd_verify_equivalence, to_json,
    EquivalenceParams, FIG1_DEFAULT_SAMPLES,
};
use dephasing::config::{RunConfig, TOLERANCE_ENV};
use dephasing::correlation::DEFAULT_TOLERANCE;
use dephasing::Error;

/// Exact qubit pure-dephasing simulator with entanglement and discord detectors.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a configured model on a time grid and write one CSV row per time.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// CSV output; defaults to the config's `output`, else standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON summary output; defaults to standard error.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Compare separability with environment-side zero discord on random instances.
    VerifyEquivalence {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        env_dims: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 16)]
        times: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, env = TOLERANCE_ENV, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pair concurrence over one dephasing cycle, long format.
    Fig1 {
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.7,0.9")]
        c0: Vec<f64>,
        #[arg(long, default_value_t = FIG1_DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the brute-force discord oracle with the block criterion.
    OracleCrosscheck {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const EXIT_CONFIG: u8 = 1;
const EXIT_VIOLATION: u8 = 2;

fn emit(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Config {
            field: "--out".into(),
            reason: format!("{}: {e}", p.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::InvalidParameter { .. } | Error::Io(_) => EXIT_CONFIG,
        _ => EXIT_VIOLATION,
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    let violation = match cli.command {
        Command::Simulate {
            config,
            out,
            summary,
        } => {
            let run = RunConfig::from_path(&config)?.resolve()?;
            let output = cmd_simulate(&run)?;
            emit(out.as_deref().or(run.output.as_deref()), &output.csv)?;
            let json = to_json(&output.summary);
            match summary {
                Some(p) => emit(Some(&p), &json)?,
                None => eprint!("{json}"),
            }
            output.summary.violation()
        }
        Command::VerifyEquivalence {
            env_dims,
            trials,
            times,
            seed,
            tol,
            out,
        } => {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(Error::Config {
                    field: "--tol".into(),
                    reason: "must be positive and finite".into(),
                });
            }
            let report = cmd_verify_equivalence(&EquivalenceParams {
                env_dims,
                trials,
                times,
                seed,
                tol,
                ..EquivalenceParams::default()
            })?;
            emit(out.as_deref(), &to_json(&report))?;
            report.violation()
        }
        Command::Fig1 { c0, samples, out } => {
            let (_, csv) = cmd_fig1(&c0, samples).map_err(|e| match e {
                Error::InvalidParameter { name, reason } => Error::Config {
                    field: format!("--{name}"),
                    reason,
                },
                other => other,
            })?;
            emit(out.as_deref(), &csv)?;
            false
        }
        Command::OracleCrosscheck { trials, seed, out } => {
            let report = cmd_oracle_crosscheck(trials, seed)?;
            emit(out.as_deref(), &to_json(&report))?;
            report.violation()
        }
    };
    Ok(if violation { EXIT_VIOLATION } else { 0 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
