//! Time-ordered records and their CSV forms.

use std::fmt::Write as _;

use crate::correlation::CorrelationReport;

/// One sampled time. Fields not produced by a given run stay `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeRecord {
    pub t: f64,
    pub t_normalized: Option<f64>,
    pub coherence: Option<f64>,
    pub report: Option<CorrelationReport>,
    pub concurrence: Option<f64>,
    pub negativity: Option<f64>,
}

impl TimeRecord {
    pub fn at(t: f64) -> Self {
        Self {
            t,
            t_normalized: None,
            coherence: None,
            report: None,
            concurrence: None,
            negativity: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeSeries {
    pub records: Vec<TimeRecord>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

pub const SIMULATE_COLUMNS: [&str; 8] = [
    "t",
    "coherence",
    "sep_residual",
    "separable",
    "env_discord_residual",
    "env_zero_discord",
    "qubit_discord_residual",
    "qubit_zero_discord",
];

pub const FIG1_COLUMNS: [&str; 3] = ["c0", "t_normalized", "concurrence"];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Rows for a `simulate` run. Every record must carry a coherence and a report.
pub fn simulate_csv(series: &TimeSeries) -> String {
    let mut out = SIMULATE_COLUMNS.join(",");
    out.push('\n');
    for r in &series.records {
        let coherence = format_float(r.coherence.expect("simulate record has a coherence"));
        let rep = r.report.expect("simulate record has a report");
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            format_float(r.t),
            coherence,
            format_float(rep.sep_residual),
            rep.separable,
            format_float(rep.env_discord_residual),
            rep.env_zero_discord,
            format_float(rep.qubit_discord_residual),
            rep.qubit_zero_discord,
        )
        .expect("writing to a String");
    }
    out
}

/// Long-format rows, one block per `c0`.
pub fn fig1_csv(curves: &[(f64, TimeSeries)]) -> String {
    let mut out = FIG1_COLUMNS.join(",");
    out.push('\n');
    for (c0, series) in curves {
        for r in &series.records {
            let tn = format_float(r.t_normalized.expect("fig1 record has t_normalized"));
            let conc = format_float(r.concurrence.expect("fig1 record has a concurrence"));
            writeln!(out, "{},{},{}", format_float(*c0), tn, conc).expect("writing to a String");
        }
    }
    out
}
