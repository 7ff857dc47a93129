use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_dephasing");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("DEPHASING_TOL")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("config.json");
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const VALID: &str = r#"{"model": {"env_dim": 2, "h_env": "zero", "v0": "zero", "v1": "pauli_z(1.0)",
    "env_state": "diag(0.7, 0.3)"}, "qubit": {"alpha": [1, 0], "beta": [1, 0]},
    "time_grid": {"t_max": 3.0, "steps": 6}}"#;

#[test]
fn simulate_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), VALID);
    let out = dir.path().join("run.csv");
    let o = run(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "t,coherence,sep_residual,separable,env_discord_residual,env_zero_discord,qubit_discord_residual,qubit_zero_discord"
    );
    assert_eq!(lines.len(), 8);
    let summary: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(summary["rows"], 7);
    assert!(summary["conservation"]["ok"].as_bool().unwrap());
    // Equal amplitudes, static basis: coherence |0.7 + 0.3 exp(2it)| / 2 dips to 0.2 at t = pi/2.
    assert!(summary["coherence_min"].as_f64().unwrap() < 0.25);
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"model": {"env_dim": 3, "h_env": "random_hermitian(1, 1.0)", "v0": "random_hermitian(2, 1.0)",
            "v1": "random_hermitian(3, 1.0)", "env_state": "ginibre_density(4)"},
            "qubit": {"alpha": [0.6, 0], "beta": [0.8, 1]}, "time_grid": {"t_max": 5.0, "steps": 40}}"#,
    );
    let a = run(&["simulate", "--config", &cfg]);
    let b = run(&["simulate", "--config", &cfg]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
}

#[test]
fn malformed_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "{ not json");
    let o = run(&["simulate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}

#[test]
fn dimension_mismatch_names_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"model": {"env_dim": 3, "h_env": "zero", "v0": "zero", "v1": "diag(1, 2)",
            "env_state": "identity"}, "qubit": {"alpha": [1, 0], "beta": [1, 0]},
            "time_grid": {"t_max": 1.0, "steps": 2}}"#,
    );
    let o = run(&["simulate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("model.v1"));
}

#[test]
fn missing_config_file_exits_one() {
    let o = run(&["simulate", "--config", "/nonexistent/config.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_arguments_exit_one() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["fig1", "--samples", "many"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn fig1_rejects_out_of_range_c0() {
    let o = run(&["fig1", "--c0", "0.5,1.2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("c0"));
}

#[test]
fn fig1_three_samples_per_curve() {
    let o = run(&["fig1", "--c0", "0.7", "--samples", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows.iter().map(|r| r[1]).collect::<Vec<_>>(), vec![0.0, 0.5, 1.0]);
    assert!((rows[1][2] - 0.4).abs() < 1e-12);
}

#[test]
fn equivalence_report_is_deterministic() {
    let args = ["verify-equivalence", "--trials", "12", "--times", "3", "--seed", "99"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(r["samples"], 36);
    assert_eq!(r["disagreements"], 0);
}

#[test]
fn tolerance_environment_override() {
    let o = Command::new(BIN)
        .args(["verify-equivalence", "--trials", "3", "--times", "1"])
        .env("DEPHASING_TOL", "1e-7")
        .output()
        .unwrap();
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["tolerance"].as_f64().unwrap(), 1e-7);
    let explicit = Command::new(BIN)
        .args(["verify-equivalence", "--trials", "3", "--times", "1", "--tol", "1e-8"])
        .env("DEPHASING_TOL", "1e-7")
        .output()
        .unwrap();
    let r: serde_json::Value = serde_json::from_slice(&explicit.stdout).unwrap();
    assert_eq!(r["tolerance"].as_f64().unwrap(), 1e-8);
}

#[test]
fn oracle_crosscheck_small() {
    let o = run(&["oracle-crosscheck", "--trials", "5", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["agreement_rate"].as_f64().unwrap(), 1.0);
    assert_eq!(r["disagreements"].as_array().unwrap().len(), 0);
}
