//! End-to-end checks of the `csaga` binary: flows, exit codes, and
//! byte-level determinism of the emitted CSVs.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_csaga"))
}

fn write_toy(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("toy.libsvm");
    std::fs::write(
        &path,
        "+1 1:1 3:0.5\n-1 2:1\n+1 1:0.25 2:0.5\n-1 3:1\n+1 2:0.75\n-1 1:0.5 3:0.25\n",
    )
    .unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Trace rows with the wall-clock column blanked; comments untouched.
fn mask_wall(csv: &str) -> String {
    csv.lines()
        .map(|line| {
            if line.starts_with('#') || line.starts_with("epoch,") {
                line.to_string()
            } else {
                line.rsplit_once(',')
                    .map(|(head, _)| head.to_string())
                    .unwrap_or_default()
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn run_emits_trace_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_toy(dir.path());
    let cache = dir.path().join("cache");
    let invoke = || {
        bin()
            .args(["run", "--data"])
            .arg(&data)
            .args([
                "--gamma",
                "0.5",
                "--epochs",
                "6",
                "--method",
                "csaga",
                "--cache-dir",
            ])
            .arg(&cache)
            .output()
            .unwrap()
    };
    let first = invoke();
    assert!(first.status.success(), "{}", stderr(&first));
    let text = stdout(&first);
    assert!(text.starts_with("epoch,grad_evals,gamma,suboptimality,lyapunov,wall_seconds"));
    assert_eq!(text.lines().count(), 8, "header + 7 epochs:\n{text}");

    let second = invoke();
    assert_eq!(mask_wall(&text), mask_wall(&stdout(&second)));
    assert!(stderr(&second).contains("cache hit"));
}

#[test]
fn run_writes_out_file_with_diagnostics_column() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_toy(dir.path());
    let out_path = dir.path().join("trace.csv");
    let out = bin()
        .args(["run", "--data"])
        .arg(&data)
        .args(["--gamma", "0.4", "--epochs", "3", "--diagnostics", "--out"])
        .arg(&out_path)
        .args(["--cache-dir"])
        .arg(dir.path().join("cache"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&out_path).unwrap();
    for line in text.lines().skip(1) {
        let lyap = line.split(',').nth(4).unwrap();
        assert!(!lyap.is_empty(), "lyapunov column filled: {line}");
        assert!(lyap.parse::<f64>().unwrap() > 0.0);
    }
}

#[test]
fn divergent_run_exits_zero_with_marker() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_toy(dir.path());
    let out = bin()
        .args(["run", "--data"])
        .arg(&data)
        .args(["--gamma", "1e8", "--epochs", "10", "--cache-dir"])
        .arg(dir.path().join("cache"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(
        text.lines().any(|l| l.starts_with("# diverged_at_step=")),
        "{text}"
    );
    assert!(stderr(&out).contains("diverged"));
}

#[test]
fn grid_reports_cells_and_best() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_toy(dir.path());
    let out = bin()
        .args(["grid", "--data"])
        .arg(&data)
        .args([
            "--method",
            "iag",
            "--gamma-grid",
            "4,1,0.25",
            "--epochs",
            "8",
            "--cache-dir",
        ])
        .arg(dir.path().join("cache"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "gamma,final_suboptimality,converged"
    );
    assert_eq!(text.lines().count(), 4);
    assert!(stderr(&out).contains("best gamma"));
}

#[test]
fn all_divergent_grid_fails() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_toy(dir.path());
    let out = bin()
        .args(["grid", "--data"])
        .arg(&data)
        .args(["--gamma-grid", "1e9,1e8", "--epochs", "20", "--cache-dir"])
        .arg(dir.path().join("cache"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("diverged"), "{}", stderr(&out));
}

#[test]
fn sweep_prints_rate_table() {
    let out = bin()
        .args(["sweep", "--kappas", "1", "--ns", "2", "--epochs", "40"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "kappa,n,method,gamma,empirical_rate,theoretical_rate,converged"
    );
    assert_eq!(text.lines().count(), 3, "{text}");
    assert!(text.contains(",csaga,") && text.contains(",iag,"));
}

#[test]
fn verify_battery_passes() {
    let out = bin().arg("verify").output().unwrap();
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(
        text.lines().filter(|l| l.starts_with("ok ")).count() >= 8,
        "{text}"
    );
    assert!(!text.contains("FAIL"));
}

#[test]
fn jit_with_finito_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_toy(dir.path());
    let out = bin()
        .args(["run", "--data"])
        .arg(&data)
        .args([
            "--method",
            "finito",
            "--jit",
            "--gamma",
            "0.1",
            "--cache-dir",
        ])
        .arg(dir.path().join("cache"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("finito"), "{}", stderr(&out));
}

#[test]
fn parse_check_reports_shape() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_toy(dir.path());
    let out = bin()
        .args(["parse-check", "--data"])
        .arg(&data)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("n = 6") && text.contains("d = 3"), "{text}");
}

#[test]
fn malformed_data_exits_one_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.libsvm");
    std::fs::write(&path, "+1 1:1\n-1 2:oops\n").unwrap();
    let out = bin()
        .args(["parse-check", "--data"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_two() {
    let out = bin().args(["run", "--data", "x.libsvm"]).output().unwrap();
    assert_eq!(
        out.status.code(),
        Some(2),
        "missing --gamma is a usage error"
    );
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_loss_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_toy(dir.path());
    let out = bin()
        .args(["run", "--data"])
        .arg(&data)
        .args(["--loss", "hinge", "--gamma", "0.1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("hinge"));
}
