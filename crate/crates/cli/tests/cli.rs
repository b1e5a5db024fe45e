//! End-to-end tests of the binary: exit codes, output shapes, determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_covpair"))
}

fn tmp(tag: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("cli-{tag}"));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Demo parameter set: unequal frequencies, equal damping rates, unit cross
/// drive, uncorrelated minimum-uncertainty initial data unless overridden.
fn write_config(dir: &Path, name: &str, initial_extra: &str, t_end: f64) -> PathBuf {
    let csv = dir.join(format!("{name}.csv"));
    let text = format!(
        r#"{{
  "oscillator": {{ "omega_a": 1.0, "omega_b": 3.0, "lambda": 1.0 }},
  "couplings": {{
    "h11": 1.0, "h22": 2.0, "h33": 1.0, "h44": 4.0,
    "h12": [1.0, 0.0], "h13": [1.0, 0.125], "h24": [1.0, 0.375]
  }},
  "initial": {{ "a1": 0.5, "b1": 0.5, "a2": 0.5, "b2": 0.5{initial_extra} }},
  "integrator": {{ "dt": 0.001, "t_end": {t_end}, "sample_stride": 10 }},
  "outputs": {{ "csv_path": {csv:?} }}
}}"#,
        csv = csv.display().to_string()
    );
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn validate_prints_named_checks_and_keeps_soft_failures_at_exit_zero() {
    let dir = tmp("validate");
    let cfg = write_config(&dir, "case_b", r#", "a12": 0.5, "b12": -0.5"#, 2.0);
    let out = run_in(&dir, &["validate", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("config: PASS"));
    assert!(text.contains("initial schwarz_a: PASS"));
    // The demo couplings are deliberately outside the PSD cone; that is a
    // diagnostic, not a gate.
    assert!(text.contains("couplings psd: FAIL"));
    assert!(text.contains("initial bipartite_separability: FAIL"));
    assert!(text.contains("initial classification: entangled (det_cs = -0.25)"));
}

#[test]
fn validate_rejects_invalid_values_with_exit_one() {
    let dir = tmp("validate-bad");
    let cfg = write_config(&dir, "bad", "", 2.0);
    let text = std::fs::read_to_string(&cfg)
        .unwrap()
        .replace("\"omega_a\": 1.0", "\"omega_a\": -1.0");
    std::fs::write(&cfg, text).unwrap();
    let out = run_in(&dir, &["validate", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("omega_a"));
}

#[test]
fn unreadable_or_malformed_configs_exit_three() {
    let dir = tmp("config-errors");
    let missing = run_in(&dir, &["validate", "no_such_file.json"]);
    assert_eq!(code(&missing), 3);

    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"oscillator\":").unwrap();
    let malformed = run_in(&dir, &["validate", bad.to_str().unwrap()]);
    assert_eq!(code(&malformed), 3);

    let cfg = write_config(&dir, "typo", "", 2.0);
    let text = std::fs::read_to_string(&cfg)
        .unwrap()
        .replace("\"integrator\"", "\"integrater\"");
    std::fs::write(&cfg, text).unwrap();
    let unknown_key = run_in(&dir, &["validate", cfg.to_str().unwrap()]);
    assert_eq!(code(&unknown_key), 3);

    let usage = run_in(&dir, &["frobnicate"]);
    assert_eq!(code(&usage), 3);
}

#[test]
fn simulate_writes_full_trajectory_table_and_window_summary() {
    let dir = tmp("simulate");
    let cfg = write_config(&dir, "case_b", r#", "a12": 0.5, "b12": -0.5"#, 4.0);
    let out = run_in(&dir, &["simulate", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("entanglement windows: [0, 1.33017], [2.40031, 2.99099]"));

    let csv = std::fs::read_to_string(dir.join("case_b.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "tau,A11,B11,C11,A22,B22,C22,A12,B12,B21,C12,det_cs,omega_a_sq,omega_b_sq,d_decoh_a_sq,d_decoh_b_sq"
    );
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "0");
    assert_eq!(first[11], "-0.25");
    assert_eq!(first[14], "1");
}

#[test]
fn simulate_is_deterministic() {
    let dir = tmp("determinism");
    let cfg_a = write_config(&dir, "first", "", 3.0);
    let cfg_b = write_config(&dir, "second", "", 3.0);
    assert_eq!(
        code(&run_in(&dir, &["simulate", cfg_a.to_str().unwrap()])),
        0
    );
    assert_eq!(
        code(&run_in(&dir, &["simulate", cfg_b.to_str().unwrap()])),
        0
    );
    let first = std::fs::read(dir.join("first.csv")).unwrap();
    let second = std::fs::read(dir.join("second.csv")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn figure_four_runs_are_byte_identical() {
    let dir = tmp("figure4");
    let first = run_in(&dir, &["figure", "4", "--out", "a"]);
    assert_eq!(code(&first), 0, "stderr: {}", stderr(&first));
    assert!(stdout(&first).contains("entanglement windows"));
    let second = run_in(&dir, &["figure", "4", "--out", "b"]);
    assert_eq!(code(&second), 0);
    let a = std::fs::read(dir.join("a/figure4.csv")).unwrap();
    let b = std::fs::read(dir.join("b/figure4.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn figure_rejects_unknown_ids_with_exit_three() {
    let dir = tmp("figure-bad");
    let out = run_in(&dir, &["figure", "7"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("unknown figure id"));
}

#[test]
fn figure_overlay_appends_closed_form_columns() {
    let dir = tmp("figure-overlay");
    let out = run_in(&dir, &["figure", "1", "--out", ".", "--with-closed-form"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let csv = std::fs::read_to_string(dir.join("figure1.csv")).unwrap();
    assert!(csv.starts_with("tau,p2_A,p2_B,p2_A_cf,p2_B_cf"));
}

#[test]
fn closed_form_emits_grid_and_skips_cross_at_equal_frequencies() {
    let dir = tmp("closed-form");
    let cfg = write_config(&dir, "demo", "", 2.0);
    let out = run_in(
        &dir,
        &["closed-form", cfg.to_str().unwrap(), "--t-end", "5"],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let csv = std::fs::read_to_string(dir.join("demo.csv")).unwrap();
    assert!(csv.starts_with("tau,A11,B11,C11,A22,B22,C22,A12,B12,B21,C12"));
    assert_eq!(csv.lines().count(), 502); // header + 0..=500 grid points

    let cfg_eq = write_config(&dir, "equal", "", 2.0);
    let text = std::fs::read_to_string(&cfg_eq)
        .unwrap()
        .replace("\"omega_b\": 3.0", "\"omega_b\": 1.0")
        .replace("\"h24\": [1.0, 0.375]", "\"h24\": [1.0, 0.125]");
    std::fs::write(&cfg_eq, text).unwrap();
    let out_eq = run_in(
        &dir,
        &["closed-form", cfg_eq.to_str().unwrap(), "--t-end", "5"],
    );
    assert_eq!(code(&out_eq), 0, "stderr: {}", stderr(&out_eq));
    assert!(stdout(&out_eq).contains("cross columns skipped"));
    let csv_eq = std::fs::read_to_string(dir.join("equal.csv")).unwrap();
    assert!(csv_eq.starts_with("tau,A11,B11,C11,A22,B22,C22\n"));
}

#[test]
fn compare_reports_the_route_disagreement() {
    let dir = tmp("compare");
    let cfg = write_config(&dir, "demo", "", 10.0);
    let out = run_in(&dir, &["compare", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("closed form vs RK4"));
    assert!(text.contains("asymptotic classification: entangled"));
    assert!(text.contains("routes consistent: no"));
}

#[test]
fn stationary_prints_components_and_diverges_without_damping() {
    let dir = tmp("stationary");
    let cfg = write_config(&dir, "demo", "", 2.0);
    let out = run_in(&dir, &["stationary", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("A11 = 4.49230769"));
    assert!(text.contains("C22 = 3.85641026"));
    assert!(text.contains("det_cs = 0.043438914"));
    assert!(text.contains("classification: separable"));

    let cfg_free = write_config(&dir, "undamped", "", 2.0);
    let text = std::fs::read_to_string(&cfg_free)
        .unwrap()
        .replace("\"h13\": [1.0, 0.125]", "\"h13\": [0.0, 0.0]")
        .replace("\"h24\": [1.0, 0.375]", "\"h24\": [0.0, 0.0]")
        .replace("\"h12\": [1.0, 0.0]", "\"h12\": [0.0, 0.0]");
    std::fs::write(&cfg_free, text).unwrap();
    let out_free = run_in(&dir, &["stationary", cfg_free.to_str().unwrap()]);
    assert_eq!(code(&out_free), 2);
    assert!(stderr(&out_free).contains("no stationary state"));
}

#[test]
fn sweep_writes_one_row_per_value_and_flags_inconsistency() {
    let dir = tmp("sweep");
    let cfg = write_config(&dir, "demo", "", 10.0);
    let out = run_in(
        &dir,
        &[
            "sweep",
            cfg.to_str().unwrap(),
            "--param",
            "couplings.h12r",
            "--values",
            "0,1",
        ],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("2 rows, 1 flagged route-inconsistent"));
    let csv = std::fs::read_to_string(dir.join("demo.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "value,det_cs_end,det_cs_stationary,det_cs_asymptotic,window_count,inconsistent"
    );
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0,0,0,0,"));
    assert!(lines[2].ends_with(",1"));

    let bad = run_in(
        &dir,
        &[
            "sweep",
            cfg.to_str().unwrap(),
            "--param",
            "bogus.path",
            "--values",
            "1",
        ],
    );
    assert_eq!(code(&bad), 3);
}

#[test]
fn help_and_version_exit_zero() {
    let dir = tmp("help");
    assert_eq!(code(&run_in(&dir, &["--help"])), 0);
    assert_eq!(code(&run_in(&dir, &["--version"])), 0);
}
