//! End-to-end CLI behavior: exit codes, output schemas, config-file merging,
//! and seed determinism, all through the real binary.

use std::fs;
use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_belltouchard"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf8 stdout"),
        String::from_utf8(out.stderr).expect("utf8 stderr"),
    )
}

fn parse_json(stdout: &str) -> Value {
    serde_json::from_str(stdout).expect("stdout is a JSON document")
}

#[test]
fn pmf_without_parameters_is_a_usage_error() {
    let (code, _, stderr) = run(&["pmf"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("--alpha"), "should name the missing flag: {stderr}");
}

#[test]
fn domain_violations_exit_2() {
    let (code, _, _) = run(&["simulate", "--alpha", "1", "--theta", "1", "--horizon", "0"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["pmf", "--alpha", "-1", "--theta", "1"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["risk", "--preset", "dataset1", "--epsilon", "-0.5"]);
    assert_eq!(code, 2);
}

#[test]
fn conflicting_or_unknown_flags_exit_2() {
    let (code, _, _) = run(&["pmf", "--alpha", "1", "--theta", "1", "--preset", "dataset1"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["validate", "--suite", "exhaustive"]);
    assert_eq!(code, 2);
}

#[test]
fn pmf_json_document_shape() {
    let (code, stdout, _) = run(&["pmf", "--preset", "dataset1", "--k-max", "10", "--format", "json"]);
    assert_eq!(code, 0);
    let doc = parse_json(&stdout);
    assert_eq!(doc["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(doc["command"], "pmf");
    assert_eq!(doc["config"]["alpha"], 0.1760);
    assert_eq!(doc["config"]["theta"], 0.3472);
    let rows = doc["rows"].as_array().expect("rows array");
    assert_eq!(rows.len(), 11);
    let mut prev = 0.0;
    for row in rows {
        let cdf = row["cdf"].as_f64().unwrap();
        assert!(cdf >= prev && cdf <= 1.0, "cdf must be nondecreasing and <= 1");
        prev = cdf;
    }
    assert!(prev > 0.999, "k = 10 captures nearly all mass at dataset1 scale");
}

#[test]
fn pmf_csv_layout() {
    let (code, stdout, _) = run(&["pmf", "--preset", "dataset1", "--k-max", "4"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert!(lines[0].starts_with("# belltouchard v"), "provenance comment first");
    assert!(lines[0].contains("alpha=0.176"));
    assert_eq!(lines[1], "k,pmf,cdf");
    assert_eq!(lines.len(), 2 + 5);
    assert!(lines[2].starts_with("0,"));
}

#[test]
fn simulate_is_seed_deterministic() {
    let base = ["simulate", "--alpha", "1", "--theta", "1", "--horizon", "3", "--paths", "50"];
    let mut with_seed = base.to_vec();
    with_seed.extend(["--seed", "13"]);
    let (_, first, _) = run(&with_seed);
    let (_, second, _) = run(&with_seed);
    assert_eq!(first, second, "same seed must give identical bytes");

    let mut other_seed = base.to_vec();
    other_seed.extend(["--seed", "14"]);
    let (_, third, _) = run(&other_seed);
    assert_ne!(first, third, "different seeds must diverge");
}

#[test]
fn simulate_summary_reports_the_batch() {
    let (code, stdout, _) = run(&[
        "simulate", "--alpha", "1", "--theta", "1", "--horizon", "1", "--paths", "500",
        "--summary", "--seed", "3",
    ]);
    assert_eq!(code, 0);
    let doc = parse_json(&stdout);
    assert_eq!(doc["summary"]["n_paths"], 500);
    assert_eq!(doc["summary"]["seed"], 3);
    let masses = doc["summary"]["empirical_pmf"].as_array().unwrap();
    let total: f64 = masses.iter().map(|v| v.as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12, "empirical pmf sums to 1, got {total}");
    assert!(doc["summary"]["mean"].as_f64().unwrap() > 0.0);
}

#[test]
fn config_file_matches_equivalent_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(&config, "alpha = 0.5\ntheta = 1.25\nhorizon = 2.0\npaths = 40\nseed = 9\n").unwrap();

    let (code, from_file, _) = run(&["simulate", "--config", config.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (_, from_flags, _) = run(&[
        "simulate", "--alpha", "0.5", "--theta", "1.25", "--horizon", "2.0", "--paths", "40",
        "--seed", "9",
    ]);
    assert_eq!(from_file, from_flags, "config file and flags must agree byte for byte");

    // An explicit flag overrides the file value.
    let (_, overridden, _) = run(&[
        "simulate", "--config", config.to_str().unwrap(), "--theta", "2.0",
    ]);
    assert!(overridden.contains("theta=2"), "override must show up in the echoed config");
    assert_ne!(overridden, from_file);
}

#[test]
fn missing_config_file_exits_2() {
    let (code, _, stderr) = run(&["simulate", "--config", "/nonexistent/run.toml"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("config"), "should mention the config file: {stderr}");
}

#[test]
fn output_flag_writes_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pmf.csv");
    let args = ["pmf", "--preset", "dataset2", "--k-max", "8"];
    let (_, stdout, _) = run(&args);
    let mut with_output = args.to_vec();
    with_output.extend(["--output", path.to_str().unwrap()]);
    let (code, piped, _) = run(&with_output);
    assert_eq!(code, 0);
    assert!(piped.is_empty(), "nothing goes to stdout when --output is set");
    assert_eq!(fs::read_to_string(&path).unwrap(), stdout);
}

#[test]
fn validate_quick_suite_passes() {
    let (code, stdout, _) = run(&["validate", "--suite", "quick", "--paths", "2000", "--seed", "5"]);
    assert_eq!(code, 0);
    let doc = parse_json(&stdout);
    assert_eq!(doc["passed"], true);
    let scenarios = doc["scenarios"].as_array().unwrap();
    assert_eq!(scenarios.len(), 17);
    for s in scenarios {
        assert_eq!(s["pass"], true, "scenario {} failed", s["name"]);
    }
}

#[test]
fn validate_rejects_tiny_path_counts() {
    let (code, _, _) = run(&["validate", "--paths", "10"]);
    assert_eq!(code, 2);
}

#[test]
fn risk_writes_trajectories_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("surplus.csv");
    let (code, stdout, _) = run(&[
        "risk", "--preset", "dataset1", "--u", "2", "--epsilon", "0.1", "--horizon", "5",
        "--paths", "500", "--trajectories", "3", "--trajectory-out", path.to_str().unwrap(),
        "--seed", "21",
    ]);
    assert_eq!(code, 0);
    let doc = parse_json(&stdout);
    let p = doc["ruin_probability"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&p));
    assert!(doc["ci_half_width"].as_f64().unwrap() > 0.0 || p == 0.0 || p == 1.0);

    let csv = fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# belltouchard v"));
    assert_eq!(lines.next().unwrap(), "path_id,time,surplus,event_flag");
    assert!(csv.lines().any(|l| l.starts_with("2,")), "three trajectories requested");
}

#[test]
fn risk_trajectories_require_an_output_path() {
    let (code, _, _) = run(&["risk", "--preset", "dataset1", "--trajectories", "2"]);
    assert_eq!(code, 2);
}

#[test]
fn risk_is_worker_invariant() {
    let base = [
        "risk", "--preset", "dataset3", "--u", "1", "--epsilon", "0.2", "--horizon", "5",
        "--paths", "2000", "--seed", "8",
    ];
    let mut one = base.to_vec();
    one.extend(["--workers", "1"]);
    let mut four = base.to_vec();
    four.extend(["--workers", "4"]);
    let (_, w1, _) = run(&one);
    let (_, w4, _) = run(&four);
    assert_eq!(w1, w4, "worker count must not leak into the report");
}

#[test]
fn nonhomogeneous_simulate_runs_and_rejects_alpha() {
    let (code, stdout, _) = run(&[
        "simulate", "--nh-rate", "sinusoidal-squared", "--rate-a", "1", "--rate-b", "1",
        "--rate-omega", "1", "--theta", "0.5", "--horizon", "2", "--paths", "20", "--seed", "2",
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert!(lines[0].contains("nh_rate=sinusoidal-squared"));
    assert_eq!(lines[1], "path_id,event_index,time,jump,cumulative_count");

    let (code, _, _) = run(&[
        "simulate", "--alpha", "1", "--nh-rate", "constant", "--rate-a", "1", "--theta", "1",
    ]);
    assert_eq!(code, 2, "--alpha conflicts with --nh-rate");
}
