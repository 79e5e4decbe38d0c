//! End-to-end tests of the `paracover` binary: output content, file exports,
//! determinism, and the scripted exit codes (0 ok, 2 parse, 3 invariant,
//! 4 no root).

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn paracover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paracover"))
        .args(args)
        .output()
        .expect("binary should run")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn write_scenario(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn optimize_baseline_reports_the_calibration() {
    let out = paracover(&["optimize", "--baseline"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("d = 22500.00 (interior)"), "{text}");
    assert!(text.contains("k = 243622.14 (interior)"), "{text}");
    assert!(text.contains("premium = 6352.58"), "{text}");
    assert!(text.contains("premium = 6334.18"), "{text}");
    assert!(text.contains("mv_no_insurance: 131023.21"), "{text}");
    assert!(text.contains("identity_expected: true"), "{text}");
}

#[test]
fn optimize_zero_loading_buys_full_cover() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), "s.toml", "[indemnity_pricing]\ntheta_d = 0.0\n");
    let out = paracover(&["optimize", &path]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("d = 0.00 (interior)"), "{text}");
    // premium is the pure expected benefit, lambda * E[Y]
    assert!(text.contains("premium = 5322.44"), "{text}");
}

#[test]
fn per_event_fixed_costs_scale_by_the_event_rate() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "s.toml",
        "[indemnity_pricing]\ngamma_d = 1000.0\n",
    );
    // per-period reading: floor = 1.3 * 1000
    let out = paracover(&["budget", &path, "--budget", "1000"]);
    assert!(stdout(&out).contains("(infeasible)"));
    // per-event reading: effective gamma_d = 1000 * 0.02 = 20, floor = 26
    let out = paracover(&["budget", &path, "--gamma-per-event", "--budget", "1000"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(!text.contains("(infeasible)"), "{text}");
    assert!(text.contains("chosen: indemnity"), "{text}");
}

#[test]
fn optimize_overdispersed_counts_use_the_general_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "s.toml",
        "[frequency]\nmean = 0.02\nvariance = 0.04\n",
    );
    let out = paracover(&["optimize", &path]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("count_law: general"), "{text}");
    assert!(text.contains("k = 254872.14"), "{text}");
    assert!(text.contains("identity_expected: false"), "{text}");
    // gap is clearly away from zero
    let gap_line = text
        .lines()
        .find(|l| l.starts_with("duality_gap:"))
        .unwrap();
    assert!(!gap_line.contains("gap: 0.000000e0"), "{gap_line}");
}

#[test]
fn optimize_writes_a_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = paracover(&["optimize", "--baseline", "--out", report.to_str().unwrap()]);
    assert!(out.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["count_law"], "poisson");
    assert!((json["deductible"]["parameter"].as_f64().unwrap() - 22_500.0).abs() < 1e-6);
    assert!(json["duality"]["identity_expected"].as_bool().unwrap());
}

#[test]
fn indifference_gamma_roots() {
    let out = paracover(&[
        "indifference",
        "--baseline",
        "--target",
        "gamma",
        "--mode",
        "optimal",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let root: f64 = parse_value(&text, "root:");
    assert!((root - 3_238.56).abs() < 0.5, "root {root}");

    let out = paracover(&[
        "indifference",
        "--baseline",
        "--target",
        "gamma",
        "--mode",
        "matched",
    ]);
    let root: f64 = parse_value(&stdout(&out), "root:");
    assert!((root - 9_980.06).abs() < 0.5, "root {root}");
}

#[test]
fn indifference_theta_roots_at_low_parametric_loading() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "s.toml",
        "[parametric_pricing]\ntheta_p = 0.2\n",
    );
    let out = paracover(&[
        "indifference",
        &path,
        "--target",
        "theta",
        "--mode",
        "optimal",
    ]);
    assert!(out.status.success());
    let root: f64 = parse_value(&stdout(&out), "root:");
    assert!((root - 1.160_671).abs() < 1e-4, "root {root}");

    let out = paracover(&[
        "indifference",
        &path,
        "--target",
        "theta",
        "--mode",
        "matched",
    ]);
    let root: f64 = parse_value(&stdout(&out), "root:");
    assert!((root - 1.573_205).abs() < 1e-4, "root {root}");
}

#[test]
fn indifference_without_a_root_exits_4() {
    // indemnity loading already far above the level where parametric wins,
    // so no fixed cost on [0, 50000] can restore indifference
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "s.toml",
        "[indemnity_pricing]\ntheta_d = 2.0\n[parametric_pricing]\ntheta_p = 0.2\n",
    );
    let out = paracover(&[
        "indifference",
        &path,
        "--target",
        "gamma",
        "--mode",
        "optimal",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn surface_minimal_grid_has_header_and_four_rows() {
    let out = paracover(&[
        "surface",
        "--baseline",
        "--kind",
        "dgamma",
        "--grid",
        "0:500000:2,0:100:2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(
        lines[0],
        "axis1,axis2,delta_mv,capped,indemnity_infeasible,chosen"
    );
}

#[test]
fn surface_truncation_clamps_negative_cells() {
    let out = paracover(&[
        "surface",
        "--baseline",
        "--kind",
        "dgamma",
        "--grid",
        "0:500000:5,0:100:3",
        "--truncate-zero",
    ]);
    assert!(out.status.success());
    for line in stdout(&out).lines().skip(1) {
        let delta: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!(delta >= 0.0, "{line}");
    }
}

#[test]
fn surface_default_grids_export_identically_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["dgamma", "thetagamma", "budget"] {
        let a = dir.path().join(format!("{kind}_a.csv"));
        let b = dir.path().join(format!("{kind}_b.csv"));
        for path in [&a, &b] {
            let out = paracover(&[
                "surface",
                "--baseline",
                "--kind",
                kind,
                "--out",
                path.to_str().unwrap(),
            ]);
            assert!(out.status.success());
        }
        let bytes_a = fs::read(&a).unwrap();
        let bytes_b = fs::read(&b).unwrap();
        assert_eq!(bytes_a, bytes_b, "{kind} export must be byte-identical");
        assert_eq!(
            String::from_utf8(bytes_a).unwrap().lines().count(),
            201 * 201 + 1,
            "{kind} default grid size"
        );
    }
}

#[test]
fn budget_below_the_floor_reports_infeasible_indemnity() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "s.toml",
        "[indemnity_pricing]\ngamma_d = 1000.0\n",
    );
    let out = paracover(&["budget", &path, "--budget", "1000"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("(infeasible)"), "{text}");
    assert!(text.contains("chosen: parametric"), "{text}");
}

#[test]
fn budget_zero_chooses_no_insurance() {
    let out = paracover(&["budget", "--baseline", "--budget", "0"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("chosen: no_insurance"));
}

#[test]
fn budget_sweep_reports_landmarks_and_monotone_curves() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "s.toml",
        "[indemnity_pricing]\ngamma_d = 1000.0\n",
    );
    let table = dir.path().join("sweep.csv");
    let out = paracover(&[
        "budget",
        &path,
        "--sweep",
        "0:12000:241",
        "--out",
        table.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("p_d_min: 1300.00"), "{text}");
    assert!(text.contains("indifference_budget: 34"), "{text}");

    let table = fs::read_to_string(&table).unwrap();
    let mut prev_p = f64::NEG_INFINITY;
    let mut prev_d = f64::NEG_INFINITY;
    for line in table.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let mv_p: f64 = fields[4].parse().unwrap();
        let mv_d: f64 = fields[7].parse().unwrap();
        assert!(mv_p >= prev_p - 1e-9 && mv_d >= prev_d - 1e-9, "{line}");
        prev_p = mv_p;
        prev_d = mv_d;
    }
}

#[test]
fn simulate_single_year_is_finite() {
    let out = paracover(&["simulate", "--baseline", "--design", "none", "--years", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mean: f64 = parse_value(&text, "mean:");
    assert!(mean.is_finite());
    assert!(text.contains("z_score: n/a"), "{text}");
}

#[test]
fn simulate_is_deterministic_for_a_seed() {
    let args = [
        "simulate",
        "--baseline",
        "--design",
        "indemnity:22500",
        "--years",
        "200000",
        "--seed",
        "42",
    ];
    let a = paracover(&args);
    let b = paracover(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "same seed must give identical bytes");

    let z: f64 = parse_value(&stdout(&a), "z_score:");
    assert!(z.abs() < 4.0, "z {z}");
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), "bad.toml", "[severity\nnu = oops\n");
    let out = paracover(&["optimize", &path]);
    assert_eq!(out.status.code(), Some(2));

    // unknown key, with the offending name in the message
    let path = write_scenario(dir.path(), "typo.toml", "[severity]\nnuu = 1e-6\n");
    let out = paracover(&["optimize", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nuu"));

    // missing scenario source is a usage error (clap exits 2)
    let out = paracover(&["optimize"]);
    assert_eq!(out.status.code(), Some(2));

    let out = paracover(&["simulate", "--baseline", "--design", "bogus:1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invariant_violations_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), "neg.toml", "[severity]\nnu = -1.0\n");
    let out = paracover(&["optimize", &path]);
    assert_eq!(out.status.code(), Some(3));

    // a payment beyond the sum insured violates the admissible range
    let out = paracover(&["simulate", "--baseline", "--design", "parametric:600000"]);
    assert_eq!(out.status.code(), Some(3));
}

fn parse_value(text: &str, key: &str) -> f64 {
    text.lines()
        .find(|l| l.starts_with(key))
        .unwrap_or_else(|| panic!("missing {key} in:\n{text}"))
        .split_whitespace()
        .last()
        .unwrap()
        .parse()
        .unwrap_or_else(|_| panic!("unparseable {key} in:\n{text}"))
}
