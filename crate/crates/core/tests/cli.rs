//! End-to-end checks of the `qphase` binary.

mod common;

use std::process::{Command, Output};

use common::corpus::corpus_path;

fn qphase(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qphase"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn reference() -> String {
    corpus_path("valid", "02_reference").display().to_string()
}

/// Non-comment CSV records, checked for shape.
fn csv_records(text: &str, header: &[&str]) -> Vec<csv::StringRecord> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), header);
    r.records().map(Result::unwrap).collect()
}

fn metadata(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("# {key}=")))
        .unwrap_or_else(|| panic!("missing {key}"))
        .to_owned()
}

fn is_17_digit(field: &str) -> bool {
    let mantissa = field.split('e').next().unwrap().trim_start_matches('-');
    mantissa.chars().filter(char::is_ascii_digit).count() == 17 && !field.contains(',')
}

#[test]
fn run_reproduces_the_mean() {
    let o = qphase(&["run", &reference()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let mean: f64 = metadata(&out, "mean_prob0").parse().unwrap();
    assert!((mean - 0.5).abs() < 0.002, "{mean}");
    let ks: f64 = metadata(&out, "ks_vs_arcsine").parse().unwrap();
    assert!(ks < 0.005, "{ks}");
    assert_eq!(metadata(&out, "seed"), "42");
    assert_eq!(metadata(&out, "samples"), "1000000");
    let rows = csv_records(&out, &["outcome", "analytic_prob_mean", "empirical_count"]);
    assert_eq!(rows.len(), 2);
    for row in &rows {
        assert!(is_17_digit(&row[1]), "{:?}", &row[1]);
    }
    let total: f64 = rows.iter().map(|r| r[1].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn run_is_byte_identical_across_invocations_and_threads() {
    let path = reference();
    for format in ["csv", "json"] {
        let base = [
            "run",
            path.as_str(),
            "--samples",
            "50000",
            "--seed",
            "3",
            "--format",
            format,
        ];
        let first = qphase(&base).stdout;
        assert_eq!(first, qphase(&base).stdout);
        let seq = qphase(&[&base[..], &["--threads", "1"]].concat()).stdout;
        let par = qphase(&[&base[..], &["--threads", "4"]].concat()).stdout;
        assert_eq!(first, seq, "{format}");
        assert_eq!(first, par, "{format}");
    }
}

#[test]
fn run_overrides_change_the_report() {
    let path = reference();
    let a = stdout(&qphase(&["run", &path, "--samples", "1000", "--seed", "1"]));
    let b = stdout(&qphase(&["run", &path, "--samples", "1000", "--seed", "2"]));
    assert_ne!(a, b);
    assert_eq!(metadata(&a, "digest"), metadata(&b, "digest"));
    assert_eq!(metadata(&a, "samples"), "1000");
}

#[test]
fn run_json_has_report_fields() {
    let o = qphase(&["run", &reference(), "--samples", "2000", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in [
        "digest",
        "seed",
        "samples",
        "mean_prob0",
        "ks_vs_arcsine",
        "outcomes",
        "prob0_histogram",
    ] {
        assert!(v.get(key).is_some(), "{key}");
    }
    let row = &v["outcomes"][0];
    for key in ["outcome", "analytic_prob_mean", "empirical_count"] {
        assert!(row.get(key).is_some(), "{key}");
    }
    let hist: u64 = v["prob0_histogram"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_u64().unwrap())
        .sum();
    assert_eq!(hist, 2000);
}

#[test]
fn malformed_file_exits_two_without_report() {
    let o = qphase(&["run", corpus_path("invalid", "23_several_errors").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 1, column 1"), "{err}");
    assert!(err.contains("line 3, column 17"), "{err}");
}

#[test]
fn unknown_gate_exits_two() {
    let o = qphase(&["run", corpus_path("valid", "22_unknown_gate_name").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn missing_file_and_bad_flags_exit_two() {
    assert_eq!(qphase(&["run", "/nonexistent/experiment.qx"]).status.code(), Some(2));
    assert_eq!(qphase(&["run", &reference(), "--samples", "0"]).status.code(), Some(2));
    assert_eq!(qphase(&["density", "--bins", "0"]).status.code(), Some(2));
    assert_eq!(qphase(&["verify", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(qphase(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn density_matches_arcsine() {
    let o = qphase(&["density", "--samples", "1000000", "--bins", "50"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let ks: f64 = metadata(&out, "ks_statistic").parse().unwrap();
    assert!(ks < 0.005, "{ks}");
    let rows = csv_records(&out, &["bin_center", "empirical_density", "analytic_pdf"]);
    assert_eq!(rows.len(), 50);
    let mass: f64 = rows.iter().map(|r| r[1].parse::<f64>().unwrap() / 50.0).sum();
    assert!((mass - 1.0).abs() < 1e-12);
    for row in &rows {
        assert!(row.iter().all(is_17_digit), "{row:?}");
    }
}

#[test]
fn density_two_bins_split_evenly() {
    let out = stdout(&qphase(&["density", "--samples", "100000", "--bins", "2"]));
    let rows = csv_records(&out, &["bin_center", "empirical_density", "analytic_pdf"]);
    for row in rows {
        let d: f64 = row[1].parse().unwrap();
        assert!((d - 1.0).abs() < 0.01, "{d}");
    }
}

#[test]
fn density_small_sample_is_well_formed() {
    let out = stdout(&qphase(&["density", "--samples", "10"]));
    assert_eq!(
        csv_records(&out, &["bin_center", "empirical_density", "analytic_pdf"]).len(),
        50
    );
    let json = qphase(&["density", "--samples", "10", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["bins"].as_array().unwrap().len(), 50);
}

#[test]
fn density_is_byte_identical_across_threads() {
    let base = ["density", "--samples", "200000", "--seed", "8"];
    let first = qphase(&base).stdout;
    assert_eq!(first, qphase(&base).stdout);
    assert_eq!(first, qphase(&[&base[..], &["--threads", "1"]].concat()).stdout);
    assert_eq!(first, qphase(&[&base[..], &["--threads", "3"]].concat()).stdout);
}

#[test]
fn verify_passes_by_default() {
    let o = qphase(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS ")).count(), 5);
}

#[test]
fn verify_names_a_corrupted_gate() {
    let o = qphase(&["verify", "--trials", "10", "--corrupt-gate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL unitarity"));
    assert!(String::from_utf8(o.stderr).unwrap().contains("unitarity"));
}

#[test]
fn verify_single_trial_runs_every_suite() {
    let o = qphase(&["verify", "--trials", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 5);
}
