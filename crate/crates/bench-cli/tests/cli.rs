use std::fs;
use std::process::{Command, Output};

use wirecut_bench::{Format, ResultTable};

fn wirecut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wirecut"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn usage_and_validation_errors_exit_with_one() {
    assert_eq!(code(&wirecut(&["--help"])), 0);
    assert_eq!(code(&wirecut(&["no-such-command"])), 1);
    assert_eq!(code(&wirecut(&["cut-estimate", "--instance", "sample", "--shots", "10"])), 1, "missing seed");
    assert_eq!(code(&wirecut(&["exact", "--instance", "nope"])), 1);
    assert_eq!(
        code(&wirecut(&["exact", "--instance", "sample", "--graph", "g.json"])),
        1,
        "conflicting instance sources"
    );
    let out = wirecut(&["cut-estimate", "--instance", "sample", "--shots", "0", "--seed", "1"]);
    assert_eq!(code(&out), 1);
    assert!(!out.stderr.is_empty());
}

#[test]
fn negative_control_fails_the_selftest() {
    let out = wirecut(&["selftest", "--negative-control"]);
    assert_eq!(code(&out), 2);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("FAIL pauli identity")), "{text}");
}

#[test]
fn worker_count_does_not_change_output() {
    let run = |workers: &str| {
        let out = wirecut(&[
            "cut-estimate", "--instance", "sample", "--shots", "20000", "--seed", "3", "--workers", workers,
            "--no-timing",
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    let table = ResultTable::read(one.as_slice(), Format::Csv).unwrap();
    assert_eq!(table.rows.len(), 1);
    let row = &table.rows[0];
    let exact = row.exact.unwrap();
    assert!((row.mean - exact).abs() <= 5.0 * row.stderr, "{row:?}");
}

#[test]
fn exact_json_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exact.json");
    let out = wirecut(&["exact", "--instance", "sample", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let table = ResultTable::read(fs::File::open(&path).unwrap(), Format::Json).unwrap();
    assert_eq!(table.rows[0].method, "exact");
    assert_eq!(table.rows[0].exact, Some(table.rows[0].mean));
}

#[test]
fn qaoa_opt_trace_has_one_row_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("params.json");
    let out = wirecut(&[
        "qaoa-opt", "--instance", "sample", "--p", "1", "--steps", "8", "--grid", "3",
        "--evaluator", "randomized", "--shots", "20000", "--seed", "4",
        "--params-out", params.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("step,cost"));
    let costs: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(costs.len(), 9);
    assert!(costs.last().unwrap() < &costs[0], "{costs:?}");
    let p = wirecut::qaoa::QAOAParams::from_json(&fs::read_to_string(params).unwrap()).unwrap();
    assert_eq!(p.depth(), 1);
}

#[test]
fn uncut_sampling_meets_the_hit_rate_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = wirecut(&[
        "sample", "--instance", "sample", "--no-cut", "--shots", "20000", "--seed", "5",
        "--report", report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 20001);
    assert!(text.lines().skip(1).all(|l| l.len() == 4));
    let rep: serde_json::Value = serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(rep["k"], 0);
    let m = rep["num_edges"].as_f64().unwrap();
    assert!(rep["hit_rate"].as_f64().unwrap() >= 1.0 / m);
    assert_eq!(rep["pass"], true);
}

#[test]
fn scaling_reports_unit_speedup_for_one_worker() {
    let out = wirecut(&["scaling", "--workers-list", "1,2", "--shots", "4000", "--seed", "6", "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows[0]["workers"], 1);
    assert_eq!(rows[0]["speedup"], 1.0);
    assert_eq!(rows[0]["mean"], rows[1]["mean"]);
}
