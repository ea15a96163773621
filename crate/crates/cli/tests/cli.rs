use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qss(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qss"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn qss")
}

fn json_stdout(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn usage_errors_exit_two_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 8] = [
        &["run-protocol", "--m", "1", "--rounds", "100", "--out", "p"],
        &["run-protocol", "--m", "3", "--rounds", "0", "--out", "p"],
        &["run-protocol", "--m", "3", "--rounds", "10", "--phi", "2.0", "--out", "p"],
        &["bell", "--state", "g", "--n", "9"],
        &["bell", "--state", "g", "--n", "4", "--noise", "1.5"],
        &["sweep-attack", "--m", "2", "--phi-grid", "0:3:4", "--out", "s"],
        &["thresholds", "--n-min", "3", "--out", "t"],
        &["tensor", "--state", "w", "--n", "3"],
    ];
    for args in cases {
        let out = qss(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    assert_eq!(qss(&[], dir.path()).status.code(), Some(2));
    assert_eq!(qss(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn honest_protocol_run_has_no_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = qss(&["run-protocol", "--m", "3", "--rounds", "30000", "--phi", "0", "--out", "run"], dir.path());
    let summary = json_stdout(&out);
    assert_eq!(summary["error_rate"], 0.0);
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["coalition_info"].as_object().unwrap().len(), 4);
    let on_disk: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run/summary.json")).unwrap()).unwrap();
    assert_eq!(on_disk, summary);
    let transcript = std::fs::read_to_string(dir.path().join("run/transcript.jsonl")).unwrap();
    assert_eq!(transcript.lines().count(), 30000);
    let sifted = transcript
        .lines()
        .filter(|l| serde_json::from_str::<Value>(l).unwrap()["sifted"] == true)
        .count();
    assert_eq!(sifted as u64, summary["sift_count"].as_u64().unwrap());
}

#[test]
fn attacked_run_and_explicit_coalitions() {
    let dir = tempfile::tempdir().unwrap();
    let out = qss(
        &["run-protocol", "--m", "3", "--rounds", "100000", "--phi", "45", "--deg", "--seed", "2",
          "--coalition", "2,5", "--coalition", "B3", "--out", "run"],
        dir.path(),
    );
    let s = json_stdout(&out);
    let q = s["error_rate_x"].as_f64().unwrap();
    assert!((q - 0.146447).abs() < 0.035, "{q}");
    let table = s["coalition_info"].as_object().unwrap();
    assert!(table.contains_key("B2+B5") && table.contains_key("B3"));
    let bad = qss(&["run-protocol", "--m", "2", "--rounds", "10", "--coalition", "4", "--out", "x"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn sweep_reports_crossing_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let s = json_stdout(&qss(&["sweep-attack", "--m", "3", "--out", "sw"], dir.path()));
    assert!((s["crossing_phi"].as_f64().unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-6);
    assert_eq!(s["criterion_disagreements"], 0);
    let csv = std::fs::read_to_string(dir.path().join("sw/sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "phi,i_ab,i_ae,margin,qber,horodecki_ab,horodecki_ae");
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert!((first[3] - 1.0).abs() < 1e-12);
    assert_eq!(csv.lines().count(), 22);
}

#[test]
fn bell_examples() {
    let dir = tempfile::tempdir().unwrap();
    let g = json_stdout(&qss(&["bell", "--state", "g", "--n", "6", "--noise", "1.0"], dir.path()));
    assert!((g["plane_sum"].as_f64().unwrap() - 16.0 / 3.0).abs() < 1e-9);
    assert!((g["full_sum"].as_f64().unwrap() - 23.0).abs() < 1e-9);
    let ghz = json_stdout(&qss(&["bell", "--state", "ghz", "--n", "6", "--noise", "0.18"], dir.path()));
    assert_eq!(ghz["verdict"], "two_setting_criterion_exceeded");
    let low = json_stdout(&qss(
        &["bell", "--state", "g", "--n", "6", "--noise", "0.2", "--frame", "search", "--restarts", "8"],
        dir.path(),
    ));
    assert_eq!(low["every_frame_certified"], true);
    assert_eq!(low["search"]["verdict"], "lr_sufficient");
    assert_eq!(low["search"]["restarts"], 8);
}

#[test]
fn thresholds_rdm_and_tensor() {
    let dir = tempfile::tempdir().unwrap();
    let t = json_stdout(&qss(&["thresholds", "--n-min", "4", "--n-max", "16", "--out", "th"], dir.path()));
    assert_eq!(t["crossover_n"], 13);
    let csv = std::fs::read_to_string(dir.path().join("th/thresholds.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("12,") && l.ends_with(",false")));
    assert!(csv.lines().any(|l| l.starts_with("13,") && l.ends_with(",true")));

    let r = json_stdout(&qss(&["rdm", "--n", "5"], dir.path()));
    assert_eq!(r["forced_product"], true);
    assert_eq!(r["nullspace_dim"], 0);
    let r4 = json_stdout(&qss(&["rdm", "--n", "4", "--marginals", "all"], dir.path()));
    assert_eq!(r4["forced_product"], false);

    let out = qss(&["tensor", "--state", "g", "--n", "6", "--out", "t.json"], dir.path());
    assert!(out.status.success());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("t.json")).unwrap()).unwrap();
    let entries = doc["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 729);
    assert_eq!(doc["ordering"], "xyz-row-major");
    let nonzero = entries.iter().filter(|v| v.as_f64().unwrap().abs() > 1e-12).count();
    assert_eq!(nonzero, 183);
}

#[test]
fn bad_thread_setting_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qss"))
        .args(["rdm", "--n", "5"])
        .env("QSS_THREADS", "zero")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
