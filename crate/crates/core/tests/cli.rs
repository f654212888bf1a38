//! End-to-end CLI behavior: exit codes, report fields, bench CSV shape.

use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_nashwelfare")
}

#[test]
fn exit_codes_match_error_classes() {
    let dir = tempfile::tempdir().unwrap();

    // 1: I/O
    let out = Command::new(bin())
        .args(["solve", "does-not-exist.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    // 2: parse/validation
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"weights": [0], "profile": {"kind": "identical", "values": [1]}}"#)
        .unwrap();
    let out = Command::new(bin()).arg("solve").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("weights must be positive"));

    let inst = dir.path().join("inst.json");
    std::fs::write(
        &inst,
        r#"{"weights": [1, 1], "profile": {"kind": "identical", "values": [3, 2, 1]}}"#,
    )
    .unwrap();

    // 3: budget
    let out = Command::new(bin())
        .arg("solve")
        .arg(&inst)
        .args(["--method", "oracle", "--budget", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    // 4: incompatible method/profile
    let out = Command::new(bin())
        .arg("solve")
        .arg(&inst)
        .args(["--method", "two-valuable"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));

    // 0: success
    let out = Command::new(bin()).arg("solve").arg(&inst).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn fptas_rejects_fractional_values() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("frac.json");
    std::fs::write(
        &inst,
        r#"{"weights": [1], "profile": {"kind": "additive", "matrix": [["1/2"]]}}"#,
    )
    .unwrap();
    let out = Command::new(bin())
        .arg("solve")
        .arg(&inst)
        .args(["--method", "fptas"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("integer valuations required"));
}

#[test]
fn check_reports_violations_for_lopsided_allocation() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    std::fs::write(
        &inst,
        r#"{"weights": [1, 1], "profile": {"kind": "identical", "values": [1, 1]}}"#,
    )
    .unwrap();
    let alloc = dir.path().join("alloc.json");
    std::fs::write(&alloc, r#"{"bundles": [[], [0, 1]]}"#).unwrap();
    let out = Command::new(bin())
        .arg("check")
        .arg(&inst)
        .arg(&alloc)
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["violations"], serde_json::json!([[0, 1]]));
    assert_eq!(doc["wwef1"], serde_json::json!(false));
    assert_eq!(doc["welfare"]["zero"], serde_json::json!(true));

    // dimension mismatch is a validation error
    let short = dir.path().join("short.json");
    std::fs::write(&short, r#"{"bundles": [[0, 1]]}"#).unwrap();
    let out = Command::new(bin())
        .arg("check")
        .arg(&inst)
        .arg(&short)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_emits_one_csv_row_per_entry() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("id.json");
    let gen = Command::new(bin())
        .args(["gen", "--kind", "kary", "--n", "2", "--m", "4", "--seed", "5", "--k", "2"])
        .arg("--out")
        .arg(&inst)
        .output()
        .unwrap();
    assert!(gen.status.success());

    let suite = dir.path().join("suite.json");
    std::fs::write(
        &suite,
        r#"[
            {"instance": "id.json", "method": "kary"},
            {"instance": "id.json", "method": "ptas", "epsilon": "0.8", "repair": true},
            {"instance": "id.json", "method": "fptas", "epsilon": "0.5"},
            {"instance": "gone.json", "method": "kary"}
        ]"#,
    )
    .unwrap();
    let out = Command::new(bin()).arg("bench").arg(&suite).output().unwrap();
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "instance,method,params,welfare_log,oracle_log,ratio,ms,transfers"
    );
    assert_eq!(lines.len(), 5);
    // exact methods report ratio 1
    let kary_cols: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(kary_cols[1], "kary");
    assert_eq!(kary_cols[5], "1.000000");
    // repaired rows carry a transfer count
    let ptas_cols: Vec<&str> = lines[2].split(',').collect();
    assert!(ptas_cols[2].contains("repair"));
    assert!(!ptas_cols[7].is_empty());
    // fptas at eps=0.5 keeps at least half the optimum
    let fptas_cols: Vec<&str> = lines[3].split(',').collect();
    let ratio: f64 = fptas_cols[5].parse().unwrap();
    assert!(ratio >= 0.5);
    // failed rows stay in place without aborting the suite
    assert!(lines[4].contains("failed("));

    // empty suite: header only
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, "[]").unwrap();
    let out = Command::new(bin()).arg("bench").arg(&empty).output().unwrap();
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "instance,method,params,welfare_log,oracle_log,ratio,ms,transfers\n"
    );
}

#[test]
fn repair_flag_yields_wwef1_report() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    std::fs::write(
        &inst,
        r#"{"weights": [1, 3], "profile": {"kind": "identical", "values": [5, 4, 3, 2, 1]}}"#,
    )
    .unwrap();
    let out = Command::new(bin())
        .arg("solve")
        .arg(&inst)
        .args(["--method", "ptas", "--epsilon", "0.8", "--repair"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["repair"]["wwef1"], serde_json::json!(true));
}

#[test]
fn solve_report_carries_guarantee_and_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    std::fs::write(
        &inst,
        r#"{"weights": [1, 2], "profile": {"kind": "identical", "values": [4, 3, 2, 1, 1, 2]}}"#,
    )
    .unwrap();
    let out = Command::new(bin())
        .arg("solve")
        .arg(&inst)
        .args(["--method", "ptas", "--epsilon", "0.8"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["parameters"]["lambda"], serde_json::json!(12));
    assert_eq!(doc["guarantee"], serde_json::json!("(1-eps) with eps=4/5"));

    // a coarse lambda downgrades the guarantee
    let out = Command::new(bin())
        .arg("solve")
        .arg(&inst)
        .args(["--method", "ptas", "--epsilon", "0.8", "--lambda", "4"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["guarantee"].as_str().unwrap().starts_with("none: lambda 4"));
}
