use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treeshift"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn describe_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spec.json");
    std::fs::write(
        &path,
        r#"{"kind": "homogeneous", "params": {"q": 2}, "leafless": true}"#,
    )
    .unwrap();
    let v = json(&["describe", "--tree", path.to_str().unwrap(), "--depth", "10"]);
    assert_eq!(v["level_sizes"][10], 1024);
    assert_eq!(v["leafless"], true);
    assert_eq!(v["levels"][3]["degree_histogram"]["2"], 8);
}

#[test]
fn describe_grafted_leaf() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("leaf.json");
    std::fs::write(
        &path,
        r#"{"kind": "explicit", "params": {"levels": [[1], [2], [0, 1]], "tail": 1}}"#,
    )
    .unwrap();
    let v = json(&["describe", "--tree", path.to_str().unwrap(), "--depth", "4"]);
    assert_eq!(v["leafless"], false);
    assert_eq!(v["first_leaf"]["level"], 2);
}

#[test]
fn k_tree_norm() {
    let v = json(&[
        "norm",
        "--op",
        "S",
        "--p",
        "1",
        "--tree",
        "gallery:k_tree?k=3",
        "--depth",
        "64",
    ]);
    assert_eq!(v["value"], 3.0);
    assert_eq!(v["truncated"], false);
    assert_eq!(v["value_p_power"]["exact"], "3");
}

#[test]
fn periodic_radius() {
    let v = json(&[
        "radius",
        "--op",
        "B",
        "--tree",
        "gallery:periodic?q=2,3",
        "--max-power",
        "12",
        "--p",
        "2",
    ]);
    let r = v["radius_estimate"].as_f64().unwrap();
    assert!((r - 6f64.sqrt()).abs() < 1e-4);
    assert_eq!(v["depth"], 32);
}

#[test]
fn witnesses() {
    let v = json(&[
        "witness",
        "--kind",
        "eigenB",
        "--lambda",
        "2",
        "--tree",
        "gallery:homogeneous?q=2",
        "--depth",
        "8",
    ]);
    assert_eq!(v["report"]["residual_is_zero"], true);
    assert_eq!(v["report"]["exact"], true);
    let v = json(&[
        "witness",
        "--kind",
        "eigenB",
        "--lambda",
        "0.3+0.4i",
        "--tree",
        "gallery:k_tree?k=2",
        "--depth",
        "12",
    ]);
    assert!(v["report"]["residual"]["approx"].as_f64().unwrap() < 1e-10);
    let v = json(&[
        "witness",
        "--kind",
        "resolventS",
        "--lambda",
        "2",
        "--vertex",
        "1:1",
        "--tree",
        "gallery:k_tree?k=3",
        "--depth",
        "6",
    ]);
    assert_eq!(v["report"]["residual_is_zero"], true);
    assert_eq!(v["report"]["profile_holds"], true);
    let v = json(&[
        "witness",
        "--kind",
        "blowupS",
        "--lambda",
        "0",
        "--tree",
        "gallery:homogeneous?q=2",
        "--depth",
        "4",
    ]);
    assert_eq!(v["report"]["verdict"], "no_solution");
    let v = json(&[
        "witness",
        "--kind",
        "blowupS",
        "--lambda",
        "1/2",
        "--p",
        "2",
        "--tree",
        "gallery:homogeneous?q=2",
        "--depth",
        "4",
    ]);
    assert_eq!(v["report"]["profile"][3]["mean_p_power"]["exact"], "256");
    let v = json(&[
        "witness",
        "--kind",
        "pointS",
        "--tree",
        "gallery:homogeneous?q=2",
        "--depth",
        "4",
    ]);
    assert_eq!(v["report"]["verdict"], "empty");
    let v = json(&[
        "witness",
        "--kind",
        "membershipB",
        "--lambda",
        "1.5i",
        "--tree",
        "gallery:homogeneous?q=2",
        "--depth",
        "20",
    ]);
    assert_eq!(v["report"]["verdict"], "member_witnessed");
}

#[test]
fn witness_rejects_small_lambda() {
    let out = run(&[
        "witness",
        "--kind",
        "resolventS",
        "--lambda",
        "1/2",
        "--tree",
        "gallery:homogeneous?q=2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "invalid_parameter");
    assert!(err["message"].as_str().unwrap().contains("|λ| > 1"));
}

#[test]
fn hypercyclic_verdicts() {
    let v = json(&[
        "hypercyclic",
        "--op",
        "S",
        "--tree",
        "gallery:homogeneous?q=2",
        "--depth",
        "8",
    ]);
    assert_eq!(v["verdict"]["verdict"], "no");
    assert!(v["suite"].is_null());
    let v = json(&[
        "hypercyclic",
        "--op",
        "B",
        "--tree",
        "gallery:homogeneous?q=2",
        "--depth",
        "24",
        "--samples",
        "10",
        "--seed",
        "3",
    ]);
    assert_eq!(v["verdict"]["verdict"], "yes");
    assert_eq!(v["suite"]["identity_passes"], 10);
    assert_eq!(v["suite"]["bound_passes"], 10);
}

#[test]
fn gallery_commands() {
    let v = json(&["gallery", "list"]);
    assert_eq!(v.as_array().unwrap().len(), 8);
    let v = json(&[
        "gallery",
        "self-test",
        "--name",
        "k_tree?k=3",
        "--depth",
        "30",
        "--p",
        "1",
        "--max-power",
        "8",
    ]);
    assert_eq!(v["mismatches"], 0);
    let v = json(&[
        "gallery",
        "self-test",
        "--name",
        "ceil_three_halves",
        "--depth",
        "24",
        "--max-power",
        "4",
    ]);
    assert_eq!(v["mismatches"], 0);
}

#[test]
fn verify_oracles() {
    let v = json(&[
        "verify",
        "--op",
        "B",
        "--p",
        "1",
        "--trials",
        "500",
        "--seed",
        "9",
        "--tree",
        "gallery:homogeneous?q=2",
        "--depth",
        "10",
    ]);
    let best = v["lower_bound"]["best_ratio"].as_f64().unwrap();
    assert!((1.9..=2.0).contains(&best));
    assert_eq!(v["lower_bound"]["exceeding"], 0);
    assert_eq!(v["attainment"]["all_equal"], true);
    let v = json(&[
        "verify",
        "--op",
        "B",
        "--p",
        "1",
        "--trials",
        "10",
        "--tree",
        "gallery:homogeneous?q=2",
        "--depth",
        "2",
        "--grid",
        "-1,0,1,2",
    ]);
    assert_eq!(v["grid"]["best_ratio"], 2.0);
    assert_eq!(v["grid"]["exceeded"], false);
}

#[test]
fn apply_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.json");
    let output = dir.path().join("g.json");
    std::fs::write(&input, r#"[{"level": 0, "index": 0, "num": 3, "den": 2}]"#).unwrap();
    let v = json(&[
        "apply",
        "--op",
        "S",
        "--power",
        "2",
        "--tree",
        "gallery:homogeneous?q=3",
        "--depth",
        "4",
        "--in",
        input.to_str().unwrap(),
        "--out",
        output.to_str().unwrap(),
    ]);
    assert_eq!(v["output"]["support_size"], 9);
    let g: Value = serde_json::from_str(&std::fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!(g[0]["level"], 2);
    assert_eq!(g[0]["len"], 9);
    assert_eq!(g[0]["num"], 3);
    let back = dir.path().join("h.json");
    let v = json(&[
        "apply",
        "--op",
        "B",
        "--power",
        "2",
        "--tree",
        "gallery:homogeneous?q=3",
        "--depth",
        "4",
        "--in",
        output.to_str().unwrap(),
        "--out",
        back.to_str().unwrap(),
    ]);
    assert_eq!(v["output"]["max_support_level"], 0);
    let h: Value = serde_json::from_str(&std::fs::read_to_string(&back).unwrap()).unwrap();
    assert_eq!(h[0]["num"], 27);
    assert_eq!(h[0]["den"], 2);
}

#[test]
fn exit_codes() {
    assert_eq!(
        run(&["norm", "--op", "X", "--tree", "gallery:k_tree"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let out = run(&["norm", "--op", "S", "--tree", "gallery:nope"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "unknown_gallery");
    let out = Command::new(env!("CARGO_BIN_EXE_treeshift"))
        .args(["describe", "--tree", "gallery:homogeneous?q=3", "--depth", "20"])
        .env("TREESHIFT_VERTEX_CAP", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "resource_limit");
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = [
        "hypercyclic",
        "--op",
        "B",
        "--tree",
        "gallery:ceil_three_halves",
        "--depth",
        "20",
        "--samples",
        "16",
        "--seed",
        "42",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = [
        "verify",
        "--op",
        "S",
        "--power",
        "2",
        "--p",
        "2",
        "--trials",
        "64",
        "--seed",
        "7",
        "--tree",
        "gallery:k_tree?k=2",
        "--depth",
        "12",
    ];
    assert_eq!(run(&v).stdout, run(&v).stdout);
}

#[test]
fn csv_output() {
    let out = run(&[
        "norm",
        "--op",
        "B",
        "--tree",
        "gallery:homogeneous?q=2",
        "--depth",
        "3",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("level,ratio_p_power,ratio_approx"));
    assert_eq!(lines.next(), Some("0,2,2"));
    let out = run(&[
        "witness",
        "--kind",
        "pointS",
        "--tree",
        "gallery:homogeneous?q=2",
        "--depth",
        "3",
        "--format",
        "csv",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("key,value\n"));
    assert!(text.contains("report.verdict,empty"));
}
