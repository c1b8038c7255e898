use std::process::{Command, Output};

use serde_json::Value;

fn tetra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tetra"))
        .args(args)
        .env_remove("TETRA_SEED")
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.push("--no-timestamp");
    let out = tetra(&full);
    let code = out.status.code().unwrap();
    let json = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{args:?}: no JSON ({e}); stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    });
    (code, json)
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn member_origin_is_interior() {
    let (code, r) = report(&["member", "--x1", "0", "--x2", "0", "--x3", "0"]);
    assert_eq!(code, 0);
    assert_eq!(r["schema"], "tetra/1");
    assert_eq!(r["result"]["status"], "interior");
    assert_eq!(r["config"]["tolerances"]["membership"], 1e-9);
    assert!(r.get("timestamp_unix").is_none());
}

#[test]
fn member_accepts_complex_and_negative_values() {
    let (code, r) = report(&["member", "--x1", "-0.5", "--x2", "0.5i", "--x3", "0.1-0.2i"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["status"], "interior");
    let (_, r) = report(&["member", "--x1", "1", "--x2", "1", "--x3", "-1"]);
    assert_eq!(r["result"]["status"], "outside");
}

#[test]
fn timestamp_present_by_default() {
    let out = tetra(&["radius", "--tol", "1e-3"]);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(r["timestamp_unix"].as_u64().is_some());
}

#[test]
fn radius_is_a_third() {
    let (code, r) = report(&["radius", "--tol", "1e-6"]);
    assert_eq!(code, 0);
    assert!((f(&r["result"]["radius"]) - 1.0 / 3.0).abs() < 1e-6);
    assert!(f(&r["result"]["worst_point_above"]["excess"]) > 0.0);
}

#[test]
fn counterexample_reference() {
    let (code, r) = report(&[
        "counterexample",
        "--l1",
        "0.2",
        "--l2",
        "0.1",
        "--l3",
        "0.15",
    ]);
    assert_eq!(code, 0);
    let res = &r["result"];
    assert!((f(&res["commutator_norm"]) - 0.004_656_3).abs() < 1e-7);
    assert_eq!(res["dilation_constructed"], false);
    assert_eq!(res["lambda_source"], "explicit");
    assert!(res["hypotheses"]
        .as_object()
        .unwrap()
        .values()
        .all(|v| v == true));
}

#[test]
fn counterexample_equal_moduli_is_an_input_error() {
    let out = tetra(&[
        "counterexample",
        "--l1",
        "0.1",
        "--l2",
        "0.1",
        "--l3",
        "0.15",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("|lambda1| != |lambda2|"));
}

#[test]
fn unknown_flag_exits_2_with_usage() {
    let out = tetra(&["radius", "--nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(
        tetra(&["member", "--x1", "zz", "--x2", "0", "--x3", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(tetra(&["--help"]).status.code(), Some(0));
}

#[test]
fn certify_schwarz_and_sampling() {
    let (code, r) = report(&[
        "certify", "--l1", "0.2", "--l2", "0.1", "--l3", "0.15", "--r", "0.333",
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["report"]["verdict"], "certified");
    let (code, r) = report(&[
        "certify", "--l1", "0.5", "--l2", "0.1", "--l3", "0.15", "--r", "0.333",
    ]);
    assert_eq!(code, 1);
    assert_eq!(r["result"]["report"]["verdict"], "not-certified");
    let (code, r) = report(&[
        "certify", "--l1", "0.2", "--l2", "0.1", "--l3", "0.15", "--method", "sampling",
        "--npolys", "20",
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["report"]["verdict"], "statistical-pass");
}

#[test]
fn certify_sampling_catches_probe() {
    let (code, r) = report(&[
        "certify",
        "--l1",
        "0.9",
        "--l2",
        "0.1",
        "--l3",
        "0.9",
        "--method",
        "sampling",
        "--npolys",
        "10",
        "--probe",
        "1:1,0,0;1:0,0,1;-0.3333333333333333:1,1,0;-0.3333333333333333:0,1,1",
    ]);
    assert_eq!(code, 1);
    assert_eq!(r["result"]["report"]["verdict"], "statistical-fail");
    assert!(f(&r["result"]["max_ratio"]) > 1.05);
}

#[test]
fn schwarz_needs_the_nilpotent_family() {
    let triple = r#"{"t1": [[[0,0]]], "t2": [[[0,0]]], "t3": [[[0.5,0]]]}"#;
    let out = tetra(&["certify", "--triple", triple]);
    assert_eq!(out.status.code(), Some(2));
    let (code, _) = report(&[
        "certify", "--triple", triple, "--method", "sampling", "--npolys", "5",
    ]);
    assert_eq!(code, 0);
}

#[test]
fn fundamental_and_commutator() {
    let (code, r) = report(&["fundamental", "--l1", "0.2", "--l2", "0.1", "--l3", "0.15"]);
    assert_eq!(code, 0);
    assert!(f(&r["result"]["closed_form_max_entry_gap"]) <= 1e-12);
    assert_eq!(r["result"]["f1"].as_array().unwrap().len(), 2);
    let (_, r) = report(&["commutator", "--l1", "0.2", "--l2", "0.1", "--l3", "0.15"]);
    let n = f(&r["result"]["norm"]);
    assert!((n - f(&r["result"]["closed_form_norm"])).abs() <= 1e-12);
}

#[test]
fn triple_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    std::fs::write(
        &path,
        r#"{"t1": [[[0,0],[0.2,0]],[[0,0],[0,0]]],
            "t2": [[[0,0],[0.1,0]],[[0,0],[0,0]]],
            "t3": [[[0,0],[0.15,0]],[[0,0],[0,0]]]}"#,
    )
    .unwrap();
    let (code, r) = report(&["commutator", "--triple", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!((f(&r["result"]["norm"]) - 0.004_656_3).abs() < 1e-7);
    let bad = tetra(&[
        "commutator",
        "--triple",
        r#"{"t1": [[[0,0]]], "t2": [[[1,0]]], "t3": [[[2,0]]]}"#,
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn verify_dilation_exit_codes() {
    let (code, r) = report(&[
        "verify-dilation",
        "--l1",
        "0.1",
        "--l2",
        "0.1",
        "--l3",
        "0.15",
    ]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["result"]["passed"], true);
    let (code, r) = report(&[
        "verify-dilation",
        "--l1",
        "0.2",
        "--l2",
        "0.1",
        "--l3",
        "0.15",
    ]);
    assert_eq!(code, 1);
    assert_eq!(r["result"]["checks"]["commutation_interior"], false);
    assert_eq!(r["result"]["checks"]["v1_eq_v2star_v3_interior"], true);
    let (code, r) = report(&[
        "verify-dilation",
        "--l1",
        "0.1",
        "--l2",
        "0.1",
        "--l3",
        "0.15",
        "--slot",
        "2",
    ]);
    assert_eq!(code, 1);
    assert_eq!(r["result"]["checks"]["v1_eq_v2star_v3_interior"], false);
    let (code, r) = report(&[
        "verify-dilation",
        "--l1",
        "0.1",
        "--l2",
        "0.1",
        "--l3",
        "0.15",
        "--power",
        "2",
        "--interior",
        "4",
    ]);
    assert!(code <= 1);
    assert_eq!(
        r["result"]["unchecked_conditions"]
            .as_array()
            .unwrap()
            .len(),
        1
    );
    assert_eq!(
        tetra(&[
            "verify-dilation",
            "--l1",
            "0.1",
            "--l2",
            "0.1",
            "--l3",
            "0.15",
            "--interior",
            "7"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn dilate_writes_to_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.json");
    let out = tetra(&[
        "dilate",
        "--l1",
        "0.2",
        "--l2",
        "0.1",
        "--l3",
        "0.15",
        "--depth",
        "3",
        "--out",
        path.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["result"]["v1"].as_array().unwrap().len(), 2 + 3 * 2);
    assert_eq!(r["config"]["output_path"], path.to_str().unwrap());
}

#[test]
fn polynomial_commands() {
    let (code, r) = report(&[
        "eval",
        "--poly",
        "1:1,1,0;1:0,0,2",
        "--x1",
        "0.5",
        "--x2",
        "0.2",
        "--x3",
        "0.1",
    ]);
    assert_eq!(code, 0);
    assert!((f(&r["result"]["value"][0]) - 0.11).abs() < 1e-15);
    let (_, r) = report(&[
        "eval", "--poly", "1:0,0,1", "--l1", "0.2", "--l2", "0.1", "--l3", "0.15",
    ]);
    assert!((f(&r["result"]["norm"]) - 0.15).abs() < 1e-15);
    let (code, r) = report(&["supnorm", "--poly", "1:0,0,1", "--nsamples", "100"]);
    assert_eq!(code, 0);
    assert!((f(&r["result"]["sup_norm"]) - 1.0).abs() < 1e-15);
    let (code, r) = report(&[
        "knese",
        "--poly",
        "0.5:0,0,0",
        "--nsamples",
        "100",
        "--bound",
        "0.5",
    ]);
    assert_eq!(code, 0);
    assert!((f(&r["result"]["report"]["max_violation"]) + 0.75).abs() < 1e-15);
    let (code, _) = report(&["knese", "--poly", "2:1,0,0", "--nsamples", "100"]);
    assert_eq!(code, 1);
    assert_eq!(
        tetra(&["supnorm", "--poly", "1:1,0"]).status.code(),
        Some(2)
    );
}

#[test]
fn batch_and_boundary_sample() {
    let (code, r) = report(&["batch", "--count", "5", "--seed", "3"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["count"], 5);
    assert_eq!(r["result"]["all_commutators_positive"], true);
    let (code, r) = report(&["boundary-sample", "--n", "7", "--seed", "1"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["points"].as_array().unwrap().len(), 7);
    assert_eq!(r["result"]["all_on_distinguished_boundary"], true);
}

#[test]
fn seed_changes_randomized_output() {
    let (_, a) = report(&["boundary-sample", "--n", "3", "--seed", "1"]);
    let (_, b) = report(&["boundary-sample", "--n", "3", "--seed", "2"]);
    assert_ne!(a["result"], b["result"]);
}
