//! End-to-end checks of the binary: exit codes, stream formats, determinism.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn murn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_murn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn murn_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_murn"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().expect("binary finishes")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

#[test]
fn catalog_list_names_every_entry() {
    let out = murn(&["catalog", "--list"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    for name in [
        "polya_identity",
        "all_ones",
        "affine",
        "asym_sqrt2",
        "asym_sqrt11",
        "lms_ex1",
        "lms_ex2",
        "lms_ex3",
        "li_ng",
        "chang_zhang",
    ] {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
    assert!(text.lines().count() >= 10);
}

#[test]
fn emit_then_check_round_trips_every_entry() {
    for entry in murn::catalog::entries() {
        let emitted = stdout_of(&murn(&["catalog", "--emit", &entry.name]));
        let check = murn_with_stdin(&["check", "-"], &emitted);
        let report: serde_json::Value =
            serde_json::from_str(&stdout_of(&check)).expect("report is JSON");
        assert_eq!(
            report["sigma"].as_f64(),
            Some(entry.expected_sigma),
            "{}",
            entry.name
        );
        assert_eq!(
            report["ergodicity_holds"].as_bool(),
            Some(entry.expected_e_holds),
            "{}",
            entry.name
        );
        let expected_code = if entry.expected_e_holds { 0 } else { 2 };
        assert_eq!(
            check.status.code(),
            Some(expected_code),
            "{}: wrong exit code",
            entry.name
        );
    }
}

#[test]
fn malformed_and_misshapen_inputs_exit_one() {
    let out = murn_with_stdin(&["check", "-"], "{not json");
    assert_eq!(out.status.code(), Some(1));
    let out = murn_with_stdin(&["check", "-"], r#"{"d":2,"m":2,"entries":[1,2,3]}"#);
    assert_eq!(out.status.code(), Some(1));
    let out = murn(&["check", "/nonexistent/tensor.json"]);
    assert_eq!(out.status.code(), Some(1));
    let out = murn(&["catalog", "--emit", "no_such_entry"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn catalog_emits_parameterized_affine_instances() {
    let out = murn(&["catalog", "--emit", "affine(2,1,6)"]);
    assert!(out.status.success());
    let check = murn_with_stdin(&["check", "-"], &stdout_of(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&check)).unwrap();
    assert_eq!(report["sigma"].as_f64(), Some(6.0));
    // 4h = 4 < 6 = sigma: the bound holds
    assert_eq!(check.status.code(), Some(0));
}

#[test]
fn solve_emits_result_json() {
    let tensor = stdout_of(&murn(&["catalog", "--emit", "asym_sqrt2"]));
    let out = murn_with_stdin(&["solve", "-"], &tensor);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let x = json["x_star"].as_array().unwrap();
    assert!((x[0].as_f64().unwrap() - (2f64.sqrt() - 1.0)).abs() < 1e-10);
    assert_eq!(json["certified"].as_bool(), Some(true));
    assert!(json["residual"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn solve_reports_non_convergence_with_exit_three() {
    // the Li-Ng fixed point is the barycenter itself, so the default start
    // converges immediately even though the map oscillates elsewhere
    let li_ng = stdout_of(&murn(&["catalog", "--emit", "li_ng"]));
    let out = murn_with_stdin(&["solve", "-", "--max-iter", "3", "--tol", "1e-16"], &li_ng);
    assert!(out.status.success());

    // an exhausted budget reports the last iterate and exits 3
    let lms3 = stdout_of(&murn(&["catalog", "--emit", "lms_ex3"]));
    let out = murn_with_stdin(&["solve", "-", "--max-iter", "2"], &lms3);
    assert_eq!(out.status.code(), Some(3), "{}", stdout_of(&out));
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(json["converged"].as_bool(), Some(false));
}

#[test]
fn solve_all_two_colour_lists_roots() {
    let tensor = stdout_of(&murn(&["catalog", "--emit", "lms_ex2"]));
    let out = murn_with_stdin(&["solve", "-", "--all-2colour"], &tensor);
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let roots = json["fixed_points"].as_array().unwrap();
    assert_eq!(roots.len(), 2);
}

#[test]
fn simulate_csv_is_deterministic_per_seed() {
    let tensor = stdout_of(&murn(&["catalog", "--emit", "lms_ex1"]));
    let args = [
        "simulate",
        "-",
        "--n",
        "200",
        "--replicates",
        "8",
        "--seed",
        "5",
    ];
    let a = stdout_of(&murn_with_stdin(&args, &tensor));
    let b = stdout_of(&murn_with_stdin(&args, &tensor));
    assert_eq!(a, b);
    assert!(a.starts_with("n,mean_l1_error,stderr,replicates\n"));
    assert_eq!(a.lines().count(), murn::urn::checkpoints(200).len() + 1);

    let c = stdout_of(&murn_with_stdin(
        &[
            "simulate",
            "-",
            "--n",
            "200",
            "--replicates",
            "8",
            "--seed",
            "6",
        ],
        &tensor,
    ));
    assert_ne!(a, c);
}

#[test]
fn simulate_zero_steps_single_row() {
    let tensor = stdout_of(&murn(&["catalog", "--emit", "all_ones"]));
    let out = stdout_of(&murn_with_stdin(
        &[
            "simulate",
            "-",
            "--n",
            "0",
            "--replicates",
            "3",
            "--seed",
            "1",
        ],
        &tensor,
    ));
    let lines: Vec<&str> = out.trim().lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("0,"));
}

#[test]
fn dag_event_csv_shape() {
    let out = stdout_of(&murn(&[
        "dag",
        "--n",
        "500,1000",
        "--replicates",
        "100",
        "--seed",
        "2",
    ]));
    let lines: Vec<&str> = out.trim().lines().collect();
    assert_eq!(lines[0], "n,ell,estimate,stderr,replicates");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("500,2,"));
    assert!(lines[2].starts_with("1000,2,"));
}

#[test]
fn dag_coupling_mode_reports_zero_tv() {
    let tensor = stdout_of(&murn(&["catalog", "--emit", "asym_sqrt2"]));
    let out = murn_with_stdin(&["dag", "-", "--n", "2"], &tensor);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert!(json["tv_distance"].as_f64().unwrap() <= 1e-10);
    assert!(!json["urn_support"].as_array().unwrap().is_empty());
}

#[test]
fn dag_dump_emits_parent_and_label_arrays() {
    let tensor = stdout_of(&murn(&["catalog", "--emit", "all_ones"]));
    let out = murn_with_stdin(&["dag", "-", "--dump", "--n", "5", "--seed", "4"], &tensor);
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(json["m"].as_u64(), Some(2));
    assert_eq!(json["parents"].as_array().unwrap().len(), 5);
    assert_eq!(json["labels"].as_array().unwrap().len(), 5);
    for (v, parents) in json["parents"].as_array().unwrap().iter().enumerate() {
        for p in parents.as_array().unwrap() {
            assert!(p.as_u64().unwrap() <= v as u64, "parent beyond node {v}");
        }
    }
}

#[test]
fn chain_certificate_csv() {
    let tensor = stdout_of(&murn(&["catalog", "--emit", "asym_sqrt2"]));
    let out = stdout_of(&murn_with_stdin(
        &["chain", "-", "--depth", "4", "--leaves", "point:1,1"],
        &tensor,
    ));
    let lines: Vec<&str> = out.trim().lines().collect();
    assert_eq!(lines[0], "level,max_error,bound");
    assert_eq!(lines.len(), 6);
    // bound column decays like (2/3)^level
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(first[0], "0");
}

#[test]
fn chain_rejects_bad_leaf_argument() {
    let tensor = stdout_of(&murn(&["catalog", "--emit", "asym_sqrt2"]));
    let out = murn_with_stdin(&["chain", "-", "--leaves", "point:9,9"], &tensor);
    assert_eq!(out.status.code(), Some(1));
    let out = murn_with_stdin(&["chain", "-", "--leaves", "garbage"], &tensor);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn out_flag_writes_file() {
    let tensor = stdout_of(&murn(&["catalog", "--emit", "all_ones"]));
    let path = std::env::temp_dir().join(format!("murn-cli-test-{}.csv", std::process::id()));
    let out = murn_with_stdin(
        &[
            "simulate",
            "-",
            "--n",
            "10",
            "--replicates",
            "2",
            "--seed",
            "1",
            "--out",
            path.to_str().unwrap(),
        ],
        &tensor,
    );
    assert!(out.status.success());
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.starts_with("n,mean_l1_error"));
    std::fs::remove_file(&path).ok();
}
