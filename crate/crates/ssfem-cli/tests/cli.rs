//! End-to-end checks of the command-line interface: output shapes, exit
//! codes, determinism, and JSON round-trips.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssfem"))
        .args(args)
        .env_remove("SSFEM_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 output")
}

#[test]
fn count_five_dim_text_ends_with_grand_total() {
    let out = run(&["count", "--dim", "5", "--smoothness", "1", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().last(), Some("total 501942"));
    assert!(text.contains("dim 0: 6 x 20349 = 122094"));
    assert!(text.contains("dim 5 (interior): 1 x 62888 = 62888"));
}

#[test]
fn count_json_round_trips_and_is_deterministic() {
    let args = ["count", "--dim", "2", "--smoothness", "1", "--format", "json"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout, "byte-identical across runs");

    let text = stdout(&first);
    let value: serde_json::Value = serde_json::from_str(&text).expect("valid json");
    assert_eq!(value["dimension"], "2");
    assert_eq!(value["degree"], "5");
    assert_eq!(value["grand_total"], "21");
    assert_eq!(value["faces"].as_array().map(Vec::len), Some(3));

    // Re-import and re-serialize: no field may be lost or mangled in transit.
    let reserialized = serde_json::to_string_pretty(&value).unwrap();
    let reparsed: serde_json::Value = serde_json::from_str(&reserialized).unwrap();
    assert_eq!(reparsed, value);
}

#[test]
fn count_csv_rows_per_face_dim_and_order() {
    let out = run(&["count", "--dim", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("face_dim,order,per_face,num_faces,total"));
    assert!(text.contains("0,2,3,3,9"));
    assert!(text.contains("1,1,1,3,3"));
}

#[test]
fn partition_output_is_deterministic() {
    let args = ["partition", "--dim", "3", "--format", "json"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let value: serde_json::Value = serde_json::from_str(&stdout(&first)).expect("valid json");
    assert_eq!(value["grand_total"], "220");
}

#[test]
fn verify_quintic_triangle_exits_zero() {
    let out = run(&["verify", "--dim", "2", "--smoothness", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verified: all counts agree"));
}

#[test]
fn unisolvence_line_reports_full_rank() {
    let out = run(&["unisolvence", "--dim", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("nodal matrix 4x4: rank 4"));
}

#[test]
fn unisolvence_five_dim_is_refused_at_desk_scale() {
    let out = run(&["unisolvence", "--dim", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("501942"));
}

#[test]
fn unisolvence_cap_env_var_and_flag() {
    let low = Command::new(env!("CARGO_BIN_EXE_ssfem"))
        .args(["unisolvence", "--dim", "2"])
        .env("SSFEM_CAP", "10")
        .output()
        .expect("binary runs");
    assert_eq!(low.status.code(), Some(2));
    assert!(stderr(&low).contains("cap of 10"));

    // The explicit flag wins over the environment.
    let flagged = Command::new(env!("CARGO_BIN_EXE_ssfem"))
        .args(["unisolvence", "--dim", "2", "--cap", "25"])
        .env("SSFEM_CAP", "10")
        .output()
        .expect("binary runs");
    assert_eq!(flagged.status.code(), Some(0));

    let garbage = Command::new(env!("CARGO_BIN_EXE_ssfem"))
        .args(["unisolvence", "--dim", "2"])
        .env("SSFEM_CAP", "plenty")
        .output()
        .expect("binary runs");
    assert_eq!(garbage.status.code(), Some(2));
}

#[test]
fn continuity_reports_exact_zero_jump() {
    let out = run(&[
        "continuity", "--dim", "2", "--smoothness", "1", "--seed", "42", "--samples", "8",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("max jump = 0"));
}

#[test]
fn export_writes_json_file_identical_to_stdout() {
    let path = std::env::temp_dir().join(format!("ssfem-export-{}.json", std::process::id()));
    let to_file = run(&[
        "export",
        "--dim",
        "1",
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(to_file.status.code(), Some(0));
    let from_file = std::fs::read_to_string(&path).expect("file written");
    std::fs::remove_file(&path).ok();

    let to_stdout = run(&["export", "--dim", "1", "--format", "json"]);
    assert_eq!(from_file, stdout(&to_stdout));

    let value: serde_json::Value = serde_json::from_str(&from_file).expect("valid json");
    let functionals = value["functionals"].as_array().expect("array");
    assert_eq!(functionals.len(), 4);
    assert_eq!(value["total"], "4");
    // Hermite slope functional at the left vertex: first normal order 1.
    assert_eq!(functionals[1]["order"], "1");
    assert_eq!(functionals[1]["point"][0], "1");
}

#[test]
fn export_above_three_dims_is_invalid() {
    let out = run(&["export", "--dim", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unsupported_dimension_exits_two() {
    let out = run(&["count", "--dim", "7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn profile_override_requires_degree() {
    let out = run(&["count", "--dim", "2", "--profile", "2,1"]);
    assert_eq!(out.status.code(), Some(2));
    let overridden = run(&[
        "count", "--dim", "2", "--profile", "2,1", "--degree", "6", "--format", "text",
    ]);
    assert_eq!(overridden.status.code(), Some(0));
    assert_eq!(stdout(&overridden).lines().last(), Some("total 28"));
}

#[test]
fn unknown_flag_exits_two_with_usage() {
    let out = run(&["count", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).to_lowercase().contains("usage"));
}
