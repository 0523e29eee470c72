//! Usage-level checks of the binary: exit codes, format selection, file
//! inputs, and schema round-trips.

use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fdioph"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_line(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("one JSON object")
}

#[test]
fn exit_codes() {
    // domain error: even characteristic
    let out = run(&["field-info", "--field", "2", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("characteristic 2"));
    // usage error: unknown flag
    let out = run(&["field-info", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    // success
    let out = run(&["field-info", "--field", "7", "1"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn classify_json_matches_spec_example() {
    let out = run(&[
        "--format",
        "json",
        "classify",
        "--poly",
        "x1*x2*x3+1",
        "--field",
        "7",
        "1",
    ]);
    let v = json_line(&out);
    assert_eq!(v["type1"], true);
    assert_eq!(v["type2"], true);
}

#[test]
fn bound_infers_field_from_q() {
    let out = run(&[
        "--format", "json", "bound", "--poly", "x1*x2+1", "--q", "1000003",
    ]);
    let v = json_line(&out);
    assert_eq!(v["value"], 1);
    assert_eq!(v["guaranteed"], true);
}

#[test]
fn verify_spec_example() {
    let out = run(&[
        "verify", "--poly", "x1-x2", "--field", "13", "1", "--set", "1,4",
    ]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "valid");
    let out = run(&[
        "--format", "json", "verify", "--poly", "x1*x2+1", "--field", "11", "1", "--set", "2,3",
    ]);
    let v = json_line(&out);
    assert_eq!(v["valid"], false);
    assert_eq!(v["counterexample"]["value"], 7);
}

#[test]
fn construct_output_schema_roundtrips() {
    let out = run(&[
        "--format",
        "json",
        "construct",
        "--poly",
        "x1*x2+1",
        "--field",
        "13",
        "1",
        "--n",
        "2",
    ]);
    let v = json_line(&out);
    let set = &v["set"];
    assert_eq!(set["n"], 2);
    assert_eq!(set["strategy"], "standard");
    assert_eq!(set["y0"], 4);
    assert_eq!(set["elements"], serde_json::json!([4, 3]));
    assert_eq!(set["strong"], true);
}

#[test]
fn poly_and_set_file_inputs() {
    let dir = std::env::temp_dir().join(format!("fdioph-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let poly_path = dir.join("poly.json");
    let set_path = dir.join("set.json");
    // canonical polynomial JSON for x1*x2 + 1 over a prime field
    std::fs::write(
        &poly_path,
        r#"{"k": 2, "terms": [{"coeff": 1, "exps": [1, 1]}], "constant": 1}"#,
    )
    .unwrap();
    std::fs::write(&set_path, "[4, 3]").unwrap();
    let poly_arg = format!("@{}", poly_path.display());
    let set_arg = format!("@{}", set_path.display());
    let out = run(&[
        "--format", "json", "verify", "--poly", &poly_arg, "--field", "13", "1", "--set", &set_arg,
        "--strong",
    ]);
    let v = json_line(&out);
    assert_eq!(v["valid"], true);
    assert_eq!(v["strong_valid"], true);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn modulus_override_changes_representation() {
    let default = json_line(&run(&[
        "--format",
        "json",
        "field-info",
        "--field",
        "3",
        "2",
    ]));
    assert_eq!(default["field"]["modulus"], serde_json::json!([1, 0, 1]));
    let overridden = json_line(&run(&[
        "--format",
        "json",
        "field-info",
        "--field",
        "3",
        "2",
        "--modulus",
        "2,1,1",
    ]));
    assert_eq!(overridden["field"]["modulus"], serde_json::json!([2, 1, 1]));
    // reducible modulus is rejected
    let bad = run(&["field-info", "--field", "3", "2", "--modulus", "1,2,1"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn table_csv_has_versioned_header() {
    let out = run(&[
        "--format", "csv", "table", "--poly", "x1*x2+1", "--fields", "13,729",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "# fdioph-table v1");
    assert!(lines
        .next()
        .unwrap()
        .starts_with("q,p,e,strategy,n_theorem,"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn table_records_row_errors_and_continues() {
    // 12 is not a prime power; the stream must continue to 13
    let out = run(&[
        "--format", "json", "table", "--poly", "x1*x2+1", "--fields", "12,13",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0]["error"]
        .as_str()
        .unwrap()
        .contains("not a prime power"));
    assert_eq!(rows[1]["q"], 13);
    assert_eq!(rows[1]["error"], Value::Null);
    assert_eq!(rows[1]["n_constructed"], 2);
}

#[test]
fn table_prime_range_count_is_log_spaced_and_sorted() {
    let out = run(&[
        "--format",
        "json",
        "table",
        "--poly",
        "x1*x2+1",
        "--prime-range",
        "257:4001",
        "--count",
        "5",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let qs: Vec<u64> = text
        .lines()
        .map(|l| {
            serde_json::from_str::<Value>(l).unwrap()["q"]
                .as_u64()
                .unwrap()
        })
        .collect();
    assert_eq!(qs.len(), 5);
    assert!(qs.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(qs.first().copied(), Some(257));
    assert!(*qs.last().unwrap() <= 4001);
}

#[test]
fn exact_max_json_schema() {
    let out = run(&[
        "--format",
        "json",
        "exact-max",
        "--poly",
        "x1*x2*x3+1",
        "--field",
        "11",
        "1",
    ]);
    let v = json_line(&out);
    assert_eq!(v["max_size"], 4);
    assert_eq!(v["exhausted"], true);
    assert!(v["nodes_explored"].as_u64().unwrap() > 0);
    assert_eq!(v["witness_set"].as_array().unwrap().len(), 4);
}

#[test]
fn weil_check_not_applicable_case() {
    let out = run(&[
        "--format",
        "json",
        "weil-check",
        "--g",
        "x^2+2*x+1",
        "--field",
        "7",
        "1",
    ]);
    let v = json_line(&out);
    assert_eq!(v["applicable"], false);
    assert_eq!(v["satisfied"], Value::Null);
}

#[test]
fn extension_field_elements_serialize_as_coeff_vectors() {
    let out = run(&[
        "--format",
        "json",
        "construct",
        "--poly",
        "x1*x2+1",
        "--field",
        "3",
        "2",
        "--n",
        "2",
    ]);
    let v = json_line(&out);
    let elements = v["set"]["elements"].as_array().unwrap();
    assert_eq!(elements.len(), 2);
    assert!(elements[0].get("coeffs").is_some());
}

#[test]
fn csv_format_for_simple_commands() {
    let out = run(&[
        "--format", "csv", "classify", "--poly", "x1*x2+2", "--field", "5", "1",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "dominant,type1,type2");
    assert_eq!(lines.next().unwrap(), "\"[1,1]\",false,true");
}
