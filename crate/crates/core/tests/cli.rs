use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcg-abelian"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = run(&full);
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn unramified_count() {
    let v = json(&["classify", "--prime", "5", "--rank", "2", "--signature", "2;-"]);
    assert_eq!(v["count"], 2);
    assert_eq!(v["genus"], 26);
}

#[test]
fn composed_count_and_summands() {
    let out = run(&["classify", "--prime", "5", "--rank", "2", "--signature", "1;5,5,5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("count 2"));
    let v = json(&["classify", "--prime", "5", "--rank", "2", "--signature", "1;5,5,5"]);
    let nonzero: Vec<(u64, u64)> = v["summands"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|s| s["product"] != 0)
        .map(|s| (s["u"].as_u64().unwrap(), s["v"].as_u64().unwrap()))
        .collect();
    assert_eq!(nonzero, [(0, 2), (1, 1)]);
}

#[test]
fn group_flag_matches_prime_and_rank() {
    let a = json(&["classify", "--group", "5,5", "--signature", "0;5,5,5"]);
    let b = json(&["classify", "--prime", "5", "--rank", "2", "--signature", "0;5,5,5"]);
    assert_eq!(a["count"], b["count"]);
    assert_eq!(a["count"], 1);
}

#[test]
fn genus_check_reports_catalogue_row() {
    let v = json(&["classify", "--group", "4,4", "--genus-check"]);
    assert_eq!(v["count"]["genus"], 17);
    assert_eq!(v["count"]["count"], 3);
}

#[test]
fn census_by_genus() {
    let v = json(&["classify", "--prime", "7", "--rank", "2", "--genus", "50"]);
    let entries = v["entries"].as_array().unwrap();
    assert!(entries.iter().any(|e| e["signature"] == "(2;-)" && e["count"] == 2));
    let sum: u64 = entries.iter().map(|e| e["count"].as_u64().unwrap()).sum();
    assert_eq!(v["total"].as_u64().unwrap(), sum);
}

#[test]
fn exit_codes() {
    let infeasible = run(&["classify", "--prime", "5", "--rank", "1", "--signature", "1;5"]);
    assert_eq!(infeasible.status.code(), Some(3));
    let ceiling = run(&[
        "--oracle-ceiling",
        "10",
        "classify",
        "--prime",
        "5",
        "--rank",
        "2",
        "--signature",
        "0;5,5,5,5,5",
    ]);
    assert_eq!(ceiling.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&ceiling.stderr).contains("ceiling"));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(
        run(&["classify", "--prime", "5", "--rank", "2", "--signature", "1,5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["classify", "--prime", "5"]).status.code(), Some(2));
}

#[test]
fn table51_rows_agree() {
    let v = json(&["table51", "--prime", "5,7,11,13", "--pair", "4,2"]);
    let rows = v.as_array().unwrap();
    let closed: Vec<u64> = rows.iter().map(|r| r["closed_form"].as_u64().unwrap()).collect();
    assert_eq!(closed, [4, 6, 10, 14]);
    assert!(rows.iter().all(|r| r["agree"] == true));
}

#[test]
fn table51_without_independent_route_is_not_a_failure() {
    let out = run(&["table51", "--prime", "2", "--pair", "3,1"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    let args = ["table51", "--prime", "5,7", "--pair", "3,1", "--pair", "4,1"];
    let mut with_csv = vec!["--format", "csv"];
    with_csv.extend_from_slice(&args);
    let text = stdout(&run(&with_csv));
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["r", "v", "p", "closed_form", "oracle", "pipeline", "agree"]);
    let from_csv: Vec<Vec<String>> = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    let from_json = json(&args);
    let rows = from_json.as_array().unwrap();
    assert_eq!(from_csv.len(), rows.len());
    for (c, j) in from_csv.iter().zip(rows) {
        for (k, key) in ["r", "v", "p", "closed_form", "oracle"].iter().enumerate() {
            assert_eq!(c[k], j[key].to_string());
        }
    }
}

#[test]
fn out_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("count.json");
    let out = run(&[
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
        "classify",
        "--prime",
        "5",
        "--rank",
        "2",
        "--signature",
        "2;-",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["count"], 2);
}

#[test]
fn verify_pipeline_suite_passes() {
    let out = run(&["verify", "pipeline-vs-oracle"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!stdout(&out).contains("FAIL"));
}

#[test]
fn verify_genus65_flags_the_three_factor_row() {
    let out = run(&["--format", "csv", "verify", "genus65"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let status: Vec<String> = reader.records().map(|r| r.unwrap()[4].to_string()).collect();
    assert_eq!(status, ["PASS", "PASS", "PASS", "FAIL"]);
}

#[test]
fn output_is_independent_of_worker_count() {
    let base = [
        "--format", "json", "classify", "--prime", "3", "--rank", "2", "--genus", "19",
    ];
    let one = run(&[&["--workers", "1"], &base[..]].concat());
    let four = run(&[&["--workers", "4"], &base[..]].concat());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.status.code(), Some(0));
}
