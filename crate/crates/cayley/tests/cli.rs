//! End-to-end checks of the installed binary: exit codes, JSON output
//! shapes, and byte-level determinism of the census stream.

use std::process::{Command, Output};

fn cayley(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cayley"))
        .args(args)
        .output()
        .expect("binary spawns")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

#[test]
fn successful_queries_exit_zero() {
    let out = cayley(&["group", "dihedral(8)"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("order: 8"));

    let out = cayley(&["spectrum", "dicyclic(4; 2)", "--set", "x"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("-2, -2, 0, 0, 0, 0, 2, 2"));
}

#[test]
fn a_non_integral_verdict_is_still_a_successful_run() {
    let out = cayley(&["check", "dihedral(6)", "--set", "a"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("not integral"));
}

#[test]
fn input_errors_exit_two_with_a_message() {
    let out = cayley(&["group", "trihedral(8)"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("error:"));

    let out = cayley(&["check", "dihedral(8)", "--set", "q"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("error:"));

    let out = cayley(&["check", "dihedral(8)", "--set", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("identity"));
}

#[test]
fn unknown_flags_are_rejected_with_usage_text() {
    let out = cayley(&["census", "--group", "dihedral(8)", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("Usage"));
}

#[test]
fn check_json_reports_all_three_routes() {
    let out = cayley(&["check", "dicyclic(4; 2)", "--set", "x*a", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(doc["group"], "dicyclic(4; 2)");
    assert_eq!(doc["kind"], "directed");
    assert_eq!(doc["agree"], true);
    assert_eq!(doc["criteria"]["overall"], true);
    assert_eq!(doc["exact"]["integral"], true);
    assert_eq!(doc["numeric"]["integral"], true);
}

#[test]
fn census_stream_is_byte_identical_across_runs_and_worker_counts() {
    let base = ["census", "--group", "dicyclic(4; 2)"];
    let first = cayley(&base);
    assert_eq!(first.status.code(), Some(0));
    let again = cayley(&base);
    assert_eq!(first.stdout, again.stdout, "reruns differ");
    let parallel = cayley(&["census", "--group", "dicyclic(4; 2)", "--workers", "3"]);
    assert_eq!(first.stdout, parallel.stdout, "worker count changed the bytes");

    let text = stdout(&first);
    let mut lines = text.lines();
    let header: serde_json::Value =
        serde_json::from_str(lines.next().expect("header line")).expect("header is JSON");
    assert_eq!(header["schema"], 1);
    assert_eq!(lines.clone().count(), 128, "one record per mask");
    for line in lines {
        let record: serde_json::Value = serde_json::from_str(line).expect("record is JSON");
        assert!(record["mask"].is_u64());
    }
}

#[test]
fn census_summary_json_matches_the_directed_classification() {
    let out = cayley(&[
        "census",
        "--group",
        "dicyclic(4; 2)",
        "--kind",
        "directed",
        "--summary-only",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    let totals = &doc["totals"];
    let total = totals["undirected"].as_u64().unwrap()
        + totals["directed"].as_u64().unwrap()
        + totals["mixed"].as_u64().unwrap();
    assert_eq!(total, 27);
    let integral = &doc["integral"];
    assert_eq!(
        integral["undirected"].as_u64().unwrap() + integral["directed"].as_u64().unwrap(),
        7
    );
}

#[test]
fn bundled_example_expectations_hold() {
    let out = cayley(&["examples"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(!text.contains("FAIL"), "{text}");
}

#[test]
fn verify_reports_agreement_for_the_small_catalog() {
    let out = cayley(&["verify", "--max-order", "8"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("three routes agree"));
    assert!(text.contains("verified 288 masks"));
}
