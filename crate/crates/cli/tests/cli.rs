use std::collections::BTreeSet;
use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn memotab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_memotab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).trim().to_string()
}

#[test]
fn recognize_exit_codes() {
    let out = memotab(&["recognize", "--grammar", "johnson", "Sandy", "'s", "professor", "knows", "Kim"]);
    assert_eq!((out.status.code(), stdout(&out).as_str()), (Some(0), "accepted"));
    let out = memotab(&["recognize", "--grammar", "johnson", "Kim"]);
    assert_eq!((out.status.code(), stdout(&out).as_str()), (Some(1), "rejected"));
    let out = memotab(&["recognize", "--grammar", "sml"]);
    assert_eq!((out.status.code(), stdout(&out).as_str()), (Some(0), "accepted"));
}

#[test]
fn usage_and_file_errors_exit_2() {
    assert_eq!(memotab(&["recognize"]).status.code(), Some(2));
    assert_eq!(memotab(&["recognize", "--grammar", "/no/such/file"]).status.code(), Some(2));
    assert_eq!(memotab(&["bench", "--lengths", "x"]).status.code(), Some(2));
    assert_eq!(memotab(&["demo", "fib", "-1"]).status.code(), Some(2));
    assert_eq!(memotab(&["demo", "fib", "ten"]).status.code(), Some(2));
    assert_eq!(memotab(&["demo", "nope"]).status.code(), Some(2));
}

#[test]
fn grammar_and_input_files() {
    let mut grammar = tempfile::NamedTempFile::new().unwrap();
    write!(grammar, "# balanced\nS = S \"(\" S \")\" | eps ;\n").unwrap();
    let mut input = tempfile::NamedTempFile::new().unwrap();
    writeln!(input, "( ( )\n ) ( )").unwrap();
    let g = grammar.path().to_str().unwrap();
    let i = input.path().to_str().unwrap();
    let out = memotab(&["recognize", "--grammar", g, "--input", i]);
    assert_eq!((out.status.code(), stdout(&out).as_str()), (Some(0), "accepted"));
    let out = memotab(&["recognize", "--grammar", g, "(", "("]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn grammar_errors_are_reported() {
    let mut grammar = tempfile::NamedTempFile::new().unwrap();
    write!(grammar, "S = X ;").unwrap();
    let out = memotab(&["recognize", "--grammar", grammar.path().to_str().unwrap(), "a"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("undefined nonterminal `X`"));
}

fn chart_doc(args: &[&str]) -> Value {
    let out = memotab(args);
    assert_eq!(out.status.code(), Some(0));
    serde_json::from_slice(&out.stdout).expect("chart output is JSON")
}

#[test]
fn chart_of_empty_input() {
    let doc = chart_doc(&["chart", "--grammar", "sml"]);
    assert_eq!(doc["accepted"], Value::Bool(true));
    let sml = doc["charts"]["sml"].as_array().unwrap();
    assert_eq!(sml.len(), 1);
    assert_eq!(sml[0]["key"], 0);
    assert_eq!(sml[0]["results"], serde_json::json!([0]));
    assert_eq!(sml[0]["result_remainders"], serde_json::json!([[]]));
}

#[test]
fn chart_of_sm_on_three() {
    let doc = chart_doc(&["chart", "--grammar", "sm", "a", "a", "a"]);
    let entry = doc["charts"]["sm"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["key"] == 0)
        .unwrap()
        .clone();
    let results: BTreeSet<u64> = entry["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(results, BTreeSet::from([0, 1, 2, 3]));
    assert_eq!(entry["key_remainder"], serde_json::json!(["a", "a", "a"]));
}

#[test]
fn chart_remainders_for_johnson() {
    let doc = chart_doc(&["chart", "--grammar", "johnson", "Sandy", "'s", "professor", "knows", "Kim"]);
    let np = doc["charts"]["np"].as_array().unwrap();
    let full = np.iter().find(|e| e["key"] == 0).unwrap();
    let rems: BTreeSet<String> = full["result_remainders"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r.to_string())
        .collect();
    assert_eq!(
        rems,
        BTreeSet::from([
            r#"["knows","Kim"]"#.to_string(),
            r#"["'s","professor","knows","Kim"]"#.to_string(),
        ])
    );
}

#[test]
fn bench_csv_schema() {
    let out = memotab(&["bench", "--grammars", "sm,sml", "--lengths", "0,3", "--reps", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("grammar,n,seconds,accepted"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    for row in &rows {
        assert_eq!(row.len(), 4);
        assert!(row[2].parse::<f64>().unwrap() >= 0.0);
        assert_eq!(row[3], "true");
    }
    assert_eq!((rows[0][0], rows[0][1]), ("sm", "0"));
    assert_eq!((rows[3][0], rows[3][1]), ("sml", "3"));
}

#[test]
fn bench_table_reports_slopes() {
    let out = memotab(&[
        "bench", "--grammars", "sml", "--lengths", "4,8,16", "--reps", "1", "--format", "table",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("grammar"));
    assert!(text.lines().any(|l| l.starts_with("slope sml ")));
}

#[test]
fn demos() {
    assert_eq!(stdout(&memotab(&["demo", "path", "a"])), "b c");
    assert_eq!(stdout(&memotab(&["demo", "path", "c"])), "");
    assert_eq!(stdout(&memotab(&["demo", "fib", "0"])), "0");
    assert_eq!(stdout(&memotab(&["demo", "fib", "20"])), "6765");
    assert_eq!(stdout(&memotab(&["demo", "fib", "90"])), "2880067194370816120");
}
