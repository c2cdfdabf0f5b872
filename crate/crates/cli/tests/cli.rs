use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freestates")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn word_stats_example() {
    let out = run(&["word", "stats", "-1 -1 2 2 2 -1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    let r = &v["result"];
    assert_eq!(r["length"], 6);
    assert_eq!(r["gamma"], 1);
    assert_eq!(r["u1_length"], 3);
    assert_eq!(r["tau"], 0);
}

#[test]
fn word_transforms() {
    let v = json(&run(&["word", "reduce", "1 2 -2 -1 2"]));
    assert_eq!(v["result"]["word"], "2");
    let v = json(&run(&["word", "inverse", "1 -2"]));
    assert_eq!(v["result"]["word"], "2 -1");
    let v = json(&run(&["word", "beta", "2"]));
    assert_eq!(v["result"]["word"], "1 2");
    let v = json(&run(&["word", "sigma", "1 -2"]));
    assert_eq!(v["result"]["word"], "-1 2");
    let v = json(&run(&["word", "sphere", "--n", "3", "--k", "2"]));
    assert_eq!(v["result"]["count"], 30);
    let v = json(&run(&["word", "sphere", "--k", "3", "--constraint", "positive"]));
    assert_eq!(v["result"]["count"], 8);
}

#[test]
fn classify_example() {
    let v = json(&run(&["state", "classify", "--n", "2", "--a", "0.5", "--b", "1"]));
    assert_eq!(v["result"]["positive_definite"], true);
    assert_eq!(v["result"]["reduced"], false);
}

#[test]
fn state_eval() {
    let v = json(&run(&["state", "eval", "--spec", r#"{"kind":"PhiA","n":2,"a":0.5}"#, "--word", "1 1"]));
    assert!((v["result"]["value"]["re"].as_f64().unwrap() - 0.25).abs() < 1e-15);
}

#[test]
fn series_csv_shape() {
    let out = run(&[
        "state",
        "series",
        "--spec",
        r#"{"kind":"PsiAB","n":2,"a":0.6,"b":0.0}"#,
        "--k-max",
        "5",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,A_brute,B_brute,C_brute,A_closed,B_closed,C_closed,abs_err");
    assert_eq!(lines.len(), 7);
    assert!(!text.contains('\r'));
    let mantissa = lines[2].split(',').nth(1).unwrap().split('e').next().unwrap();
    assert_eq!(mantissa.trim_start_matches('-').replace('.', "").len(), 17);
}

#[test]
fn gram_check_pass_and_fail() {
    let ok = run(&["gram", "check", "--spec", r#"{"kind":"PhiA","n":2,"a":0.6}"#, "--set", "ball:2"]);
    assert_eq!(ok.status.code(), Some(0));
    let v = json(&ok);
    assert_eq!(v["result"]["dim"], 17);
    assert_eq!(v["result"]["is_psd"], true);
    let bad = run(&["gram", "check", "--spec", r#"{"kind":"PsiAB","n":2,"a":0.9,"b":-0.9}"#, "--set", "ball:1"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("witness"));
}

#[test]
fn gram_check_word_file() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "e\n1\n-2 1\n# comment\n2 2").unwrap();
    let arg = format!("@{}", f.path().display());
    let v = json(&run(&["gram", "check", "--spec", r#"{"kind":"U1Length","n":2,"a":0.5}"#, "--set", &arg]));
    assert_eq!(v["result"]["dim"], 4);
}

#[test]
fn structure_and_integer() {
    assert_eq!(run(&["gram", "structure", "--a", "0.6", "--k", "3"]).status.code(), Some(0));
    assert_eq!(run(&["gram", "integer", "--a", "-0.7"]).status.code(), Some(0));
    assert_eq!(run(&["gram", "integer", "--a", "1.0"]).status.code(), Some(2));
}

#[test]
fn algebra_commands() {
    let out = run(&["algebra", "verify-obs", "--n", "3", "--depth", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["violations"].as_array().unwrap().len(), 0);
    let v = json(&run(&["algebra", "convolve", "--x", "1 0 : 1; 1 0 : 2", "--y", "1 0 : -1"]));
    let terms = v["result"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 2);
    let v = json(&run(&["algebra", "adjoint", "--x", "0 1 : 1 2"]));
    assert_eq!(v["result"]["terms"][0]["word"], "-2 -1");
    assert_eq!(v["result"]["terms"][0]["im"], -1.0);
    let v = json(&run(&["algebra", "chi-average", "--word", "1 1 1", "--k", "100"]));
    assert!((v["result"]["average"]["re"].as_f64().unwrap() - 0.97).abs() < 1e-12);
}

#[test]
fn poly_command() {
    let out = run(&[
        "state",
        "poly",
        "--coeffs",
        "-1,0,0,1",
        "--zeros",
        "1:0,-0.5:0.8660254037844386,-0.5:-0.8660254037844386",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let bad = run(&["state", "poly", "--coeffs", "-1,1", "--zeros", "-1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn boundary_commands() {
    let out = run(&["boundary", "verify", "--lambda", "1.3", "--max-len", "3", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("word,integral,phi,abs_err\n"));
    assert_eq!(text.lines().count(), 1 + 53);
    let v = json(&run(&["boundary", "experiment", "--depth", "4"]));
    let r = &v["result"];
    assert!((r["ess_sup_diff"].as_f64().unwrap() - r["ess_inf_sum"].as_f64().unwrap()).abs() < 1e-9);
    assert_eq!(run(&["boundary", "verify", "--lambda", "1.5"]).status.code(), Some(2));
}

#[test]
fn experiment_with_weights_file() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    // uniform measure on the 12 cylinders of depth 2
    for w in ["1 1", "1 2", "1 -2", "-1 -1", "-1 2", "-1 -2", "2 1", "2 -1", "2 2", "-2 1", "-2 -1", "-2 -2"] {
        writeln!(f, "{} : {w}", 1.0 / 12.0).unwrap();
    }
    let arg = format!("@{}", f.path().display());
    let out = run(&["boundary", "experiment", "--depth", "2", "--weights", &arg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(json(&out)["result"]["cylinders_used"].as_u64().unwrap() > 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["word", "stats", "1 0"]).status.code(), Some(2));
    assert_eq!(run(&["word", "stats", "3"]).status.code(), Some(2));
    assert_eq!(run(&["state", "eval", "--spec", "{", "--word", "1"]).status.code(), Some(2));
    assert_eq!(run(&["--format", "xml", "word", "stats", "1"]).status.code(), Some(2));
}

#[test]
fn config_file_and_flag_precedence() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "n = 3\nformat = human").unwrap();
    let cfg = f.path().display().to_string();
    let out = run(&["--config", &cfg, "word", "stats", "3 -2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("length: 2"));
    let out = run(&["--config", &cfg, "--format", "json", "word", "stats", "3"]);
    assert_eq!(json(&out)["result"]["length"], 1);
}

#[test]
fn help_lists_every_subcommand() {
    let text = String::from_utf8(run(&["--help"]).stdout).unwrap();
    for cmd in ["word", "algebra", "state", "gram", "boundary", "reproduce"] {
        assert!(text.contains(cmd), "{cmd} missing from help");
    }
}

#[test]
fn reproduce_is_byte_identical() {
    let a = run(&["reproduce"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let b = run(&["reproduce"]);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 9);
    assert_eq!(v["checks"][8]["status"], "reported");
    assert!(v.get("wall_time_s").is_none());
}
