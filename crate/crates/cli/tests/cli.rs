use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_symcont"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(format!("{name}.cont"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn check_prints_json_verdicts() {
    let f = fixture("jump_off_sequence");
    let o = run(&["check", f.to_str().unwrap(), "--fn", "f", "--at", "0", "--prop", "all", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let holds: Vec<&str> = v["verdicts"].as_array().unwrap().iter().map(|r| r["holds"].as_str().unwrap()).collect();
    assert_eq!(holds, ["false", "true", "true"]);
    assert_eq!(v["verdicts"][0]["exact_gap"], "2");
    assert_eq!(v["verdicts"][0]["certificate"]["kind"], "witness");
}

#[test]
fn json_keys_are_sorted() {
    let f = fixture("punctured_constant");
    let o = run(&["check", f.to_str().unwrap(), "--fn", "f", "--at", "0", "--format", "json"]);
    let text = stdout(&o);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text);
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn text_output_names_the_certificate() {
    let f = fixture("punctured_constant");
    let o = run(&["check", f.to_str().unwrap(), "--fn", "f", "--at", "0", "--prop", "wc"]);
    let s = stdout(&o);
    assert!(s.starts_with("WC at 0: false"), "{s}");
    assert!(s.contains("gap: 1"), "{s}");
}

#[test]
fn directives_run_without_fn() {
    let f = fixture("sum");
    let o = run(&["check", f.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 6);
}

#[test]
fn syntax_errors_exit_two_with_position() {
    let p = scratch("bad.cont", "fn f on line = piecewise {\n  x > 0 -> 1\n  else -> 0 }\n");
    let o = run(&["check", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("bad.cont:3:3:"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["fuzz", "--theorem", "no-such"]).status.code(), Some(2));
    assert_eq!(run(&["check"]).status.code(), Some(2));
    let f = fixture("sum");
    assert_eq!(run(&["check", f.to_str().unwrap(), "--fn", "nope", "--at", "0"]).status.code(), Some(2));
    assert_eq!(run(&["check", f.to_str().unwrap(), "--fn", "f", "--at", "0", "--prop", "xyz"]).status.code(), Some(2));
}

#[test]
fn undecided_limits_exit_three() {
    let p = scratch("undecided.cont", "fn f on line = piecewise {\n  x > 0 -> sqrt(1/x + 1) - sqrt(1/x),\n  else -> 0\n}\n");
    let o = run(&["check", p.to_str().unwrap(), "--fn", "f", "--at", "0", "--prop", "wsc", "--format", "json"]);
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdicts"][0]["holds"], "unknown");
    assert_eq!(v["verdicts"][0]["certificate"]["kind"], "oracle_hint");
}

#[test]
fn corpus_matches_golden() {
    let o = run(&["corpus"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 diffs: pass"));
}

#[test]
fn relations_pass() {
    let o = run(&["relations", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["items"].as_array().unwrap().len(), 8);
}

#[test]
fn classify_lists_points() {
    let f = fixture("jump_off_sequence");
    let o = run(&["classify", f.to_str().unwrap(), "--fn", "f", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let zero = v.as_array().unwrap().iter().find(|r| r["point"] == "0").unwrap();
    assert_eq!(zero["sc"]["holds"], "false");
}

#[test]
fn fuzz_reports_are_reproducible() {
    let args = ["fuzz", "--theorem", "sum-weak", "--trials", "60", "--seed", "4", "--format", "json"];
    let a = run(&args);
    let b = run(&[&args[..], &["--threads", "1"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v[0]["id"], "sum-weak");
    assert_eq!(v[0]["trials"], 60);
    assert!(!v[0]["violations"].as_array().unwrap().is_empty());
}

#[test]
fn closure_fuzz_passes_at_small_scale() {
    let o = run(&["fuzz", "--theorem", "quotient", "--trials", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("pass"));
}

#[test]
fn probe_refutes_the_jump() {
    let f = fixture("jump_off_sequence");
    let o = run(&["probe", f.to_str().unwrap(), "--fn", "f", "--at", "0", "--prop", "sc", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["refuted"], true);
    assert!((v[0]["gap"].as_f64().unwrap() - 2.0).abs() < 1e-3);
}
