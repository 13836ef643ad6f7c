use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn examples() -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "..", "core", "examples"].iter().collect()
}

fn file(rel: &str) -> String {
    examples().join(rel).display().to_string()
}

fn delas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_delas")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn de_re() -> String {
    file("models/de_re.model.json")
}

#[test]
fn check_reports_de_dicto_and_de_re_knowledge() {
    let m = de_re();
    let o = delas(&["check", "--model", &m, "--world", "s", "K{i} P(a)"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "true"));
    let o = delas(&["check", "--model", &m, "--world", "s", "[x := a] K{i} P(x)"]);
    assert_eq!((code(&o), stdout(&o).trim()), (1, "false"));
}

#[test]
fn check_trace_prints_the_evaluation_tree() {
    let o = delas(&["check", "--model", &de_re(), "--world", "s", "--trace", "[x := a] K{i} P(x)"]);
    let out = stdout(&o);
    assert!(out.contains("false [x := a] K{i} P(x)  @ s  (x := o1)"), "{out}");
    assert!(out.contains("    false P(x)  @ t"), "{out}");
}

#[test]
fn check_structured_output_is_json() {
    let o = delas(&[
        "check", "--model", &de_re(), "--world", "t", "--assign", "y=o2", "--format", "structured", "--trace",
        "P(y)",
    ]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"], true);
    assert_eq!(v["assignment"], "{y=o2}");
    assert_eq!(v["explanation"]["world"], "t");
}

#[test]
fn input_errors_exit_with_two() {
    let m = de_re();
    let o = delas(&["check", "--model", &m, "--world", "q", "K{i} P(a)"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("no world `q`"), "{}", stderr(&o));
    for args in [
        vec!["check", "--model", &m, "--world", "s", "K{i} P(a"],
        vec!["check", "--model", &m, "--world", "s", "P(x)"],
        vec!["check", "--model", &m, "--world", "s", "--assign", "x=o9", "P(x)"],
        vec!["check", "--model", "/nonexistent.json", "--world", "s", "true"],
        vec!["check", "--model", &m, "true"],
        vec!["falsify", "--bounds", "worlds=0", "true"],
        vec!["falsify", "--class", "reflexive", "true"],
        vec!["frobnicate"],
    ] {
        assert_eq!(code(&delas(&args)), 2, "{args:?}");
    }
}

#[test]
fn update_output_chains_into_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("product.model.json");
    let out_s = out.display().to_string();
    let o = delas(&[
        "update",
        "--model",
        &file("models/password_core.model.json"),
        "--event",
        &file("events/password_one.event.json"),
        "--assign",
        "x=12",
        "--output",
        &out_s,
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["worlds"], serde_json::json!(["(s,e)", "(t,f)"]));
    let o = delas(&["check", "--model", &out_s, "--world", "(s,e)", "Kv{1} c & ~Kv{2} c"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "true"));
}

#[test]
fn update_is_deterministic_and_warns_on_empty_products() {
    let args = ["update", "--model", &de_re(), "--event", &file("events/identity.event.json")];
    let (a, b) = (delas(&args), delas(&args));
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
    let v: Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["worlds"], serde_json::json!(["(s,e)", "(t,e)"]));
    let o = delas(&["update", "--model", &de_re(), "--event", &file("events/fail.event.json")]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("warning"));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["worlds"], serde_json::json!([]));
}

#[test]
fn reduce_prints_the_static_translation() {
    let o = delas(&["reduce", "[! P(a)] K{i} P(a)"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "P(a) -> K{i} (P(a) -> P(a))"));
    let o = delas(&["reduce", "--trace", "[! P(a)] K{i} P(a)"]);
    let out = stdout(&o);
    assert!(out.contains("AK") && out.contains("AATOM"), "{out}");
    let o = delas(&["reduce", "--format", "structured", "--trace", "[x := a] P(x)"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["output"], "[x := a] P(x)");
    assert_eq!(v["trace"], serde_json::json!([]));
}

#[test]
fn reduce_reads_event_files() {
    let o = delas(&["reduce", "--event", &file("events/identity.event.json"), "[I @ e] P(a)"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "true -> P(a)"));
}

#[test]
fn prove_accepts_the_corpus() {
    for name in ["dbaseq", "cnecas", "eas", "subaseq", "necas_prime"] {
        let o = delas(&["prove", &file(&format!("proofs/{name}.proof"))]);
        assert_eq!(code(&o), 0, "{name}: {}", stdout(&o));
        assert!(stdout(&o).starts_with("ok SBELAS: "));
    }
}

#[test]
fn prove_rejects_a_bad_line_with_its_number() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.proof");
    std::fs::write(&path, "system SBELAS\n1. P(a) -> P(a) ; axiom TAUT\n2. K{i} P(a) ; axiom TAUT\n").unwrap();
    let p = path.display().to_string();
    let o = delas(&["prove", &p]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("line 2"), "{}", stdout(&o));
    let o = delas(&["prove", "--format", "structured", &p]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((v["ok"].clone(), v["line"].clone()), (Value::Bool(false), Value::from(2)));
}

#[test]
fn falsify_carries_the_caveat() {
    let o = delas(&["falsify", "[x := a] x ~ a"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("valid within bounds is not a validity proof"));
    let o = delas(&["falsify", "--format", "structured", "[x := a] x ~ a"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["caveat"], "valid within bounds is not a validity proof");
}

#[test]
fn falsify_writes_the_countermodel() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cm.model.json");
    let out_s = out.display().to_string();
    let o = delas(&["falsify", "--output", &out_s, "K{i} P(a) -> P(a)"]);
    assert_eq!(code(&o), 1);
    let w = stdout(&o).lines().next().unwrap().trim_start_matches("countermodel: world ").split(' ').next().unwrap().to_string();
    let check = delas(&["check", "--model", &out_s, "--world", &w, "K{i} P(a) -> P(a)"]);
    assert_eq!((code(&check), stdout(&check).trim()), (1, "false"));
    let o = delas(&["falsify", "--class", "epistemic", "--bounds", "worlds=3", "K{i} P(a) -> P(a)"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn sampled_falsify_is_deterministic() {
    let args = ["falsify", "--samples", "30", "--seed", "4", "--bounds", "worlds=3,domain=3", "K{i} P(a) -> P(a)"];
    let (a, b) = (delas(&args), delas(&args));
    assert_eq!(code(&a), 1);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn fuzz_reports_per_schema_counts() {
    let o = delas(&["fuzz", "--system", "SBELAS5", "--count", "2", "--format", "structured"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let schemas = v["schemas"].as_array().unwrap();
    assert!(schemas.iter().any(|s| s["schema"] == "T" && s["passed"] == 2));
    assert_eq!(v["failures"], serde_json::json!([]));
    assert_eq!(code(&delas(&["fuzz", "--system", "SXYZ"])), 2);
}
