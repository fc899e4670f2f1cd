use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use aspic_ground::fixtures::{ADMISSIBILITY_COUNTEREXAMPLE, RUNNING_EXAMPLE};
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_aspic-ground"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str], input: &Path) -> Output {
    bin().args(args).arg(input).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn full_grounding_text_is_stable() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "running.asp", RUNNING_EXAMPLE);
    let o = run(&["ground", "--mode", "full"], &input);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "contrary a(2): b(2).\ncontrary c(2): d(2).\ncontrary n_d(2): e(2).\n\
         e(2) <- c(2).\n\
         n_d(2): c(2) <= a(2).\n\
         assume a(2).\n\
         fact b(1).\nfact f(1,2).\n"
    );
    assert_eq!(stdout(&run(&["ground", "--mode", "full"], &input)), stdout(&o));
}

#[test]
fn naive_grounding_to_file_as_json() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "running.asp", RUNNING_EXAMPLE);
    let out = dir.path().join("out.json");
    let o = bin()
        .args(["ground", "--mode", "naive", "--format", "json", "--out"])
        .arg(&out)
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["strict"].as_array().unwrap().len(), 6);
    assert_eq!(v["defeasible"].as_array().unwrap().len(), 2);
    assert_eq!(v["contraries"].as_array().unwrap().len(), 6);
}

#[test]
fn malformed_input_exits_with_1() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "bad.asp", "p(X <- q.");
    let o = run(&["ground"], &input);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.asp:1:"));
    let unsafe_rule = write(&dir, "unsafe.asp", "p(X) <- q.");
    assert_eq!(run(&["ground"], &unsafe_rule).status.code(), Some(1));
    let missing = dir.path().join("missing.asp");
    assert_eq!(run(&["ground"], &missing).status.code(), Some(1));
}

#[test]
fn solve_complete_claims() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "running.asp", RUNNING_EXAMPLE);
    let o = run(&["solve", "--mode", "full", "--semantics", "com", "--claims-only"], &input);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o), serde_json::json!([["a(2)", "b(1)", "f(1,2)"]]));
    let o = run(&["solve", "--mode", "naive", "--semantics", "stb", "--claims-only"], &input);
    assert_eq!(json(&o), serde_json::json!([]));
}

#[test]
fn solve_full_report() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "counter.asp", ADMISSIBILITY_COUNTEREXAMPLE);
    let o = run(&["solve", "--mode", "naive", "--semantics", "adm"], &input);
    let v = json(&o);
    assert_eq!(v["semantics"], "adm");
    assert_eq!(v["arguments"].as_array().unwrap().len(), 3);
    assert_eq!(v["arguments"][1]["attackers"], serde_json::json!(["A1"]));
    assert_eq!(
        v["extensions"],
        serde_json::json!([[], ["A1"], ["A1", "A3"]])
    );
}

#[test]
fn compare_reports_equal_and_mismatch() {
    let dir = TempDir::new().unwrap();
    let running = write(&dir, "running.asp", RUNNING_EXAMPLE);
    let o = run(&["compare", "--semantics", "com", "--against", "t2"], &running);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["results"][0]["equal"], true);
    let o = run(&["compare", "--semantics", "com", "--level", "claims", "--against", "full"], &running);
    assert_eq!(o.status.code(), Some(0));

    let counter = write(&dir, "counter.asp", ADMISSIBILITY_COUNTEREXAMPLE);
    let o = run(&["compare", "--semantics", "adm", "--against", "t2"], &counter);
    assert_eq!(o.status.code(), Some(3));
    let r = &json(&o)["results"][0];
    assert_eq!(r["extra"], serde_json::json!([["c"]]));
    assert_eq!(r["missing"], serde_json::json!([]));
}

#[test]
fn budgets_exit_with_2() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "running.asp", RUNNING_EXAMPLE);
    let o = bin()
        .args(["--arg-budget", "3", "solve", "--mode", "naive"])
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["ground", "--mode", "naive", "--rule-budget", "5"], &input);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["solve", "--semantics", "adm", "--ext-budget", "1"], &input);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dumps_go_to_stderr() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "running.asp", RUNNING_EXAMPLE);
    let o = run(&["ground", "--mode", "t2", "--dump-datalog", "--dump-af", "--dump-deps"], &input);
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    assert!(err.contains("__r3(X) :- a(X), not d(X)."));
    assert!(err.contains("att(A3,A3)."));
    assert!(err.contains("digraph"));
    assert!(!stdout(&o).contains("att("));
}

#[test]
fn gen_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.asp");
    let b = dir.path().join("b.asp");
    for p in [&a, &b] {
        let o = bin()
            .args(["gen", "--seed", "7", "--strict", "5", "--defeasible", "5", "--contraries", "7", "--out"])
            .arg(p)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
    }
    let text = fs::read(&a).unwrap();
    assert_eq!(text, fs::read(&b).unwrap());
    let t = aspic_ground::parse_theory(std::str::from_utf8(&text).unwrap()).unwrap();
    assert_eq!((t.strict.len(), t.defeasible.len(), t.contraries.len()), (5, 5, 7));
    // Generated files are accepted by the other subcommands.
    assert_eq!(run(&["ground"], &a).status.code(), Some(0));
}

#[test]
fn gen_kb_only_and_bad_config() {
    let o = bin()
        .args(["gen", "--strict", "0", "--defeasible", "0", "--contraries", "0", "--kb", "10"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let t = aspic_ground::parse_theory(&stdout(&o)).unwrap();
    assert_eq!(t.facts.len() + t.assumptions.len(), 10);
    assert_eq!(t.rule_count(), 0);
    let o = bin().args(["gen", "--min-constant", "5", "--max-constant", "1"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}
