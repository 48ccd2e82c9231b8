use std::path::Path;
use std::process::{Command, Output};
use std::sync::OnceLock;

use serde_json::Value;

fn validator() -> &'static jsonschema::Validator {
    static V: OnceLock<jsonschema::Validator> = OnceLock::new();
    V.get_or_init(|| {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/pca-cli.schema.json");
        let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        jsonschema::validator_for(&schema).expect("schema compiles")
    })
}

fn pca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pca")).args(args).env_remove("PCA_FUEL").output().unwrap()
}

/// Runs a verb expected to print a document, checks it against the schema.
fn doc(args: &[&str], exit: i32) -> Value {
    let out = pca(args);
    assert_eq!(out.status.code(), Some(exit), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).expect("stdout is one JSON document");
    let errors: Vec<String> = validator().iter_errors(&v).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{args:?} violates the schema: {errors:#?}");
    v
}

fn usage_error(args: &[&str]) {
    let out = pca(args);
    assert_eq!(out.status.code(), Some(2), "{args:?}");
    assert!(out.stdout.is_empty(), "{args:?} printed partial output");
    assert!(!out.stderr.is_empty());
}

#[test]
fn k_returns_its_first_argument() {
    let v = doc(&["eval", "(app (app (const k) (const a)) (const b))", "--model", "k1", "--fuel", "1000"], 0);
    assert_eq!(v["result"]["outcome"], "defined");
    assert_eq!(v["result"]["names"], serde_json::json!(["a"]));
    assert_eq!(v["result"]["parameters"], serde_json::json!(["a", "b"]));
}

#[test]
fn eval_compiles_lambda_and_uses_bindings() {
    let v = doc(&["eval", "(app (lam x (app (const not) (var x))) (const t))", "--bind", "t=true"], 0);
    assert!(v["result"]["names"].as_array().unwrap().contains(&"false".into()));
    let w = doc(&["eval", "(app (const i) (const #3))"], 0);
    assert_eq!(w["result"]["names"], serde_json::json!(["#3"]));
}

#[test]
fn eval_reports_exhaustion_without_failing() {
    let v = doc(&["eval", "(app (const diverge) (const k))", "--fuel", "50"], 0);
    assert_ne!(v["result"]["outcome"], "defined");
}

#[test]
fn eval_in_a_finite_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.table");
    std::fs::write(&path, "k=0 s=0\n0\n").unwrap();
    let v = doc(&["eval", "(app (app (const k) (const 0)) (const 0))", "--model", path.to_str().unwrap()], 0);
    assert_eq!(v["result"]["value"], "0");
    assert_eq!(v["result"]["model"], "finite-table");
}

#[test]
fn eval_in_the_oracle_model() {
    let v = doc(&["eval", "(app (const plan:representer) (const #2))", "--model", "oracle:successor"], 0);
    assert_eq!(v["result"]["names"], serde_json::json!(["#3"]));
    // plain programs do not speak the dialogue protocol
    let w = doc(&["eval", "(app (const i) (const #2))", "--model", "oracle:successor"], 0);
    assert_eq!(w["result"]["outcome"], "proven-divergent");
    usage_error(&["eval", "(lam x (var x))", "--model", "oracle:successor"]);
}

#[test]
fn compile_abstracts_a_variable() {
    let v = doc(&["compile", "(app (var f) (var x))", "--var", "x"], 0);
    assert_eq!(v["result"]["free_vars"], serde_json::json!(["f"]));
    assert_eq!(v["result"]["compiled"], "(app (app (const s) (app (const k) (var f))) (app (app (const s) (const k)) (const k)))");
}

#[test]
fn k1_identity_program() {
    let v = doc(&["k1", "run", "i", "5"], 0);
    assert_eq!(v["result"]["value"], "5");
    assert!(v["fuel_spent"].as_u64().unwrap() > 0);
}

#[test]
fn k2_alpha_hat_on_zeros_and_fuel_from_env() {
    let v = doc(&["k2", "apply", "alpha-hat", "zeros", "--coords", "4"], 0);
    assert_eq!(v["result"]["outcome"]["value"], serde_json::json!([0, 0, 0, 0]));
    let out = Command::new(env!("CARGO_BIN_EXE_pca")).args(["k2", "apply", "beta-hat", "zeros"]).env("PCA_FUEL", "50").output().unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["outcome"]["outcome"], "fuel-exhausted");
}

#[test]
fn friedberg_snapshot_round_trip_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("snap.json");
    let trace = dir.path().join("trace.jsonl");
    let (snap_s, trace_s) = (snap.to_str().unwrap(), trace.to_str().unwrap());
    let v = doc(&["friedberg", "run", "--stages", "300", "--snapshot", snap_s, "--trace", trace_s], 0);
    assert_eq!(v["result"]["stages"], 300);
    let lines = std::fs::read_to_string(&trace).unwrap();
    assert_eq!(lines.lines().count(), 300);
    for l in lines.lines() {
        let ev: Value = serde_json::from_str(l).unwrap();
        assert!(ev["stage"].is_u64());
    }
    let c = doc(&["friedberg", "check", snap_s], 0);
    assert_eq!(c["result"]["stage"], 300);
    assert_eq!(c["result"]["violations"], serde_json::json!([]));
}

#[test]
fn friedberg_find_k_and_refute_s() {
    let v = doc(&["friedberg", "find-k", "--stages", "500", "--samples", "5"], 0);
    let k = v["result"]["code"].as_u64().unwrap();
    assert_eq!(k % 2, 0);
    let r = doc(&["friedberg", "refute-s", "--code", &k.to_string(), "--budget", "500"], 0);
    assert_eq!(r["result"]["witness"]["phase"], 1);
}

#[test]
fn oracle_representer_returns_the_oracle_value() {
    let four = doc(&["eval", "(const #4)"], 0)["result"]["value"].clone();
    let v = doc(&["oracle", "run", "plan:representer", "#3", "--oracle", "successor"], 0);
    assert_eq!(v["result"]["value"], four);
    assert_eq!(v["result"]["protocol"], "ok");
    usage_error(&["oracle", "run", "plan:nope", "#3"]);
}

#[test]
fn refuters_exit_zero_on_witness_and_one_otherwise() {
    for verb in ["halting", "separator", "extension"] {
        let v = doc(&["refute", verb, "--family"], 0);
        for r in v["result"]["results"].as_array().unwrap() {
            assert_eq!(r["replays"], true, "{verb}: {r}");
        }
    }
    doc(&["refute", "precomplete"], 0);
    let bad = doc(&["refute", "halting", "i"], 1);
    assert!(bad["result"]["results"][0]["error"].is_string());
}

#[test]
fn finite_search() {
    let v = doc(&["search-finite-pca", "--n", "2"], 0);
    assert_eq!(v["result"]["solutions"], serde_json::json!([]));
    usage_error(&["search-finite-pca", "--n", "9"]);
}

#[test]
fn usage_errors_print_nothing_on_stdout() {
    usage_error(&["frobnicate"]);
    usage_error(&["eval", "(app (const k))"]);
    usage_error(&["eval", "(const k)", "--fuel", "0"]);
    usage_error(&["k2", "apply", "gamma", "zeros"]);
    usage_error(&["suite", "--only", "12"]);
    usage_error(&["refute", "halting"]);
}

#[test]
fn out_flag_writes_the_document_instead() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("doc.json");
    let out = pca(&["k1", "run", "i", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["result"]["value"], "3");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["suite", "--only", "1,3,4", "--seed", "11"];
    let (a, b) = (pca(&args), pca(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    doc(&args, 0);
}
