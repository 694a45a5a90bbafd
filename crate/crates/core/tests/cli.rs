//! End-to-end tests of the `swsec` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use swsec::cli::{CliError, EXIT_INVARIANT};
use swsec::Error;

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn swsec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swsec"))
        .args(args)
        .env_remove("SOURCE_DATE_EPOCH")
        .output()
        .expect("binary runs")
}

fn run_config(cmd: &[&str], cfg: &Path, extra: &[&str]) -> Output {
    let mut args: Vec<&str> = cmd.to_vec();
    args.extend(["--config", cfg.to_str().unwrap()]);
    args.extend(extra);
    swsec(&args)
}

fn structured(cmd: &[&str], cfg: &Path, extra: &[&str]) -> Value {
    let mut args = vec!["--format", "structured"];
    args.extend(extra);
    let out = run_config(cmd, cfg, &args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("structured output is JSON")
}

fn table<'a>(doc: &'a Value, name: &str) -> &'a Value {
    doc["tables"]
        .as_array()
        .unwrap()
        .iter()
        .find(|t| t["name"] == name)
        .unwrap_or_else(|| panic!("no table {name}"))
}

fn column(t: &Value, col: &str) -> Vec<Value> {
    let idx = t["columns"].as_array().unwrap().iter().position(|c| c == col).unwrap();
    t["rows"].as_array().unwrap().iter().map(|r| r[idx].clone()).collect()
}

fn lookup(t: &Value, key: &str) -> f64 {
    t["rows"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r[0] == key)
        .and_then(|r| r[1].as_f64())
        .unwrap_or_else(|| panic!("no row {key}"))
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn info_reports_dsbs_conditional_entropy() {
    let out = run_config(&["info"], &config("dsbs.json"), &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("H(A|C),0.468996\n"), "{text}");
    assert!(text.starts_with("# manifest\nkey,value\ncommand,info\n"));
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let vars = r#""variables": [{"name": "a", "symbols": ["0", "1"]}, {"name": "c", "symbols": ["0", "1"]}]"#;
    let cases = [
        ("short", format!(r#"{{{vars}, "distribution": [0.5, 0.5], "roles": {{"a": "A", "c": "C"}}}}"#), "4"),
        (
            "dup",
            format!(r#"{{{vars}, "distribution": [0.25, 0.25, 0.25, 0.25], "roles": {{"a": "A", "c": "A"}}}}"#),
            "A",
        ),
        ("syntax", "{\n  \"variables\": [,\n}".to_string(), "line 2"),
        (
            "unknown",
            format!(r#"{{{vars}, "distribution": [0.25, 0.25, 0.25, 0.25], "roles": {{"a": "A"}}, "extra": 1}}"#),
            "extra",
        ),
    ];
    for (name, text, needle) in cases {
        let p = write_temp(&dir, &format!("{name}.json"), &text);
        let out = run_config(&["info"], &p, &[]);
        assert_eq!(out.status.code(), Some(2), "{name}: {}", stderr(&out));
        assert!(stderr(&out).contains(needle), "{name}: {}", stderr(&out));
    }
    let out = run_config(&["region", "nonsense"], &config("dsbs.json"), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown region kind"));
    assert_eq!(swsec(&["check", "bogus"]).status.code(), Some(2));
    assert_eq!(swsec(&["info"]).status.code(), Some(2));
}

#[test]
fn failed_preconditions_exit_3() {
    let out = run_config(&["region", "corollary3"], &config("not_markov.json"), &[]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));

    let dir = tempfile::tempdir().unwrap();
    let mut cfg: Value = serde_json::from_str(&std::fs::read_to_string(config("dsbs.json")).unwrap()).unwrap();
    cfg["options"] = json!({"block_lengths": [30]});
    let p = write_temp(&dir, "big.json", &cfg.to_string());
    let out = run_config(&["simulate"], &p, &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("N=30"), "{}", stderr(&out));
}

#[test]
fn invariant_violations_map_to_4() {
    let e = CliError::Core(Error::InvariantViolation("inner above outer".into()));
    assert_eq!(e.exit_code(), EXIT_INVARIANT);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("info.csv");
    let out = run_config(&["info"], &config("dsbs.json"), &["--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("# measures\n"));
}

#[test]
fn echoed_config_reproduces_digest() {
    let first = structured(&["region", "corollary1"], &config("dsbs.json"), &[]);
    let dir = tempfile::tempdir().unwrap();
    let p = write_temp(&dir, "echo.json", &first["config"].to_string());
    let second = structured(&["region", "corollary1"], &p, &[]);
    assert_eq!(first["manifest"]["config_digest"], second["manifest"]["config_digest"]);
    assert_eq!(first["tables"], second["tables"]);
    assert!(first["manifest"]["timestamp"].is_null());
}

#[test]
fn seed_flag_overrides_config() {
    let a = structured(&["info"], &config("dsbs.json"), &["--seed", "42"]);
    let b = structured(&["info"], &config("dsbs.json"), &[]);
    assert_eq!(a["manifest"]["seed"], 42);
    assert_eq!(a["config"]["options"]["seed"], 42);
    assert_ne!(a["manifest"]["config_digest"], b["manifest"]["config_digest"]);
}

#[test]
fn eve_holding_a_leaves_no_equivocation() {
    let doc = structured(&["simulate"], &config("eve_sees_a.json"), &[]);
    let t = table(&doc, "simulation");
    for e in column(t, "equivocation") {
        assert!(e.as_f64().unwrap().abs() <= 1e-9, "{e}");
    }
}

#[test]
fn longer_blocks_decode_better() {
    let doc = structured(&["simulate"], &config("dsbs.json"), &["--seed", "5"]);
    let t = table(&doc, "simulation");
    let n: Vec<u64> = column(t, "n").iter().map(|v| v.as_u64().unwrap()).collect();
    let pe: Vec<f64> = column(t, "p_e").iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(n, [8, 12]);
    assert!(pe[1] <= pe[0], "{pe:?}");
}

#[test]
fn degradedness_verdicts() {
    let feasible = |cfg: &str| {
        let doc = structured(&["check", "degraded"], &config(cfg), &[]);
        column(table(&doc, "degraded"), "feasible")[0].as_bool().unwrap()
    };
    assert!(feasible("cascade.json"));
    assert!(!feasible("not_degraded.json"));
}

#[test]
fn sandwich_holds_on_copy_source() {
    let out = run_config(&["check", "sandwich"], &config("copy_bsc.json"), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn inner_frontier_at_full_charlie_rate() {
    let doc = structured(&["region", "theorem1-inner"], &config("copy_bsc.json"), &[]);
    let t = table(&doc, "evaluations");
    let (ra, rc, d) = (column(t, "ra"), column(t, "rc"), column(t, "delta"));
    let i = (0..ra.len()).find(|&i| ra[i] == 0.0 && rc[i] == 1.0).unwrap();
    // H(A|E) for a BSC(0.25) view of a uniform bit
    assert!((d[i].as_f64().unwrap() - 0.811278124459133).abs() <= 1e-6, "{}", d[i]);
}

#[test]
fn corollary1_on_copy_source() {
    let doc = structured(&["region", "corollary1"], &config("copy_bsc.json"), &[]);
    assert!((lookup(table(&doc, "constants"), "I(A;C)") - 1.0).abs() <= 1e-12);
}

#[test]
fn structured_output_is_deterministic() {
    let runs = [
        (&["region", "theorem1-outer-overapprox"][..], "copy_bsc.json"),
        (&["simulate"], "dsbs.json"),
        (&["check", "markov"], "two_receivers.json"),
    ];
    for (cmd, cfg) in runs {
        let a = structured(cmd, &config(cfg), &["--seed", "9"]);
        let b = structured(cmd, &config(cfg), &["--seed", "9"]);
        assert_eq!(a, b, "{cmd:?}");
    }
}
