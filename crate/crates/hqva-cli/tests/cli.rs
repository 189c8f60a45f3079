use hqva::fock::derive_brackets;
use hqva::series::q;
use hqva::tau::CartanDatum;
use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn hqva(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hqva")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn verify(cfg: &str, extra: &[&str]) -> (Output, Option<Value>) {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "run.toml", cfg);
    let out = dir.path().join("report.json").to_string_lossy().into_owned();
    let mut args = vec!["verify", "--config", &c, "--out", &out];
    args.extend_from_slice(extra);
    let o = hqva(&args);
    let rep = std::fs::read_to_string(&out).ok().map(|s| serde_json::from_str(&s).unwrap());
    (o, rep)
}

const A1: &str = "seed = 11\n[datum]\nname = \"A1\"\n";

#[test]
fn default_config_on_a1_passes() {
    let (o, rep) = verify(A1, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = rep.unwrap();
    assert_eq!(rep["seed"], 11);
    assert_eq!(rep["config"]["datum"]["name"], "A1");
    let entries = rep["entries"].as_array().unwrap();
    let pass = entries.iter().filter(|e| e["status"] == "pass").count();
    assert_eq!(rep["summary"]["pass"].as_u64().unwrap() as usize, pass);
    assert_eq!(pass, entries.len());
    let suites: Vec<&str> = rep["suites"].as_array().unwrap().iter().map(|s| s["suite"].as_str().unwrap()).collect();
    assert_eq!(suites.len(), 11);
    assert!(!suites.contains(&"fock-brackets"));
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "run.toml", A1);
    let run = || {
        let o = hqva(&["verify", "--config", &c, "--suite", "tau-tech1", "--suite", "serre", "--suite", "unitarity"]);
        assert_eq!(o.status.code(), Some(0));
        o.stdout
    };
    let a = run();
    assert_eq!(a, run());
    let b = Command::new(env!("CARGO_BIN_EXE_hqva"))
        .args(["verify", "--config", &c, "--suite", "tau-tech1", "--suite", "serre", "--suite", "unitarity"])
        .env("HQVA_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(a, b.stdout);
}

#[test]
fn json_config_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "run.json", r#"{"datum": {"a": [[2, -1], [-1, 2]]}, "levels": [1], "suites": ["serre"]}"#);
    let o = hqva(&["verify", "--config", &c]);
    assert_eq!(o.status.code(), Some(0));
    let rep: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep["suites"][0]["suite"], "serre");
}

#[test]
fn config_errors_exit_2() {
    for body in [
        "[datum]\nname = \"A1\"\n[truncation]\nhbar_order = 1\n",
        "suites = [\"nope\"]\n[datum]\nname = \"A1\"\n",
        "[datum]\nname = \"E8\"\n",
        "[datum]\na = [[2, 1], [1, 2]]\n",
        "levels = [\"x\"]\n[datum]\nname = \"A1\"\n",
        "this is not toml",
    ] {
        let (o, rep) = verify(body, &[]);
        assert_eq!(o.status.code(), Some(2), "{body}");
        assert!(rep.is_none());
    }
    let o = hqva(&["verify", "--config", "/nonexistent/run.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn corrupted_level_element_fails() {
    let cfg = "seed = 4\ncorrupt = true\nsuites = [\"tau-tech1\", \"unitarity\", \"qyb\", \"intertwine\", \"s-delta\"]\n[datum]\nname = \"A1\"\n";
    let (o, rep) = verify(cfg, &[]);
    assert_eq!(o.status.code(), Some(1));
    let rep = rep.unwrap();
    assert!(rep["summary"]["fail"].as_u64().unwrap() > 0);
    let failed: Vec<&str> = rep["suites"].as_array().unwrap().iter().filter(|s| s["fail"].as_u64().unwrap() > 0).map(|s| s["suite"].as_str().unwrap()).collect();
    assert!(failed.contains(&"tau-tech1"), "{failed:?}");
}

#[test]
fn opt_in_brackets_suite_reports_failures() {
    let (o, rep) = verify("levels = [1]\n[datum]\nname = \"A1\"\n", &["--suite", "fock-brackets"]);
    assert_eq!(o.status.code(), Some(1));
    let rep = rep.unwrap();
    let es = rep["entries"].as_array().unwrap();
    assert!(es.iter().any(|e| e["status"] == "fail" && e["case"].as_str().unwrap().contains("delta-support")));
    assert!(es.iter().any(|e| e["status"] == "pass" && e["case"].as_str().unwrap().contains("antisymmetry")));
}

#[test]
fn tabulate_tau_row() {
    let o = hqva(&["tabulate", "tau", "--datum", "A1", "--level", "1", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.starts_with("i,j,component,hbar_order,z_power,value,z_prec\n"));
    assert!(s.contains("\n0,0,+-,0,0,1,exact\n"));
    assert!(s.contains("\n0,0,+-,1,-1,2,exact\n"));
}

#[test]
fn tabulate_serre_k0() {
    let o = hqva(&["tabulate", "serre", "--datum", "A2", "--i", "0", "--j", "1", "--k", "0", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "i,j,k,t,hbar_order,value\n0,1,0,0,0,1\n");
    let bad = hqva(&["tabulate", "serre", "--datum", "A2", "--i", "0", "--j", "0"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn tabulate_brackets_matches_derivation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tables");
    let o = hqva(&["tabulate", "brackets", "--datum", "A1", "--level", "1", "--mode-cutoff", "3", "--hbar", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("brackets.csv")).unwrap();
    assert_eq!(csv, derive_brackets(&CartanDatum::a1(), &q(1), 3, 4).unwrap().to_csv());
    let txt = std::fs::read_to_string(out.join("brackets.txt")).unwrap();
    assert_eq!(txt.lines().count(), csv.lines().count());
}

#[test]
fn tabulate_integrability_and_matrix_datum() {
    let o = hqva(&["tabulate", "integrability", "--matrix", "2,-1;-2,2", "--i", "1", "--k", "1", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("i,k,t,hbar_order,value\n1,1,0,0,1\n"));
}

#[test]
fn print_series_text_and_json() {
    let o = hqva(&["print-series", "f0", "--hbar", "1", "--zcap", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "h^0: 1 + 1/24*z^2 + 1/1920*z^4 + O(z^6)\nh^1: 0\n");
    let o = hqva(&["print-series", "shift(z, 2)", "--hbar", "1", "--format", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["terms"], serde_json::json!([[0, 1, "1", "1"], [1, 0, "2", "1"]]));
    let bad = hqva(&["print-series", "f0 +"]);
    assert_eq!(bad.status.code(), Some(2));
}
