use std::path::Path;
use std::process::{Command, Output};

use cpldpc_core::rational::{frac, to_f64};
use cpldpc_core::sim::exhaustive_block_error;
use cpldpc_core::EnsembleParams;
use serde_json::Value;

fn cpldpc(out_dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpldpc"))
        .args(args)
        .env("CPLDPC_OUT_DIR", out_dir)
        .current_dir(out_dir)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn manifest(out_dir: &Path, cmd: &str) -> Value {
    let text = std::fs::read_to_string(out_dir.join(format!("{cmd}.manifest.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn classify_prints_label_and_discriminant() {
    let dir = tempfile::tempdir().unwrap();
    let o = cpldpc(dir.path(), &["pde", "classify", "--y", "2", "--z", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "hyperbolic 5\n");
    let o = cpldpc(dir.path(), &["pde", "classify", "--y", "3", "--z", "2"]);
    assert_eq!(stdout(&o), "elliptic -63/4\n");
    let o = cpldpc(dir.path(), &["pde", "classify", "--y", "2", "--z", "2"]);
    assert_eq!(stdout(&o), "parabolic 0\n");
    let m = manifest(dir.path(), "pde-classify");
    assert_eq!(m["cmd"], "pde-classify");
    assert_eq!(m["args"][0], "pde");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cpldpc(dir.path(), &["pde", "classify", "--y", "2"]).status.code(), Some(1));
    assert_eq!(cpldpc(dir.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(cpldpc(dir.path(), &["--help"]).status.code(), Some(0));
    assert_eq!(cpldpc(dir.path(), &["errprob", "eval", "--n", "4", "--r", "1/2", "--eps", "1"]).status.code(), Some(2));
    assert_eq!(cpldpc(dir.path(), &["table", "build", "--n", "5", "--r", "1/3", "--vmax", "2", "--out", "x.cpt"]).status.code(), Some(2));
    assert_eq!(cpldpc(dir.path(), &["table", "verify", "--table", "missing.cpt"]).status.code(), Some(3));
    std::fs::write(dir.path().join("bad.cpt"), "CPTABLE 1\nm=3 vmax=1 base=default\n0 0 0 1/0\n").unwrap();
    let o = cpldpc(dir.path(), &["table", "verify", "--table", "bad.cpt"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":3:"));
}

#[test]
fn resume_reproduces_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = cpldpc(dir.path(), &["table", "build", "--m", "5", "--vmax", "4", "--out", "t.cpt"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let full = std::fs::read(dir.path().join("t.cpt")).unwrap();
    for cut in [40usize, full.len() / 2, full.len() - 5] {
        std::fs::write(dir.path().join("cut.cpt"), &full[..cut]).unwrap();
        let o = cpldpc(dir.path(), &["table", "build", "--m", "5", "--vmax", "4", "--out", "cut.cpt", "--resume"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(std::fs::read(dir.path().join("cut.cpt")).unwrap(), full, "cut at {cut}");
    }
    let m = manifest(dir.path(), "table-build");
    assert!(m["artifact_hashes"].as_object().unwrap().values().next().unwrap().as_str().unwrap().len() == 64);
}

#[test]
fn verify_reports_clean_table() {
    let dir = tempfile::tempdir().unwrap();
    assert!(cpldpc(dir.path(), &["table", "build", "--m", "4", "--vmax", "5", "--out", "t.cpt"]).status.success());
    let o = cpldpc(dir.path(), &["table", "verify", "--table", "t.cpt"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("recurrence violations: 0"), "{text}");
    let m = manifest(dir.path(), "table-verify");
    assert_eq!(m["input_hashes"].as_object().unwrap().len(), 1);
}

#[test]
fn simulate_interval_contains_exhaustive_value() {
    let dir = tempfile::tempdir().unwrap();
    let o = cpldpc(dir.path(), &["simulate", "--n", "3", "--r", "0", "--eps", "1/2", "--trials", "100000", "--seed", "7"]);
    assert!(o.status.success());
    let json: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(json["format"], "cpsim/1");
    assert_eq!(json["rng"], "chacha8");
    assert_eq!(json["epsilon"], "1/2");
    let exact = to_f64(&exhaustive_block_error(&EnsembleParams::new(3, frac(0, 1)).unwrap(), &frac(1, 2)).unwrap());
    let (lo, hi) = (json["ci95"][0].as_f64().unwrap(), json["ci95"][1].as_f64().unwrap());
    assert!(lo <= exact && exact <= hi, "{exact} not in [{lo}, {hi}]");
    assert_eq!(manifest(dir.path(), "simulate")["seed"], 7);
    let again = cpldpc(dir.path(), &["--threads", "3", "simulate", "--n", "3", "--r", "0", "--eps", "1/2", "--trials", "100000", "--seed", "7"]);
    assert_eq!(stdout(&again), stdout(&o));
}

#[test]
fn simulate_forced_failure() {
    let dir = tempfile::tempdir().unwrap();
    let o = cpldpc(dir.path(), &["simulate", "--n", "3", "--r", "0", "--eps", "1", "--trials", "100000", "--seed", "7"]);
    let json: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(json["failures"], 100000);
    assert!(json["ci95"][1].as_f64().unwrap() >= 1.0);
}

#[test]
fn region_csv_has_grid_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = cpldpc(dir.path(), &["pde", "region", "--y-range", "1,4", "--z-range", "1,4", "--grid", "4", "--out", "r.csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("y,z,discriminant,label"));
    assert_eq!(lines.count(), 16);
    assert_eq!(cpldpc(dir.path(), &["pde", "region", "--y-range", "1", "--grid", "4"]).status.code(), Some(1));
}

#[test]
fn audit_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let o = cpldpc(dir.path(), &["pde", "verify-paper-expansion", "--samples", "50", "--seed", "3", "--out", name]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(dir.path().join(name)).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 51);
}

#[test]
fn known_series_and_errprob_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = cpldpc(dir.path(), &["errprob", "known-series", "--n", "5", "--x", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("true"), "{text}");
    let o = cpldpc(dir.path(), &["errprob", "eval", "--n", "4", "--r", "1/2", "--eps", "0"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("0/1"), "{}", stdout(&o));
    let o = cpldpc(dir.path(), &["errprob", "sweep", "--n", "4", "--r", "1/2", "--eps", "0,1/10,1/2", "--out", "s.csv"]);
    assert!(o.status.success());
    let sweep = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert!(sweep.starts_with("epsilon,value,float_value\n0/1,0/1,"));
}

#[test]
fn out_dir_flag_overrides_env() {
    let dir = tempfile::tempdir().unwrap();
    let o = cpldpc(dir.path(), &["--out-dir", "elsewhere", "stopping-sets", "count", "--m", "3", "--v", "2", "--t", "2", "--brute-force"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("18"));
    assert!(dir.path().join("elsewhere/stopping-sets-count.manifest.json").exists());
}
