use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kgscope::dyadic::FourierField;
use serde_json::Value;
use tempfile::TempDir;

const PASSING: &str = r#"{"species": [{"c": 1.0, "b": 1.0}, {"c": 1.0, "b": 3.0}]}"#;
const DEGENERATE: &str = r#"{"species": [{"c": 1.0, "b": 1.0}, {"c": 1.4142135623730951, "b": 2.0}]}"#;

fn kgscope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kgscope")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    for flag in ["--help", "--version"] {
        let o = kgscope(&[flag]);
        assert_eq!(o.status.code(), Some(0), "{flag}");
        assert!(!o.stdout.is_empty());
    }
    assert_eq!(kgscope(&["analyze", "--help"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_64() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    assert_eq!(kgscope(&["bogus"]).status.code(), Some(64));
    assert_eq!(kgscope(&["analyze", "--no-such-flag"]).status.code(), Some(64));
    assert_eq!(kgscope(&["analyze", "--out", s(&out)]).status.code(), Some(64));

    let missing = dir.path().join("missing.json");
    let o = kgscope(&["analyze", "--config", s(&missing), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.json"));

    let bad = write(dir.path(), "bad.json", "{\"species\": [");
    assert_eq!(kgscope(&["analyze", "--config", s(&bad), "--out", s(&out)]).status.code(), Some(64));
    let negative = write(dir.path(), "neg.json", r#"{"species": [{"c": -1.0, "b": 1.0}]}"#);
    assert_eq!(kgscope(&["analyze", "--config", s(&negative), "--out", s(&out)]).status.code(), Some(64));
    let eps = write(dir.path(), "ok.json", PASSING);
    let o = kgscope(&["volume", "--config", s(&eps), "--eps", "0.9", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn analyze_passing_config_exits_zero_with_outputs() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "sys.json", PASSING);
    let out = dir.path().join("out");
    let o = kgscope(&["analyze", "--config", s(&cfg), "--out", s(&out), "--points", "400"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&out.join("report.json"));
    assert_eq!(report["nondegeneracy"]["pass"], Value::Bool(true));
    let csv = std::fs::read_to_string(out.join("triples/triple_1_1_1.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("s,p_plus,psi"));
    assert_eq!(lines.count(), 400);
    let m = json(&out.join("manifest.json"));
    assert_eq!(m["command"], "analyze");
    assert_eq!(m["exit_code"], 0);
    assert_eq!(m["tool_version"], env!("CARGO_PKG_VERSION"));
    assert!(m["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
    assert!(m["outputs"].as_array().unwrap().iter().any(|v| v == "report.json"));
}

#[test]
fn analyze_degenerate_config_exits_two_and_flags_mass_condition() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "sys.json", DEGENERATE);
    let out = dir.path().join("out");
    let o = kgscope(&["analyze", "--config", s(&cfg), "--out", s(&out), "--points", "400"]);
    assert_eq!(o.status.code(), Some(2));
    let report = json(&out.join("report.json"));
    assert_eq!(report["nondegeneracy"]["pass"], Value::Bool(false));
    let flagged: Vec<&Value> = report["nondegeneracy"]["unsigned"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|f| f["mass_ok"] == Value::Bool(false))
        .collect();
    assert!(!flagged.is_empty());
    let t = &flagged[0]["triple"];
    assert_eq!((t["sigma"].as_i64(), t["mu"].as_i64(), t["nu"].as_i64()), (Some(2), Some(1), Some(1)));
    assert_eq!(flagged[0]["mass_defect"].as_f64(), Some(0.0));
    assert!(out.join("manifest.json").exists());
    assert!(String::from_utf8_lossy(&o.stderr).contains("(+2,+1,+1)"));
}

#[test]
fn verify_zero_count_is_at_most_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "sys.json", PASSING);
    let out = dir.path().join("out");
    let o = kgscope(&[
        "verify-lemmas", "--config", s(&cfg), "--out", s(&out), "--lemma", "zero-count", "--k-lo", "-6", "--k-hi", "6",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&out.join("certification.json"));
    let lemmas = report["lemmas"].as_array().unwrap();
    assert_eq!(lemmas.len(), 1);
    assert_eq!(lemmas[0]["id"], "zero-count");
    for t in lemmas[0]["per_triple"].as_array().unwrap() {
        assert!(t["zeros"].as_u64().unwrap() <= 1, "{t}");
    }
}

#[test]
fn verify_reports_positive_minima_and_refinement() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "sys.json", PASSING);
    let out = dir.path().join("out");
    let o = kgscope(&[
        "verify-lemmas", "--config", s(&cfg), "--out", s(&out), "--lemma", "low-frequency", "--lemma",
        "opposite-pair", "--k-lo", "-4", "--k-hi", "2", "--per-octave", "4", "--n-theta", "16", "--refine",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&out.join("certification.json"));
    assert_eq!(report["refined"], Value::Bool(true));
    for l in report["lemmas"].as_array().unwrap() {
        assert!(l["minimum"].as_f64().unwrap() > 0.0, "{l}");
        assert!(l["relative_change"].as_f64().is_some());
    }
}

#[test]
fn verify_degenerate_config_exits_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "sys.json", DEGENERATE);
    let out = dir.path().join("out");
    let o = kgscope(&[
        "verify-lemmas", "--config", s(&cfg), "--out", s(&out), "--lemma", "zero-count", "--k-lo", "-2", "--k-hi", "2",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(out.join("certification.json").exists());
    assert_eq!(kgscope(&["verify-lemmas", "--config", s(&cfg), "--lemma", "nope"]).status.code(), Some(64));
}

#[test]
fn simulate_linear_run_has_constant_l2_v() {
    let dir = TempDir::new().unwrap();
    let run = r#"{
        "grid": 32, "box": 8.0, "dt": 0.1, "T": 2.0,
        "data": {"type": "gaussian", "amplitude": 0.5, "width": 1.0},
        "species": [{"c": 1.0, "b": 1.0}],
        "coupling": [[[0.0]]],
        "schedule": {"every": 0.5}
    }"#;
    let cfg = write(dir.path(), "run.json", run);
    let out = dir.path().join("out");
    let o = kgscope(&["simulate", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(
        header,
        ["t", "species", "linf_u", "l2_v", "sobolev", "energy", "znorm", "scatter_residual"]
    );
    let l2: Vec<f64> = lines.map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(l2.len(), 5);
    for v in &l2 {
        assert!((v - l2[0]).abs() <= 1e-12 * l2[0], "{l2:?}");
    }
}

#[test]
fn znorm_of_zero_field_prints_zero() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "sys.json", PASSING);
    let field = dir.path().join("zero.bin");
    FourierField::zeros(16, 4.0).unwrap().write(&field).unwrap();
    let out = dir.path().join("out");
    let o = kgscope(&["znorm", "--config", s(&cfg), "--field", s(&field), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "0");
    assert_eq!(json(&out.join("znorm.json"))["znorm"].as_f64(), Some(0.0));
    assert!(out.join("manifest.json").exists());
}

#[test]
fn growth_writes_report_and_csv() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = kgscope(&["growth", "--j", "2", "--rounds", "1", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&out.join("growth.json"));
    let r = &report.as_array().unwrap()[0];
    assert_eq!(r["j"], 2);
    assert!(r["rounds"][0]["l2"].as_f64().unwrap() > 0.0);
    let csv = std::fs::read_to_string(out.join("growth.csv")).unwrap();
    assert!(csv.starts_with("j,round,l2\n"));
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn volume_halving_and_identical_reruns() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "sys.json", DEGENERATE);
    let run = |out: &Path, seed: &str| {
        let o = kgscope(&[
            "volume", "--config", s(&cfg), "--out", s(out), "--seed", seed, "--samples", "200000", "--triple", "2,1,1",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out.join("volume.csv")).unwrap()
    };
    let a = run(&dir.path().join("a"), "5");
    let b = run(&dir.path().join("b"), "5");
    let c = run(&dir.path().join("c"), "6");
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(
        std::fs::read(dir.path().join("a/volume.json")).unwrap(),
        std::fs::read(dir.path().join("b/volume.json")).unwrap()
    );
    let table = json(&dir.path().join("a/volume.json"));
    for r in table["halving_ratios"].as_array().unwrap() {
        let r = r.as_f64().unwrap();
        assert!((1.5..=2.8).contains(&r), "{r}");
    }
}

#[test]
fn analyze_reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "sys.json", PASSING);
    let outs: Vec<PathBuf> = ["a", "b"].iter().map(|n| dir.path().join(n)).collect();
    for out in &outs {
        let o = kgscope(&["analyze", "--config", s(&cfg), "--out", s(out), "--points", "300", "--threads", "1"]);
        assert_eq!(o.status.code(), Some(0));
    }
    let files = json(&outs[0].join("manifest.json"))["outputs"].as_array().unwrap().clone();
    assert!(files.len() > 1);
    for f in files {
        let f = f.as_str().unwrap();
        assert_eq!(std::fs::read(outs[0].join(f)).unwrap(), std::fs::read(outs[1].join(f)).unwrap(), "{f}");
    }
}
