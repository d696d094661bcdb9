use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ibclab"));
    c.env_remove("IBCLAB_TOL");
    c
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("elapsed_seconds");
    v
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn green_suite_passes_and_reports_anchors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("green.json");
    let o = run(&["run", "--config", s(&configs().join("green.json")), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert_eq!(r["suite"], "framework");
    let checks = r["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        assert_eq!(c["pass"], true, "{c}");
        assert!(!c["anchor"].as_str().unwrap().is_empty());
    }
    assert_eq!(r["config"]["seed"], 7);
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        let o = run(&["run", "--config", s(&configs().join("resolvents.json")), "--out", s(out)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (ra, rb) = (without_timing(report(&a)), without_timing(report(&b)));
    assert_eq!(serde_json::to_string(&ra).unwrap(), serde_json::to_string(&rb).unwrap());
}

#[test]
fn seed_flag_overrides_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&["run", "--config", s(&configs().join("green.json")), "--seed", "99", "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    let r = report(&out);
    assert_eq!(r["config"]["seed"], 99);
    assert_eq!(r["config"]["model"]["seed"], 99);
}

#[test]
fn nonsymmetric_relation_fails_classification() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    let o = run(&["run", "--config", s(&configs().join("classify_nonsymmetric.json")), "--out", s(&out)]);
    assert_eq!(code(&o), 1);
    let r = report(&out);
    let failing: Vec<&str> = r["checks"].as_array().unwrap().iter().filter(|c| c["pass"] == false).map(|c| c["name"].as_str().unwrap()).collect();
    assert!(failing.contains(&"rel_is_symmetric"), "{failing:?}");
}

#[test]
fn point_sweep_writes_one_row_per_quadruple_and_lambda() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, rep) = (dir.path().join("s.csv"), dir.path().join("s.json"));
    let o = run(&["sweep", "--config", s(&configs().join("point_sweep.json")), "--out", s(&csv), "--report", s(&rep)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut rd = csv::Reader::from_path(&csv).unwrap();
    let header = rd.headers().unwrap().clone();
    assert_eq!(&header[0], "alpha_re");
    let sym = header.iter().position(|h| h == "symmetric").unwrap();
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 16 * 2);
    let key = |r: &csv::StringRecord| (0..10).map(|i| r[i].parse::<f64>().unwrap()).collect::<Vec<_>>();
    for w in rows.windows(2) {
        assert!(key(&w[0]) <= key(&w[1]));
    }
    // (0, 1, 1, 0), (0, 1, 1, -1) and (1, 1, 1, 0) satisfy the symmetry conditions
    let symmetric: Vec<Vec<f64>> = rows.iter().filter(|r| &r[sym] == "true").map(|r| key(r)[..8].to_vec()).collect();
    assert!(symmetric.contains(&vec![0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0]));
    assert!(symmetric.contains(&vec![0.0, 0.0, 1.0, 0.0, 1.0, 0.0, -1.0, 0.0]));
    assert_eq!(symmetric.len(), 3 * 2);
    assert!(!symmetric.contains(&vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0]));
    assert_eq!(report(&rep)["suite"], "sweep");
}

#[test]
fn setting_sweep_gates_symmetric_quadruples() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sweep.json",
        r#"{"model": {"kind": "random_setting", "n": 6, "n_boundary": 2}, "suite": "sweep", "seed": 5,
            "sweep": {"random_symmetric": 4, "random_generic": 3}}"#,
    );
    let csv = dir.path().join("s.csv");
    let o = run(&["sweep", "--config", s(&cfg), "--out", s(&csv)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv::Reader::from_path(&csv).unwrap().records().count();
    assert_eq!(rows, 7);
}

fn toy_document(dir: &Path) -> PathBuf {
    write(
        dir,
        "toy.json",
        r#"{"dims": {"h": 1, "boundary": 1}, "weights": {"h": [1.0], "boundary": [1.0]},
            "L": [[[2.0, 0.0]]], "A": [[[1.0, 0.0]]], "I": [[[0.5, 0.0]]], "T": [[[0.0, 0.0]]], "lambda0": -1.0}"#,
    )
}

#[test]
fn one_dimensional_spectrum_matches_hand_arithmetic() {
    let dir = tempfile::tempdir().unwrap();
    toy_document(dir.path());
    let cfg = write(dir.path(), "cfg.json", r#"{"model": {"kind": "from_file", "path": "toy.json"}, "suite": "assumptions"}"#);
    let out = dir.path().join("spec.csv");
    let o = run(&["spectrum", "--config", s(&cfg), "--operator", "l", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index,eigenvalue");
    assert_eq!(lines.len(), 2);
    let ev: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((ev - 2.0).abs() < 1e-12);
}

#[test]
fn polaron_free_spectrum_is_nonnegative() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("spec.csv");
    let o = run(&["spectrum", "--config", s(&configs().join("polaron_spectrum.json")), "--operator", "l", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut rd = csv::Reader::from_path(&out).unwrap();
    let ev: Vec<f64> = rd.records().map(|r| r.unwrap()[1].parse().unwrap()).collect();
    assert_eq!(ev.len(), 8 + 64);
    assert!(ev.iter().all(|e| *e >= 0.0));
    assert!(ev.windows(2).all(|w| w[0] <= w[1]));
    // H01 is bounded below by a finite value
    let o = run(&["spectrum", "--config", s(&configs().join("polaron_spectrum.json")), "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    let first: f64 = csv::Reader::from_path(&out).unwrap().records().next().unwrap().unwrap()[1].parse().unwrap();
    assert!(first.is_finite());
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let noseed = write(dir.path(), "a.json", r#"{"model": {"kind": "random_setting", "n": 8, "n_boundary": 3}, "suite": "green"}"#);
    assert_eq!(code(&run(&["run", "--config", s(&noseed)])), 2);
    let typo = write(dir.path(), "b.json", r#"{"model": {"kind": "point_interaction"}, "suite": "robin", "sed": 1}"#);
    assert_eq!(code(&run(&["run", "--config", s(&typo)])), 2);
    let mismatch = write(dir.path(), "c.json", r#"{"model": {"kind": "random_setting", "n": 4, "n_boundary": 2}, "seed": 1, "suite": "polaron_bounds"}"#);
    let out = dir.path().join("err.json");
    assert_eq!(code(&run(&["run", "--config", s(&mismatch), "--out", s(&out)])), 2);
    assert!(report(&out)["error"].as_str().unwrap().contains("polaron"));
    let point = write(dir.path(), "d.json", r#"{"model": {"kind": "point_interaction"}, "suite": "green"}"#);
    assert_eq!(code(&run(&["run", "--config", s(&point)])), 2);
    assert_eq!(code(&run(&["run", "--config", s(&dir.path().join("missing.json"))])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    let o = bin().env("IBCLAB_TOL", "tiny").args(["run", "--config", s(&configs().join("green.json"))]).output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn tolerance_from_environment_reaches_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = bin().env("IBCLAB_TOL", "1e-9").args(["run", "--config", s(&configs().join("green.json")), "--out", s(&out)]).output().unwrap();
    assert_eq!(code(&o), 0);
    let r = report(&out);
    assert_eq!(r["config"]["tol"], 1e-9);
    let o = bin().env("IBCLAB_TOL", "1e-9").args(["run", "--config", s(&configs().join("green.json")), "--tol", "1e-8", "--out", s(&out)]).output().unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(report(&out)["config"]["tol"], 1e-8);
}

#[test]
fn point_model_robin_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "p.json",
        r#"{"model": {"kind": "moshinsky_yafaev"}, "suite": "robin",
            "params": {"alpha": [1, 0], "beta": [0, 0], "gamma": [0, 0], "delta": [-1, 0]}, "lambdas": [[-1, 0], [-4, 0]]}"#,
    );
    let out = dir.path().join("r.json");
    let o = run(&["run", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert!(r["checks"].as_array().unwrap().iter().any(|c| c["name"].as_str().unwrap().starts_with("params at -1")));
}

#[test]
fn classify_selfadjoint_relation_from_document() {
    let dir = tempfile::tempdir().unwrap();
    // (x, y) in R iff y = 0: the Dirichlet-type relation {(f, 0)} on a 1-dim boundary
    write(
        dir.path(),
        "toy.json",
        r#"{"dims": {"h": 2, "boundary": 1}, "weights": {"h": [1.0, 1.0], "boundary": [1.0]},
            "L": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [3.0, 0.0]]], "A": [[[1.0, 0.0], [1.0, 0.0]]],
            "I": [[[0.5, 0.0]], [[0.0, 0.0]]], "T": [[[0.0, 0.0]]], "lambda0": -1.0,
            "relations": [{"name": "first", "basis": [[[1.0, 0.0]], [[0.0, 0.0]]]}]}"#,
    );
    let cfg = write(dir.path(), "cfg.json", r#"{"model": {"kind": "from_file", "path": "toy.json"}, "suite": "classify", "relation": {"kind": "named", "name": "first"}}"#);
    let out = dir.path().join("r.json");
    let o = run(&["run", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert!(r["checks"].as_array().unwrap().iter().any(|c| c["name"] == "verdicts_agree" && c["pass"] == true));
}
