use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;
use triplekit::json::{element_to_value, table_to_value};
use triplekit::core::grids::rectangular_grid;
use triplekit::core::linalg::{c, CVector};
use triplekit::core::{Element, Factor};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_triplekit"));
    cmd.env_remove("TRIPLEKIT_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p: PathBuf = dir.join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p.to_string_lossy().into_owned()
}

fn spin4(coords: [(f64, f64); 4]) -> Element {
    let v = CVector::from_iterator(4, coords.iter().map(|&(re, im)| c(re, im)));
    Element::from_vector(Factor::spin(4).unwrap(), v).unwrap()
}

#[test]
fn factor_info_examples() {
    let o = run(&["factor-info", r#"{"kind":"spin","dim":4}"#]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("dimension: 4") && s.contains("rank: 2") && s.contains("unitary tripotent: yes"), "{s}");

    let s = stdout(&run(&["factor-info", r#"{"kind":"rect","m":2,"n":3}"#]));
    assert!(s.contains("rank: 2") && s.contains("unitary tripotent: no"), "{s}");

    let s = stdout(&run(&["factor-info", r#"{"kind":"skew","n":5}"#]));
    assert!(s.contains("rank: 2") && s.contains("unitary tripotent: no"), "{s}");

    assert_eq!(code(&run(&["factor-info", r#"{"kind":"octonion"}"#])), 2);
}

#[test]
fn check_exit_codes() {
    let dir = TempDir::new().unwrap();
    let pz = write(dir.path(), "pz.json", &element_to_value(&spin4([(0.5, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.5)])));
    let e0 = write(dir.path(), "e0.json", &element_to_value(&spin4([(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)])));
    let o = run(&["check", "leq", &pz, &e0]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(code(&run(&["check", "leq", &e0, &pz])), 1);

    let half = json!({"factor": {"kind": "rect", "m": 2, "n": 2}, "data": [[[0.5, 0], [0, 0]], [[0, 0], [0, 0]]]});
    let half = write(dir.path(), "half.json", &half);
    let o = run(&["check", "is_tripotent", &half]);
    assert_eq!(code(&o), 1);
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["pass"], json!(false));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"factor\": ").unwrap();
    assert_eq!(code(&run(&["check", "is-tripotent", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["check", "is-tripotent", "missing.json"])), 2);
    assert_eq!(code(&run(&["check", "leq", &pz])), 2);
    assert_eq!(code(&run(&["check", "leq", &pz, &half])), 2);
    assert_eq!(code(&run(&["check", "leq", &half, &half])), 1);
}

#[test]
fn check_configurations() {
    let dir = TempDir::new().unwrap();
    let g = rectangular_grid(2, 2).unwrap();
    let files: Vec<String> = g
        .cells()
        .iter()
        .enumerate()
        .map(|(k, e)| write(dir.path(), &format!("e{k}.json"), &element_to_value(e)))
        .collect();
    let (e11, e12, e21, e22) = (&files[0], &files[1], &files[2], &files[3]);
    assert_eq!(code(&run(&["check", "is-quadrangle", e11, e12, e22, e21])), 0);
    assert_eq!(code(&run(&["check", "is-quadrangle", e11, e12, e21, e22])), 1);
    assert_eq!(code(&run(&["check", "is-orthogonal", e11, e22])), 0);
    assert_eq!(code(&run(&["check", "is-orthogonal", e11, e12])), 1);
    let u = write(dir.path(), "u.json", &element_to_value(&(g.cell(0, 1) + g.cell(1, 0))));
    assert_eq!(code(&run(&["check", "is-trangle", e11, &u, e22])), 0);

    let o = run(&["check", "classify", &u]);
    assert_eq!(code(&o), 0);
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["classification"]["kind"], json!("unitary"));
    assert_eq!(report["classification"]["rank"], json!(2));
}

#[test]
fn reconstruct_spin_recipe() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("report.json");
    let lambda0 = [(std::f64::consts::PI / 5.0).cos(), (std::f64::consts::PI / 5.0).sin()];
    let oracle = json!({"recipe": "spin", "lambda0": lambda0, "rotation_seed": 11}).to_string();
    let o = run(&["--out", out.to_str().unwrap(), "reconstruct", "--factor", r#"{"kind":"spin","dim":4}"#, "--oracle", &oracle]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(report["residuals"]["max"].as_f64().unwrap() <= 1e-8);
    assert!(report["n_samples"].as_u64().unwrap() >= 300);
    assert_eq!(report["branch"], json!("linear"));
    assert_eq!(report["sigma"], json!([0]));
    let l = &report["lambda0"];
    let (re, im) = (l[0].as_f64().unwrap(), l[1].as_f64().unwrap());
    // λ0 is fixed up to sign by the block.
    assert!(((re - lambda0[0]).hypot(im - lambda0[1])).min((re + lambda0[0]).hypot(im + lambda0[1])) < 1e-9);
}

#[test]
fn reconstruct_transpose_recipe_reports_form_3() {
    let o = run(&[
        "reconstruct",
        "--factor",
        r#"{"kind":"rect","m":3,"n":3}"#,
        "--oracle",
        r#"{"recipe":"rect","seed":8,"transpose":true}"#,
    ]);
    assert_eq!(code(&o), 0);
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["form"], json!(3));
    assert_eq!(report["pass"], json!(true));
}

#[test]
fn reconstruct_table_violating_grid_axioms() {
    let dir = TempDir::new().unwrap();
    let g = rectangular_grid(2, 3).unwrap();
    let entries: Vec<(Element, Element)> = g
        .cells()
        .iter()
        .enumerate()
        .map(|(k, e)| (e.clone(), if k == 1 { -e } else { e.clone() }))
        .collect();
    let table = write(dir.path(), "table.json", &table_to_value(&entries));
    let o = run(&["reconstruct", "--factor", r#"{"kind":"rect","m":2,"n":3}"#, "--oracle", &table]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("grid axiom (ii) violated"), "{}", stdout(&o));
}

#[test]
fn reconstruct_input_errors() {
    let f = r#"{"kind":"herm","n":3}"#;
    assert_eq!(code(&run(&["reconstruct", "--factor", f, "--oracle", r#"{"recipe":"identity"}"#])), 2);
    let f = r#"{"kind":"spin","dim":3}"#;
    assert_eq!(code(&run(&["reconstruct", "--factor", f, "--oracle", r#"{"recipe":"rect"}"#])), 2);
    assert_eq!(code(&run(&["reconstruct", "--factor", f, "--oracle", "{"])), 2);
    assert_eq!(code(&run(&["reconstruct", "--factor", f])), 2);
}

#[test]
fn reconstruct_sum_recipe() {
    let factor = json!({"kind": "sum", "components": [{"kind": "spin", "dim": 3}, {"kind": "rect", "m": 2, "n": 2}]});
    let oracle = json!({
        "recipe": "sum",
        "components": [{"recipe": "spin", "phase": 1.0, "rotation_seed": 2, "antilinear": true}, {"recipe": "rect", "seed": 4}],
        "sigma": [1, 0],
    });
    let o = run(&["reconstruct", "--factor", &factor.to_string(), "--oracle", &oracle.to_string()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["sigma"], json!([1, 0]));
    assert_eq!(report["branch"], json!("mixed"));
}

fn demo(args: &[&str]) -> (i32, Value) {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("demo.json");
    let mut full = vec!["--out", out.to_str().unwrap(), "demo", "lorentz"];
    full.extend_from_slice(args);
    let o = run(&full);
    let v = if code(&o) == 0 { serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap() } else { Value::Null };
    (code(&o), v)
}

fn entry(m: &Value, i: usize, j: usize) -> (f64, f64) {
    (m[i][j][0].as_f64().unwrap(), m[i][j][1].as_f64().unwrap())
}

#[test]
fn demo_lorentz_examples() {
    let (c0, v) = demo(&["--rapidity", "0.5", "--axis", "z", "--direction", "0,0,1"]);
    assert_eq!(c0, 0);
    let m = &v["boosted"]["matrix"];
    assert!((entry(m, 0, 0).0 - 0.5f64.exp()).abs() < 1e-12);
    for (i, j) in [(0, 1), (1, 0), (1, 1)] {
        assert_eq!(entry(m, i, j), (0.0, 0.0));
    }
    assert_eq!(v["boosted"]["is_tripotent"], json!(false));
    assert_eq!(v["input"]["is_tripotent"], json!(true));
    assert_eq!(v["polar"]["is_tripotent"], json!(true));
    assert_eq!(v["polar"]["element"], v["input"]["element"]);
    assert!(v["determinant_change"].as_f64().unwrap() < 1e-12);

    let (_, v) = demo(&["--rapidity", "0.5", "--axis", "3", "--direction", "1,0,0"]);
    assert!(v["determinant_change"].as_f64().unwrap() < 1e-12);
    assert_eq!(v["boosted"]["hermitian_idempotent"], json!(false));
    assert_eq!(v["input"]["hermitian_idempotent"], json!(true));

    let (_, v) = demo(&["--rapidity", "0", "--axis", "y", "--direction", "0.6,0,-0.8"]);
    assert_eq!(v["boosted"]["element"], v["input"]["element"]);

    assert_eq!(demo(&["--rapidity", "0.5", "--axis", "w", "--direction", "0,0,1"]).0, 2);
    assert_eq!(demo(&["--rapidity", "0.5", "--axis", "z", "--direction", "0,0,2"]).0, 2);
    assert_eq!(demo(&["--rapidity", "0.5", "--axis", "z", "--direction", "0,1"]).0, 2);
}

fn selftest(dir: &Path, name: &str, args: &[&str], env_seed: Option<&str>) -> (Output, String) {
    let out = dir.join(name);
    let mut cmd = bin();
    cmd.args(["--out", out.to_str().unwrap()]).args(args);
    if let Some(s) = env_seed {
        cmd.env("TRIPLEKIT_SEED", s);
    }
    let o = cmd.output().unwrap();
    let body = std::fs::read_to_string(&out).unwrap_or_default();
    (o, body)
}

#[test]
fn selftest_default_passes() {
    let dir = TempDir::new().unwrap();
    let (o, body) = selftest(dir.path(), "all.json", &["selftest"], None);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("9/9 suites passed"));
    assert!(stdout(&o).contains("timings:"));
    let v: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["pass"], json!(true));
    assert_eq!(v["suites"].as_array().unwrap().len(), 9);
}

#[test]
fn selftest_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let args = ["--seed", "7", "selftest", "--suite", "6", "--suite", "8"];
    let (a, first) = selftest(dir.path(), "a.json", &args, None);
    let (b, second) = selftest(dir.path(), "b.json", &args, None);
    assert_eq!(code(&a), 0);
    assert_eq!(code(&b), 0);
    assert!(!first.is_empty());
    assert_eq!(first, second);
    let (_, other) = selftest(dir.path(), "c.json", &["--seed", "8", "selftest", "--suite", "6", "--suite", "8"], None);
    assert_ne!(first, other);
}

#[test]
fn seed_environment_variable_sets_the_default_only() {
    let dir = TempDir::new().unwrap();
    let (_, body) = selftest(dir.path(), "env.json", &["selftest", "--suite", "3"], Some("42"));
    let v: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["config"]["seed"], json!(42));
    let (_, body) = selftest(dir.path(), "flag.json", &["--seed", "5", "selftest", "--suite", "3"], Some("42"));
    let v: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["config"]["seed"], json!(5));
}

#[test]
fn selftest_tight_tolerance_names_failing_suites() {
    let dir = TempDir::new().unwrap();
    let (o, body) = selftest(dir.path(), "tight.json", &["--tol-abs", "1e-15", "--tol-rel", "1e-15", "selftest", "--suite", "1", "--suite", "5"], None);
    assert_eq!(code(&o), 1);
    let s = stdout(&o);
    assert!(s.contains("[FAIL] 1 triple axiom (c)"), "{s}");
    assert!(s.contains("failed: triple axiom (c), reconstruction round trips"), "{s}");
    let v: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["pass"], json!(false));
}

#[test]
fn rejects_bad_flags() {
    assert_eq!(code(&run(&["--tol-abs", "-1", "selftest"])), 2);
    assert_eq!(code(&run(&["selftest", "--suite", "10"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}
