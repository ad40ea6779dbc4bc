use std::path::Path;
use std::process::{Command, Output};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn ramint(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ramint"))
        .args(args)
        .env("RAMANUJAN_OUTPUT_DIR", dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn column(csv: &str, idx: usize) -> Vec<f64> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn eval_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = ramint(dir.path(), &["eval", "--n", "2", "--x", "1,2,4"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("n,x,value,abs_error,converged"));
    let v = column(&out, 2);
    assert_eq!(v.len(), 3);
    assert!(v.iter().all(|&x| x > 0.0));
    assert!(v.windows(2).all(|w| w[1] < w[0]));

    let o = ramint(dir.path(), &["eval", "--n", "0", "--x", "1"]);
    let v = column(&stdout(&o), 2)[0];
    // mpmath on [-400, 4] plus the closed-form tail below -400
    assert!((v - 0.451_747_320_7).abs() < 1e-9, "{v}");
    assert_eq!(ramint(dir.path(), &["eval", "--n", "0", "--x", "-1"]).status.code(), Some(2));
}

#[test]
fn coeffs_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = ramint(dir.path(), &["coeffs", "--a", "pi", "--n", "0", "--K", "1"]);
    let v = column(&stdout(&o), 1);
    assert!((v[0] - 1.0).abs() < 1e-15 && (v[1] + EULER_GAMMA).abs() < 1e-15);
    let o = ramint(dir.path(), &["coeffs", "--a", "pi", "--n", "2", "--K", "2"]);
    let v = column(&stdout(&o), 1);
    assert_eq!(v[0], 0.0);
    assert!((v[1] - 1.0).abs() < 1e-14);
    // second Taylor coefficient of sin(πz)/π·Γ(2+z) times 2!
    assert!((v[2] - 2.0 * (1.0 - EULER_GAMMA)).abs() < 1e-13);
}

#[test]
fn verify_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = ramint(dir.path(), &["verify", "--only", "turan_shifted_n0"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let json = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["results"].as_array().unwrap().len(), 1);
    assert!(dir.path().join("report.csv").exists());

    let missing = dir.path().join("nope.toml");
    let o = ramint(dir.path(), &["verify", "--config", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn verify_default_suite_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = ramint(dir.path(), &["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn verify_violation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("inverted.toml");
    std::fs::write(
        &cfg,
        "[[check]]\nname = \"x\"\nkind = \"turan_shifted\"\ngrid = [1.0]\ntolerance = 1e-9\nparameters = { n = 0, invert = 1 }\n",
    )
    .unwrap();
    let o = ramint(dir.path(), &["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn figures_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for id in ["1", "2", "3", "4"] {
        let o = ramint(dir.path(), &["figure", "--id", id, "--format", "svg", "--samples", "40"]);
        assert_eq!(o.status.code(), Some(0));
        let csv = dir.path().join(format!("figure{id}.csv"));
        let first = std::fs::read(&csv).unwrap();
        ramint(dir.path(), &["figure", "--id", id, "--samples", "40"]);
        assert_eq!(first, std::fs::read(&csv).unwrap());
        assert!(dir.path().join(format!("figure{id}.svg")).exists());
    }
    assert_eq!(ramint(dir.path(), &["figure", "--id", "5"]).status.code(), Some(2));
}

#[test]
fn scan_alpha_flags_and_evidence() {
    let dir = tempfile::tempdir().unwrap();
    let o = ramint(
        dir.path(),
        &["scan-alpha", "--n", "3", "--alpha", "0.55,0.99", "--x-count", "5", "--max-order", "2"],
    );
    assert_eq!(o.status.code(), Some(0));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("warning: alpha = 0.99"));
    assert!(stdout(&o).lines().skip(1).all(|l| l.starts_with("evidence,")));
}

#[test]
fn tol_override_reaches_quadrature() {
    let dir = tempfile::tempdir().unwrap();
    let loose = column(&stdout(&ramint(dir.path(), &["--tol", "1e-3", "eval", "--n", "1", "--x", "3"])), 3)[0];
    let tight = column(&stdout(&ramint(dir.path(), &["--tol", "1e-13", "eval", "--n", "1", "--x", "3"])), 3)[0];
    assert!(tight < loose);
}

#[test]
fn certificate_and_antiderivative() {
    let dir = tempfile::tempdir().unwrap();
    let v = column(&stdout(&ramint(dir.path(), &["certificate"])), 0)[0];
    assert!((v - 0.5).abs() < 1e-10);
    let o = ramint(dir.path(), &["antideriv", "--x", "0.5,1,2"]);
    let v = column(&stdout(&o), 1);
    assert!(v.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn asym_compare_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = ramint(dir.path(), &["asym-compare", "--n", "1", "--log-x", "15", "--K", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(column(&stdout(&o), 5)[0], 1.0);
}
