use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn falforge(args: &[&str], seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_falforge"));
    cmd.args(args);
    match seed {
        Some(s) => cmd.env("FALFORGE_SEED", s),
        None => cmd.env_remove("FALFORGE_SEED"),
    };
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn generate(dir: &TempDir, base: &str, grow: usize, seed: &str) -> PathBuf {
    let path = dir.path().join(format!("{base}-{grow}-{seed}.json"));
    let g = grow.to_string();
    let o = falforge(&["generate", "--base", base, "--grow", &g, "--out", s(&path)], Some(seed));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    path
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn parse_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"vertices\": [").unwrap();
    let o = falforge(&["pack", "--input", s(&bad), "--out", s(&dir.path().join("o"))], None);
    assert_eq!(code(&o), 2);
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
}

#[test]
fn validation_errors_exit_3() {
    let dir = TempDir::new().unwrap();
    let tet = generate(&dir, "tetrahedron", 0, "0");
    let out = dir.path().join("o");
    let o = falforge(&["pack", "--input", s(&tet), "--geometry", "hyperbolic", "--out", s(&out)], None);
    assert_eq!(code(&o), 3, "geometry mismatch");
    for delta in ["0", "-1"] {
        let o = falforge(
            &["plan", "--input", s(&tet), "--epsilon", "1", "--bigR", "1", "--delta", delta, "--out", s(&out)],
            None,
        );
        assert_eq!(code(&o), 3, "delta {delta}");
    }
    let o = falforge(&["plan", "--input", s(&tet), "--epsilon", "1", "--out", s(&out)], None);
    assert_eq!(code(&o), 3, "missing parameters");
}

#[test]
fn missing_input_is_an_io_error() {
    let dir = TempDir::new().unwrap();
    let o = falforge(&["pack", "--input", s(&dir.path().join("nope.json")), "--out", s(&dir.path().join("o"))], None);
    assert_eq!(code(&o), 1);
}

#[test]
fn non_convergence_exits_4_with_trace() {
    let dir = TempDir::new().unwrap();
    let torus = generate(&dir, "torus", 15, "3");
    let o = falforge(&["pack", "--input", s(&torus), "--max-iters", "5", "--out", s(&dir.path().join("o"))], None);
    assert_eq!(code(&o), 4);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("sweep"), "{err}");
}

#[test]
fn artifacts_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let torus = generate(&dir, "torus", 6, "5");
    let runs: Vec<PathBuf> = (0..2)
        .map(|i| {
            let out = dir.path().join(format!("run{i}"));
            let o = falforge(
                &[
                    "plan",
                    "--input",
                    s(&torus),
                    "--epsilon",
                    "1.718281828459045",
                    "--bigR",
                    "2",
                    "--delta",
                    "1",
                    "--render",
                    "--out",
                    s(&out),
                ],
                None,
            );
            assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
            out
        })
        .collect();
    let names = [
        "nerve.json",
        "label.json",
        "layout.json",
        "residuals.json",
        "scoop.json",
        "fal.json",
        "plan.json",
        "certificate.json",
        "report.txt",
        "packing.svg",
        "fal.svg",
    ];
    for name in names {
        let a = std::fs::read(runs[0].join(name)).unwrap();
        let b = std::fs::read(runs[1].join(name)).unwrap();
        assert!(!a.is_empty(), "{name} empty");
        assert_eq!(a, b, "{name} differs between runs");
    }
    let sequential = dir.path().join("seq");
    let o = falforge(
        &[
            "plan",
            "--input",
            s(&torus),
            "--epsilon",
            "1.718281828459045",
            "--bigR",
            "2",
            "--delta",
            "1",
            "--sequential",
            "--out",
            s(&sequential),
        ],
        None,
    );
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read(sequential.join("plan.json")).unwrap(), std::fs::read(runs[0].join("plan.json")).unwrap());
}

#[test]
fn tetrahedron_plan_certifies() {
    let dir = TempDir::new().unwrap();
    let tet = generate(&dir, "tetrahedron", 0, "0");
    let out = dir.path().join("o");
    let o = falforge(
        &[
            "plan",
            "--input",
            s(&tet),
            "--epsilon",
            "1.718281828459045",
            "--bigR",
            "1",
            "--delta",
            "1",
            "--out",
            s(&out),
        ],
        None,
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let cert = read_json(&out.join("certificate.json"));
    assert_eq!(cert["passed"], Value::Bool(true));
    assert_eq!(cert["n_circles"], 6);
    assert_eq!(cert["required_crossings"], 733);
    let report = std::fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("verdict: PASS"));
    assert_eq!(read_json(&out.join("fal.json"))["components"], 1);
}

#[test]
fn no_reduce_keeps_several_components() {
    let dir = TempDir::new().unwrap();
    let tet = generate(&dir, "tetrahedron", 0, "0");
    let out = dir.path().join("o");
    let o = falforge(&["build", "--input", s(&tet), "--no-reduce", "--out", s(&out)], None);
    assert_eq!(code(&o), 0);
    let fal = read_json(&out.join("fal.json"));
    assert!(fal["components"].as_u64().unwrap() > 1);
}

#[test]
fn large_delta_gives_small_threshold() {
    let dir = TempDir::new().unwrap();
    let tet = generate(&dir, "tetrahedron", 0, "0");
    let out = dir.path().join("o");
    let o = falforge(
        &["plan", "--input", s(&tet), "--epsilon", "1", "--bigR", "1", "--delta", "10", "--out", s(&out)],
        None,
    );
    assert_eq!(code(&o), 0);
    let cert = read_json(&out.join("certificate.json"));
    assert_eq!(cert["passed"], Value::Bool(true));
    let required = cert["required_crossings"].as_u64().unwrap();
    // 6 * max(1.076 + 14.41, 45.2 / (316.2 ln 2) + 14.41) = 92.9...
    assert_eq!(required, 93);
}

#[test]
fn genus_two_builds() {
    let dir = TempDir::new().unwrap();
    let g2 = generate(&dir, "genus2", 0, "0");
    let out = dir.path().join("o");
    let o = falforge(&["build", "--input", s(&g2), "--render", "--out", s(&out)], None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let fal = read_json(&out.join("fal.json"));
    assert_eq!(fal["genus"], 2);
    assert_eq!(fal["ambient_is_s3"], Value::Bool(false));
    assert!(std::fs::read_to_string(out.join("fal.svg")).unwrap().starts_with("<svg"));
}
