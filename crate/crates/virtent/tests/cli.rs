//! The binary end to end: exit codes, file outputs and determinism.

use std::path::Path;
use std::process::{Command, Output};

use virtent_core::contour;

fn virtent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_virtent"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn check_passes_and_reports_the_sign_finding() {
    let out = virtent(&["check"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains("FAIL"));
    assert!(text.contains("INFO chi_printed_harmonic_sign"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        virtent(&["entropy", "--q", "nonsense"]).status.code(),
        Some(2)
    );
    assert_eq!(
        virtent(&["figure2", "--m0-min", "5", "--m0-max", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        virtent(&["entropy", "--q", "ext21", "--m0", "-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        virtent(&["trace-check", "--lambda0", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        virtent(&["figure2", "--config", "/nonexistent/virtent.json"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn conditional_and_mutual_values() {
    let out = virtent(&["entropy", "--q", "cond_ext_int"]);
    assert_eq!(out.status.code(), Some(0));
    let finite = json(&out)["finite"].as_f64().unwrap();
    assert!((finite + 0.102).abs() < 1e-3);

    let out = virtent(&["entropy", "--q", "mutual21", "--m0", "1", "--tv", "1"]);
    let finite = json(&out)["finite"].as_f64().unwrap();
    assert_eq!(
        finite,
        virtent_core::entropy::mutual_information_21(
            &virtent_core::loops::SchemeParams::from_tv(1.0, 1.0, 1.0, 1.0).unwrap()
        )
        .compositional
        .finite
    );
    assert!((finite - (1.0 - contour::tau() + 2f64.ln())).abs() < 1e-12);
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn figure_tables_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let svg = dir.path().join("fig.svg");
    for p in [&a, &b] {
        let out = virtent(&[
            "figure2",
            "--steps",
            "40",
            "--out",
            p.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let text = read(&a);
    assert_eq!(text, read(&b));
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# grid: "));
    assert_eq!(
        lines.next().unwrap(),
        "m0,S_total,S_ext,S_int,I,S_ext_plus_S_int"
    );
    assert_eq!(lines.count(), 40);
    assert!(read(&svg).starts_with("<svg"));

    let f3 = dir.path().join("f3.csv");
    let out = virtent(&[
        "figure3",
        "--mu",
        "0.5,1,2",
        "--steps",
        "30",
        "--out",
        f3.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(read(&f3).lines().nth(1).unwrap().split(',').count(), 4);
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"m0": 3.0, "tv": 2.0}"#).unwrap();
    let c = cfg.to_str().unwrap();
    let from_file = json(&virtent(&["entropy", "--q", "ext21", "--config", c]));
    assert_eq!(from_file["m0"].as_f64(), Some(3.0));
    assert_eq!(from_file["tv"].as_f64(), Some(2.0));
    let flagged = json(&virtent(&[
        "entropy", "--q", "ext21", "--config", c, "--m0", "2",
    ]));
    assert_eq!(flagged["m0"].as_f64(), Some(2.0));

    std::fs::write(&cfg, r#"{"bogus": 1}"#).unwrap();
    assert_eq!(
        virtent(&["entropy", "--q", "ext21", "--config", c])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn tau_and_trace_reports() {
    let t = json(&virtent(&["tau"]));
    assert_eq!(t["tau"].as_f64(), Some(contour::tau()));
    let out = virtent(&["trace-check", "--overlap", "0.8", "--e0", "0.3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["passed"].as_bool(), Some(true));
}
