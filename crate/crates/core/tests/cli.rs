use std::path::Path;
use std::process::{Command, Output};

use fibdyn::render::decode_ppm;

fn fibdyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibdyn")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn render_writes_a_ppm() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.ppm");
    let o = fibdyn(&[
        "render", "--mode", "kplus-real", "--c", "0.2", "--window", "-2,2,-2,2", "--size", "30x20", "--out", path(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (w, h, rgb) = decode_ppm(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!((w, h, rgb.len()), (30, 20, 1800));
}

#[test]
fn render_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = fibdyn(&[
            "render", "--mode", "limit-classes", "--c", "0.22", "--window", "-2,2,-2,2", "--size", "40x40", "--format",
            "csv", "--out", path(&out),
        ]);
        assert!(o.status.success());
        std::fs::read(out).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 1600);
}

#[test]
fn bad_arguments_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.ppm");
    let o = fibdyn(&["render", "--mode", "julia", "--c", "0.2", "--window", "-2,2,-2,2", "--size", "4x4", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    assert!(!out.exists());
    let o = fibdyn(&["trace", "--c", "0.3", "--base", "theta", "--side", "stable", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(fibdyn(&["measure", "--c", "0.2", "--set", "kplus", "--box", "disk:1"]).status.code(), Some(2));
}

#[test]
fn fixed_points_prints_json() {
    let o = fibdyn(&["fixed-points", "--c", "0.21"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["fixed_points"].is_object() && v["cycle"].is_object());
    assert!(v.get("parameter_class").is_some());
    let v: serde_json::Value = serde_json::from_str(&stdout(&fibdyn(&["fixed-points", "--c", "-0.5,0.3"]))).unwrap();
    assert!(v.get("parameter_class").is_none());
}

#[test]
fn measure_prints_a_csv_row() {
    let o = fibdyn(&["measure", "--c", "0.2", "--set", "kplus", "--box", "real:-0.4:0.4:-0.4:0.4", "--samples", "500"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[1].starts_with("0.2,kplus,real:-0.4:0.4:-0.4:0.4,500,"), "{}", rows[1]);
}

#[test]
fn explore_marks_output_exploratory() {
    let o = fibdyn(&["explore", "--c-list", "0.2;-0.5,0.1", "--box", "polydisk:1", "--samples", "300", "--budget", "100"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# EXPLORATORY"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 2 * 2);
}

#[test]
fn trace_writes_a_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("wu.csv");
    let o = fibdyn(&["trace", "--c", "0.2", "--base", "p1", "--side", "unstable", "--levels", "20", "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.lines().nth(1) == Some("branch,side,index,x,y") && text.lines().count() > 20);
}

#[test]
fn verify_transitions_passes_and_writes_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let o = fibdyn(&["verify", "transitions", "--c", "0.2", "--certificates", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("34 of 34 inclusions certified"));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 34);
    assert_eq!(fibdyn(&["verify", "transitions", "--c", "0.3"]).status.code(), Some(2));
}

#[test]
fn verify_escape_passes() {
    let o = fibdyn(&["verify", "escape", "--c", "-0.6", "--samples", "500", "--n-max", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}
