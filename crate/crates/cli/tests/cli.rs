use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn hirota(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hirota")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = hirota(&all);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn background_abs_is_exactly_a() {
    let out = hirota(&["solution", "--family", "background", "--n-min", "-5", "--n-max", "5", "--t-steps", "11"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,t,re_v,im_v,abs_v"));
    let want = hirota_core::io::fmt_real(5.0 / 12.0);
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 11 * 11);
    assert!(rows.iter().all(|r| r.rsplit(',').next() == Some(want.as_str())));
}

#[test]
fn soliton_solution_report() {
    let v = json(&["solution", "--figure", "fig2b"]);
    assert!((v["max"]["value"].as_f64().unwrap() - 2.3271).abs() < 1e-4);
    assert_eq!(v["max"]["n"], 0);
    assert_eq!(v["max"]["t"], 0.0);
    assert_eq!(v["spec"]["family"]["kind"], "soliton1");
    assert!(v["runtime_ms"].as_f64().is_some());

    let v = json(&["solution", "--family", "rogue", "--order", "3", "--a", "1", "--b", "0.3", "--A", "23/60", "--B", "0"]);
    assert!((v["max"]["value"].as_f64().unwrap() - 6.8427).abs() < 1e-4);
}

#[test]
fn solution_files_and_spec_echo_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let out = hirota(&["solution", "--z1", "1.8", "--peak-tuned", "--B", "pi/2", "--out", first.to_str().unwrap(), "--svg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let svg = fs::read_to_string(first.with_extension("svg")).unwrap();
    assert!(svg.contains("<rect") && svg.contains(">n<") && svg.contains(">t<"));

    let second = dir.path().join("second");
    let echo = first.with_extension("json");
    let out = hirota(&["solution", "--spec", echo.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert!(out.status.success());
    let a = fs::read(first.with_extension("csv")).unwrap();
    let b = fs::read(second.with_extension("csv")).unwrap();
    assert_eq!(a, b);
    assert!(!a.contains(&b'\r'));
}

#[test]
fn invalid_specs_exit_2_with_field_path() {
    let out = hirota(&["solution", "--z1", "1.8"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("family.c1"));

    let out = hirota(&["solution", "--zs", "1.5,0.5i", "--peak-tuned"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("family.points[1]"));

    let out = hirota(&["solution", "--family", "background", "--A", "abc"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_background_all_checks() {
    let v = json(&["verify", "--family", "background", "--residual", "--rk4", "--lax", "--scatter"]);
    assert_eq!(v["pass"], true);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 4);
    for c in &checks[..3] {
        assert!(c["value"].as_f64().unwrap() < 1e-12, "{c}");
    }
}

#[test]
fn verify_scatter_recovers_soliton_eigenvalue() {
    let v = json(&["verify", "--figure", "fig2b", "--scatter"]);
    assert_eq!(v["pass"], true);
    assert!(v["checks"][0]["value"].as_f64().unwrap() < 1e-6);
}

#[test]
fn verify_two_soliton_residual_and_rk4() {
    let v = json(&["verify", "--figure", "fig4a", "--residual", "--rk4"]);
    assert_eq!(v["pass"], true);
    assert_eq!(v["checks"][0]["threshold"], 1e-7);
    assert_eq!(v["checks"][1]["threshold"], 1e-6);
}

#[test]
fn verify_failure_exits_4_naming_the_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let out = hirota(&["solution", "--figure", "fig2b", "--n-min", "-10", "--n-max", "10", "--t-min", "-0.05", "--t-max", "0.05", "--t-steps", "51"]);
    fs::write(&path, &out.stdout).unwrap();
    let ok = hirota(&["verify", "--csv", path.to_str().unwrap(), "--residual", "--rk4", "--lax"]);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stdout));

    let mut grid = hirota_core::io::read_csv(out.stdout.as_slice()).unwrap();
    grid.values[25][10] += hirota_core::Complex64::new(1e-4, 0.0);
    fs::write(&path, hirota_core::io::csv_string(&grid).unwrap()).unwrap();
    let bad = hirota(&["verify", "--csv", path.to_str().unwrap(), "--residual"]);
    assert_eq!(code(&bad), 4);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("residual"));
}

#[test]
fn maxamp_recursions() {
    let v = json(&["maxamp", "--A", "0.1833333", "--order", "1"]);
    assert!((v["maxima"][0]["max"].as_f64().unwrap() - 0.5747).abs() < 1e-4);

    let v = json(&["maxamp", "--A", "0.4166667", "--zs", "1.25,2.25"]);
    assert!((v["maxima"][1]["max"].as_f64().unwrap() - 5.8905).abs() < 1e-4);

    let out = hirota(&["maxamp", "--A", "0.4166667", "--zs", "1.0"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn maxamp_caption_table_has_twelve_passing_rows() {
    let v = json(&["maxamp", "--caption-table"]);
    let rows = v["caption_table"].as_array().unwrap();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r["pass"] == true));
}

#[test]
fn figures_compare_with_captions() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for (id, want, file) in [("fig3b", 1.7898, "fig3b"), ("fig5c", 9.3043, "fig5a"), ("fig9a", 9.0164, "fig9a")] {
        let v = json(&["figure", id, "--out-dir", d]);
        assert_eq!(v["check"]["pass"], true, "{id}");
        assert!((v["check"]["max"]["value"].as_f64().unwrap() - want).abs() < 1e-4, "{id}");
        for ext in ["csv", "svg", "json"] {
            assert!(dir.path().join(format!("{file}.{ext}")).exists());
        }
    }
    let out = hirota(&["figure", "fig3b", "--out-dir", d, "--caption", "1.9"]);
    assert_eq!(code(&out), 5);
    let out = hirota(&["figure", "fig10", "--out-dir", d]);
    assert_eq!(code(&out), 2);
}

#[test]
fn figure_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = hirota(&["figure", "fig2a", "--out-dir", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let bytes = fs::read(dir.path().join("fig2a.csv")).unwrap();
    let grid = hirota_core::io::read_csv(bytes.as_slice()).unwrap();
    assert_eq!(grid.t.len(), 201);
    assert_eq!((grid.n_min, grid.n_max), (-30, 30));
    assert_eq!(hirota_core::io::csv_string(&grid).unwrap().into_bytes(), bytes);
}

#[test]
fn spectral_scalars() {
    let v = json(&["spectral", "--z", "1.8"]);
    assert!((v["zeta"][0].as_f64().unwrap() - 0.66061).abs() < 1e-5);
    assert!((v["omega"][0].as_f64().unwrap().abs() - 0.46212).abs() < 1e-5);
    let v = json(&["spectral", "--z", "0.6+0.8i"]);
    assert!((v["abs_zeta"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert_eq!(code(&hirota(&["spectral", "--z", "0"])), 2);
}

#[test]
fn scatter_two_soliton() {
    let v = json(&["scatter", "--figure", "fig5b", "--z", "0.6+0.8i,3"]);
    let eig: Vec<(f64, f64)> = v["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|z| (z[0].as_f64().unwrap(), z[1].as_f64().unwrap()))
        .collect();
    for want in [1.75, 2.25] {
        assert!(eig.iter().any(|&(re, im)| (re - want).abs() < 1e-6 && im.abs() < 1e-6), "{eig:?}");
    }
    let on_circle = &v["coefficients"][0];
    assert!(on_circle["b"][0].as_f64().unwrap().abs() < 1e-10);
    assert!(v["coefficients"][1].get("a").is_none());
}

#[test]
fn thread_cap_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_hirota")).env("HIROTA_THREADS", "zero").args(["maxamp", "--A", "0.5", "--order", "1"]).output().unwrap();
    assert_eq!(code(&out), 2);
    let out = Command::new(env!("CARGO_BIN_EXE_hirota")).env("HIROTA_THREADS", "1").args(["--json", "solution", "--figure", "fig2a"]).output().unwrap();
    assert!(out.status.success());
}
