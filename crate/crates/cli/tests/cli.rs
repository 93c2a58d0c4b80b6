use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use dualsteiner_cli::run;
use dualsteiner_core::{QuermassTuple, StarBody};
use serde_json::Value;
use tempfile::TempDir;

fn write_body(dir: &Path, name: &str, body: &StarBody) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body.to_json().unwrap()).unwrap();
    p
}

fn write_tuple(dir: &Path, name: &str, dim: usize, values: &[f64]) -> PathBuf {
    let p = dir.join(name);
    let t = QuermassTuple::consecutive(dim, values.to_vec()).unwrap();
    fs::write(&p, serde_json::to_string(&t).unwrap()).unwrap();
    p
}

fn trig() -> StarBody {
    StarBody::trig(2.0, vec![1.0], vec![]).unwrap()
}

fn dualsteiner(args: &[&str]) -> (i32, String, String) {
    let out = run(std::iter::once("dualsteiner").chain(args.iter().copied()));
    (out.code, out.stdout, out.stderr)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn values(json: &str) -> Vec<f64> {
    let v: Value = serde_json::from_str(json).unwrap();
    v["values"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

#[test]
fn compute_examples() {
    let dir = TempDir::new().unwrap();
    let b = write_body(dir.path(), "b.json", &StarBody::unit_ball(2));
    let b2 = write_body(dir.path(), "b2.json", &StarBody::ball(2, 2.0).unwrap());
    let t = write_body(dir.path(), "t.json", &trig());

    let (code, out, _) = dualsteiner(&["compute", s(&b), s(&b2)]);
    assert_eq!(code, 0);
    for (v, e) in values(&out).iter().zip([PI, 2.0 * PI, 4.0 * PI]) {
        assert!(rel(*v, e) < 1e-13);
    }
    let (code, out, _) = dualsteiner(&["compute", s(&b), s(&t)]);
    assert_eq!(code, 0);
    assert!(out.contains("14.1371669411541"), "{out}");
    for (v, e) in values(&out).iter().zip([PI, 2.0 * PI, 4.5 * PI]) {
        assert!(rel(*v, e) < 1e-13);
    }
    let (code, out, _) = dualsteiner(&["compute", s(&b), s(&b2), "--indices=-1,0.5"]);
    assert_eq!(code, 0);
    let v = values(&out);
    assert!(rel(v[0], PI / 2.0) < 1e-13 && rel(v[1], 2f64.sqrt() * PI) < 1e-13);

    let (code, out, _) = dualsteiner(&["compute", s(&b), s(&t), "--format", "csv", "--res", "256"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("index,value\n0,3.14159265358979\n"), "{out}");
}

#[test]
fn input_errors_map_to_exit_codes() {
    let dir = TempDir::new().unwrap();
    let b = write_body(dir.path(), "b.json", &StarBody::unit_ball(2));
    let b3 = write_body(dir.path(), "b3.json", &StarBody::unit_ball(3));
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"dim\": 2, \"kind\": \"teapot\"}").unwrap();

    assert_eq!(dualsteiner(&["compute", s(&b), s(&b3)]).0, 3);
    let (code, _, err) = dualsteiner(&["compute", s(&b), s(&bad)]);
    assert_eq!(code, 2);
    assert!(err.contains("bad.json"));
    assert_eq!(dualsteiner(&["compute", s(&b), "/nonexistent/body.json"]).0, 2);
    assert_eq!(dualsteiner(&["frobnicate"]).0, 2);
    assert_eq!(dualsteiner(&["compute", s(&b), s(&b), "--format", "xml"]).0, 2);
    let (code, out, _) = dualsteiner(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("realize"));
}

#[test]
fn check_verdicts() {
    let dir = TempDir::new().unwrap();
    let bad = write_tuple(dir.path(), "bad.json", 2, &[1.0, 2.0, 3.0]);
    let (code, out, _) = dualsteiner(&["check", s(&bad)]);
    assert_eq!(code, 4);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["status"], "OUTSIDE");

    let good = write_tuple(dir.path(), "good.json", 2, &[PI, 2.0 * PI, 4.5 * PI]);
    let (code, out, _) = dualsteiner(&["check", s(&good)]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["status"], "INTERIOR");
    let (code, out, _) = dualsteiner(&["check", s(&good), "--interval", "1.9", "2.1"]);
    assert_eq!(code, 4, "{out}");
    let (code, out, _) = dualsteiner(&["check", s(&good), "--interval", "0.5", "6", "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("key,value\nstatus,INTERIOR\n"), "{out}");

    let ray = write_tuple(dir.path(), "ray.json", 2, &[PI, 2.0 * PI, 4.0 * PI]);
    let (code, out, _) = dualsteiner(&["check", s(&ray)]);
    assert_eq!(code, 0);
    assert!(out.contains("GEOMETRIC_RAY"));
}

#[test]
fn realize_round_trip() {
    let dir = TempDir::new().unwrap();
    let t = write_tuple(dir.path(), "t.json", 2, &[PI, 2.0 * PI, 4.5 * PI]);
    let out_dir = dir.path().join("witness");
    let (code, out, err) = dualsteiner(&["realize", s(&t), "--out", s(&out_dir)]);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["deviation"].as_f64().unwrap() <= 1e-6);
    let (k, l) = (out_dir.join("K.json"), out_dir.join("L.json"));
    let (code, out, _) = dualsteiner(&["compute", s(&k), s(&l)]);
    assert_eq!(code, 0);
    for (v, e) in values(&out).iter().zip([PI, 2.0 * PI, 4.5 * PI]) {
        assert!(rel(*v, e) <= 1e-6);
    }

    let bad = write_tuple(dir.path(), "bad.json", 2, &[1.0, 2.0, 3.0]);
    let (code, out, err) = dualsteiner(&["realize", s(&bad), "--out", s(&dir.path().join("none"))]);
    assert_eq!(code, 4);
    assert!(err.contains("refused"));
    assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["status"], "OUTSIDE");
    assert!(!dir.path().join("none").exists());
}

#[test]
fn roots_from_tuple_and_pair() {
    let dir = TempDir::new().unwrap();
    let t = write_tuple(dir.path(), "t.json", 2, &[PI, 2.0 * PI, 4.5 * PI]);
    let (code, out, _) = dualsteiner(&["roots", "--tuple", s(&t)]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let roots = v["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 2);
    for (r, sign) in roots.iter().zip([1.0, -1.0]) {
        assert!((r[0].as_f64().unwrap() + 4.0 / 9.0).abs() < 1e-14);
        assert!((r[1].as_f64().unwrap() - sign * 2f64.sqrt() / 9.0).abs() < 1e-14);
    }
    assert_eq!(v["stability"]["verdict"], "stable");
    assert!(v["rigidity"].is_null());

    let b = write_body(dir.path(), "b.json", &StarBody::unit_ball(2));
    let b2 = write_body(dir.path(), "b2.json", &StarBody::ball(2, 2.0).unwrap());
    let (code, out, _) = dualsteiner(&["roots", s(&b), s(&b2), "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out, "re,im\n-0.5,0\n-0.5,0\n");
    let (code, out, _) = dualsteiner(&["roots", s(&b), s(&b2)]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["rigidity"]["all_real"], true);
    assert_eq!(v["rigidity"]["dilate"], true);
    assert_ne!(dualsteiner(&["roots", s(&b)]).0, 0);
}

#[test]
fn cone_maps_and_sidecars() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("map.csv");
    let (code, out, _) = dualsteiner(&["cone", "2", "--samples", "36", "--out", s(&csv)]);
    assert_eq!(code, 0);
    assert_eq!(fs::read_to_string(&csv).unwrap(), out);
    let mut ids = Vec::new();
    for line in out.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let theta: f64 = f[0].parse().unwrap();
        assert_eq!(f[1], if theta > PI / 2.0 + 1e-12 { "IN" } else { "OUT" }, "{line}");
        if !f[2].is_empty() {
            ids.push(f[2].to_string());
        }
    }
    assert_eq!(ids.len(), 18);
    for id in &ids {
        let w: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("map_witnesses").join(format!("{id}.json"))).unwrap()).unwrap();
        assert!(w["residual"].as_f64().unwrap() <= 1e-8);
        // the sidecar bodies reproduce the witness
        let k = StarBody::from_json(&w["k"].to_string()).unwrap();
        let l = StarBody::from_json(&w["l"].to_string()).unwrap();
        let kp = write_body(dir.path(), "wk.json", &k);
        let lp = write_body(dir.path(), "wl.json", &l);
        assert_eq!(dualsteiner(&["roots", s(&kp), s(&lp)]).0, 0);
    }
    let (code, out, _) = dualsteiner(&["cone", "2", "--samples", "8", "--format", "json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!((v["in"].as_u64(), v["out"].as_u64()), (Some(4), Some(4)));
    assert_eq!(dualsteiner(&["cone", "1"]).0, 2);
}

#[test]
fn verify_reports() {
    let dir = TempDir::new().unwrap();
    let b = write_body(dir.path(), "b.json", &StarBody::unit_ball(2));
    let t = write_body(dir.path(), "t.json", &trig());
    let (code, out, _) = dualsteiner(&["verify", s(&b), s(&t)]);
    assert_eq!(code, 0, "{out}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["dilate"], false);
    assert_eq!(v["af"].as_array().unwrap().len(), 3);
    assert_eq!(v["hankel"].as_array().unwrap().len(), 3);
    // 1 ≤ ρ_L/ρ_K: non-decreasing
    assert_eq!(v["monotonicity"]["direction"], "non-decreasing");

    let half = write_body(dir.path(), "half.json", &StarBody::dilate(trig(), 0.5).unwrap());
    let (code, out, _) = dualsteiner(&["verify", s(&t), s(&half), "--format", "csv"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("monotonicity,true") && !out.contains("false"));

    // a trig body sticking out of the ball on one side only: containment fails
    let mixed = write_body(dir.path(), "m.json", &StarBody::trig(1.0, vec![0.5], vec![]).unwrap());
    let (code, out, _) = dualsteiner(&["verify", s(&b), s(&mixed)]);
    assert_eq!(code, 0, "{out}");
    assert!(serde_json::from_str::<Value>(&out).unwrap()["monotonicity"].is_null());

    let b3 = write_body(dir.path(), "b3.json", &StarBody::unit_ball(3));
    let z3 = write_body(
        dir.path(),
        "z3.json",
        &StarBody::zonal(3, Default::default(), vec![(0.0, 1.0), (0.5, 1.6), (1.0, 2.5)]).unwrap(),
    );
    let (code, out, _) = dualsteiner(&["verify", s(&b3), s(&z3)]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# small run\nformat = csv\nres = 64\n").unwrap();
    let b = write_body(dir.path(), "b.json", &StarBody::unit_ball(2));
    let t = write_body(dir.path(), "t.json", &trig());
    let (code, out, _) = dualsteiner(&["--config", s(&cfg), "compute", s(&b), s(&t)]);
    assert_eq!(code, 0);
    assert!(out.starts_with("index,value"));
    let (code, out, _) = dualsteiner(&["compute", s(&b), s(&t), "--config", s(&cfg), "--format", "json"]);
    assert_eq!(code, 0);
    assert!(out.starts_with('{'));
    fs::write(&cfg, "quad_tol = -1\n").unwrap();
    assert_eq!(dualsteiner(&["--config", s(&cfg), "compute", s(&b), s(&t)]).0, 2);
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dualsteiner(&["cone", "3", "--samples", "12", "--seed", "3"]);
    let b = dualsteiner(&["cone", "3", "--samples", "12", "--seed", "3"]);
    assert_eq!(a.0, 0);
    assert_eq!(a, b);
    let t = write_tuple(dir.path(), "t.json", 3, &[1.0, 1.5, 2.5, 4.5]);
    let r1 = dualsteiner(&["realize", s(&t), "--out", s(&dir.path().join("r1"))]);
    let r2 = dualsteiner(&["realize", s(&t), "--out", s(&dir.path().join("r2"))]);
    assert_eq!(r1.0, 0, "{}", r1.2);
    assert_eq!(r1.1.replace("r1", "rX"), r2.1.replace("r2", "rX"));
    assert_eq!(
        fs::read(dir.path().join("r1/L.json")).unwrap(),
        fs::read(dir.path().join("r2/L.json")).unwrap()
    );
}

#[test]
fn binary_pipes_json_and_exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = write_tuple(dir.path(), "bad.json", 2, &[1.0, 2.0, 3.0]);
    let out = Command::new(env!("CARGO_BIN_EXE_dualsteiner")).args(["check", s(&bad)]).output().unwrap();
    assert_eq!(out.status.code(), Some(4));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "OUTSIDE");
    assert!(String::from_utf8_lossy(&out.stderr).is_empty());
    let out = Command::new(env!("CARGO_BIN_EXE_dualsteiner")).args(["compute", "x.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty() && !out.stderr.is_empty());
}
