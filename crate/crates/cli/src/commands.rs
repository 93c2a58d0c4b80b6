//! The subcommands as library functions returning their stdout text.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use dualsteiner_core::format::sig15;
use dualsteiner_core::moment::{cone_interior_check_with, interval_search_with};
use dualsteiner_core::quermass::{dual_af_verify, dual_quermass_many, dual_quermass_zonal, hankel_report};
use dualsteiner_core::rootcone::{cone_boundary_map, Membership};
use dualsteiner_core::steiner::{real_roots_rigidity_check, stability_check};
use dualsteiner_core::synth::realize_pair_with;
use dualsteiner_core::{
    body::is_dilate_range, ratio_range, ConeVerdict, DualSteinerPoly, Interval, QuermassTuple,
    SphereGrid, StarBody,
};
use serde::Serialize;
use serde_json::json;

use crate::config::{Format, RunConfig};
use crate::error::{CliError, ExitCode};
use crate::json::to_json;

/// Points sampled by the reciprocity check.
const RECIPROCITY_POINTS: usize = 32;
/// Both sides of the reciprocity law come from the same samples.
const RECIPROCITY_TOL: f64 = 1e-10;
/// AF triples checked by `verify`; every real index is admissible.
const AF_TRIPLES: [(f64, f64, f64); 3] = [(0.0, 1.0, 2.0), (1.0, 2.0, 3.0), (0.0, 2.0, 4.0)];

/// Text for stdout and the exit code of a command that ran to completion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub code: ExitCode,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output { stdout, code: ExitCode::Ok }
    }
}

pub type CmdResult = Result<Output, CliError>;

// ---- inputs ----

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

pub fn read_body(path: &Path) -> Result<StarBody, CliError> {
    StarBody::from_json(&read_text(path)?)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn read_tuple(path: &Path) -> Result<QuermassTuple, CliError> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn read_pair(k: &Path, l: &Path) -> Result<(StarBody, StarBody), CliError> {
    let (k, l) = (read_body(k)?, read_body(l)?);
    if k.dim() != l.dim() {
        return Err(CliError {
            code: ExitCode::Dimension,
            message: format!("bodies live in dimensions {} and {}", k.dim(), l.dim()),
            stdout: None,
        });
    }
    Ok((k, l))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::input(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

/// Copies the primary output to `--out` when one is set.
fn finish(text: String, cfg: &RunConfig, code: ExitCode) -> CmdResult {
    if let Some(path) = &cfg.out {
        write_file(path, &text)?;
    }
    Ok(Output { stdout: text, code })
}

// ---- numerics shared by the commands ----

fn grid_for(n: usize, cfg: &RunConfig) -> Result<Arc<SphereGrid>, CliError> {
    Ok(match cfg.resolution(n) {
        Some(res) => Arc::new(SphereGrid::new(n, res)?),
        None => SphereGrid::shared_default(n)?,
    })
}

/// `W̃_i(K, L)`: exact zonal rule unless a resolution is configured.
pub fn quermass_values(k: &StarBody, l: &StarBody, indices: &[f64], cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    let n = k.dim();
    if cfg.resolution(n).is_none() {
        if let Some(v) = dual_quermass_zonal(k, l, indices) {
            return Ok(v);
        }
    }
    Ok(dual_quermass_many(k, l, indices, &*grid_for(n, cfg)?)?)
}

fn consecutive(n: usize) -> Vec<f64> {
    (0..=n).map(|i| i as f64).collect()
}

fn pair_poly(k: &StarBody, l: &StarBody, cfg: &RunConfig) -> Result<DualSteinerPoly, CliError> {
    match cfg.resolution(k.dim()) {
        None => Ok(DualSteinerPoly::from_pair_auto(k, l)?),
        Some(_) => Ok(DualSteinerPoly::from_pair(k, l, &*grid_for(k.dim(), cfg)?)?),
    }
}

#[derive(Serialize)]
struct TupleOut<'a> {
    dim: usize,
    indices: &'a [f64],
    values: &'a [f64],
}

fn tuple_csv(indices: &[f64], values: &[f64]) -> String {
    let mut s = String::from("index,value\n");
    for (i, w) in indices.iter().zip(values) {
        s.push_str(&format!("{},{}\n", sig15(*i), sig15(*w)));
    }
    s
}

// ---- commands ----

/// Quermassintegrals of a pair at `indices` (default `0..=n`).
pub fn cmd_compute(k: &Path, l: &Path, indices: Option<&[f64]>, cfg: &RunConfig) -> CmdResult {
    let (k, l) = read_pair(k, l)?;
    let n = k.dim();
    let indices = indices.map(<[f64]>::to_vec).unwrap_or_else(|| consecutive(n));
    if indices.is_empty() || indices.iter().any(|i| !i.is_finite()) {
        return Err(CliError::input("indices must be a non-empty list of finite numbers"));
    }
    let values = quermass_values(&k, &l, &indices, cfg)?;
    let text = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&TupleOut { dim: n, indices: &indices, values: &values }),
        Format::Csv => tuple_csv(&indices, &values),
    };
    finish(text, cfg, ExitCode::Ok)
}

fn verdict_csv(v: &ConeVerdict) -> String {
    let mut s = String::from("key,value\n");
    let status = serde_json::to_value(v.status).expect("status serializes");
    s.push_str(&format!("status,{}\n", status.as_str().unwrap_or_default()));
    if let Some(i) = v.interval {
        s.push_str(&format!("a,{}\nb,{}\n", sig15(i.a()), sig15(i.b())));
    }
    if let Some(x) = v.lambda {
        s.push_str(&format!("lambda,{}\n", sig15(x)));
    }
    if let Some(x) = v.margin {
        s.push_str(&format!("margin,{}\n", sig15(x)));
    }
    if let Some(c) = &v.certificate {
        s.push_str(&format!("certificate,\"{}\"\n", c.replace('"', "\"\"")));
    }
    s
}

/// Realizability verdict; exit 4 unless the tuple is realizable.
pub fn cmd_check(tuple: &Path, interval: Option<(f64, f64)>, cfg: &RunConfig) -> CmdResult {
    let tuple = read_tuple(tuple)?;
    let verdict = match interval {
        Some((a, b)) => cone_interior_check_with(&tuple, Interval::new(a, b)?, &cfg.moment())?,
        None => interval_search_with(&tuple, &cfg.moment())?,
    };
    let code = if verdict.is_realizable() { ExitCode::Ok } else { ExitCode::Negative };
    let text = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&verdict),
        Format::Csv => verdict_csv(&verdict),
    };
    finish(text, cfg, code)
}

/// Writes `K.json` and `L.json` to the output directory (default `.`), then
/// reloads them and echoes the recomputed tuple.
pub fn cmd_realize(tuple: &Path, cfg: &RunConfig) -> CmdResult {
    let tuple = read_tuple(tuple)?;
    let n = tuple.dim();
    let r = realize_pair_with(&tuple, n, &cfg.moment())?;
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let (kp, lp) = (dir.join("K.json"), dir.join("L.json"));
    write_file(&kp, &r.k.to_json()?)?;
    write_file(&lp, &r.l.to_json()?)?;
    let (k, l) = read_pair(&kp, &lp)?;
    let values = quermass_values(&k, &l, tuple.indices(), cfg)?;
    let deviation = values
        .iter()
        .zip(tuple.values())
        .map(|(v, w)| (v / w - 1.0).abs())
        .fold(0.0, f64::max);
    let report = json!({
        "status": r.verdict.status,
        "k": kp.display().to_string(),
        "l": lp.display().to_string(),
        "verdict": r.verdict,
        "tuple": TupleOut { dim: n, indices: tuple.indices(), values: &values },
        "deviation": deviation,
    });
    let text = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&report),
        Format::Csv => tuple_csv(tuple.indices(), &values),
    };
    if !(deviation <= cfg.quad_tol) {
        return Err(CliError {
            code: ExitCode::Invariant,
            message: format!("round trip deviates by {deviation:.3e} > {:.3e}", cfg.quad_tol),
            stdout: Some(text),
        });
    }
    Ok(Output::ok(text))
}

/// Where `roots` takes its polynomial from.
pub enum RootsSource<'a> {
    Pair(&'a Path, &'a Path),
    Tuple(&'a Path),
}

/// Roots, Vieta deviation, stability and, for a body pair, the real-root
/// rigidity report.
pub fn cmd_roots(source: RootsSource<'_>, cfg: &RunConfig) -> CmdResult {
    let p = match source {
        RootsSource::Pair(k, l) => {
            let (k, l) = read_pair(k, l)?;
            pair_poly(&k, &l, cfg)?
        }
        RootsSource::Tuple(t) => DualSteinerPoly::from_tuple(&read_tuple(t)?)?,
    };
    let roots = p.roots();
    let vieta = p.vieta_deviation(&roots);
    let stability = stability_check(&p);
    let rigidity = match p.provenance() {
        Some(_) => Some(real_roots_rigidity_check(&p)?),
        None => None,
    };
    let pairs: Vec<[f64; 2]> = roots.roots.iter().map(|z| [z.re, z.im]).collect();
    let text = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&json!({
            "dim": p.dim(),
            "coeffs": p.coeffs(),
            "roots": pairs,
            "residual": roots.residual,
            "vieta_deviation": vieta,
            "stability": stability,
            "rigidity": rigidity,
        })),
        Format::Csv => {
            let mut s = String::from("re,im\n");
            for [re, im] in &pairs {
                s.push_str(&format!("{},{}\n", sig15(*re), sig15(*im)));
            }
            s
        }
    };
    if !(roots.residual <= cfg.root_tol && vieta <= cfg.root_tol) {
        return Err(CliError {
            code: ExitCode::Invariant,
            message: format!("root residual {:.3e}, Vieta deviation {vieta:.3e}", roots.residual),
            stdout: Some(text),
        });
    }
    Ok(Output::ok(text))
}

/// Sidecar directory next to a CSV path: `map.csv` → `map_witnesses/`.
pub fn sidecar_dir(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "cone".into());
    out.with_file_name(format!("{stem}_witnesses"))
}

/// Boundary map of the root cone, CSV by default. Witness pairs go to
/// `<id>.json` in `witness_dir`, or beside `--out` when only that is set.
pub fn cmd_cone(n: usize, samples: usize, witness_dir: Option<&Path>, cfg: &RunConfig) -> CmdResult {
    let map = cone_boundary_map(n, samples, &cfg.search())?;
    let dir = witness_dir.map(Path::to_path_buf).or_else(|| cfg.out.as_deref().map(sidecar_dir));
    if let Some(dir) = &dir {
        fs::create_dir_all(dir).map_err(|e| CliError::input(format!("cannot create {}: {e}", dir.display())))?;
        for (id, w) in map.witnesses() {
            // full precision: sidecars are inputs for later runs
            let text = serde_json::to_string_pretty(w).map_err(dualsteiner_core::Error::from)?;
            write_file(&dir.join(format!("{id}.json")), &text)?;
        }
    }
    let text = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => map.to_csv(),
        Format::Json => {
            let rows: Vec<_> = map
                .entries
                .iter()
                .enumerate()
                .map(|(j, e)| {
                    json!({
                        "theta": e.theta,
                        "status": e.query.status,
                        "witness_id": map.witness_id(j),
                        "filled": e.filled,
                        "certificate": e.query.certificate,
                    })
                })
                .collect();
            let count = |s: Membership| map.entries.iter().filter(|e| e.query.status == s).count();
            to_json(&json!({
                "n": n,
                "samples": samples,
                "in": count(Membership::In),
                "out": count(Membership::Out),
                "unknown": count(Membership::Unknown),
                "entries": rows,
            }))
        }
    };
    finish(text, cfg, ExitCode::Ok)
}

#[derive(Serialize)]
struct Check<T: Serialize> {
    pass: bool,
    #[serde(flatten)]
    detail: T,
}

/// Inequality and identity suite for a pair; exit 5 on any failure.
pub fn cmd_verify(k: &Path, l: &Path, cfg: &RunConfig) -> CmdResult {
    let (k, l) = read_pair(k, l)?;
    let n = k.dim();
    let top = (2 * cfg.hankel_m).max(4).max(n);
    let idx = consecutive(top);
    let w = quermass_values(&k, &l, &idx, cfg)?;
    let (a, b) = ratio_range(&k, &l, &*grid_for(n, cfg)?)?;
    let dilate = is_dilate_range(a, b);
    let tuple = QuermassTuple::consecutive(n, w.clone())?;

    let mut af = Vec::new();
    for (i, j, kk) in AF_TRIPLES {
        let r = dual_af_verify(&tuple, i, j, kk)?;
        let pass = if dilate { r.equality } else { r.holds && r.slack > 0.0 };
        af.push(Check { pass, detail: json!({ "triple": [i, j, kk], "slack": r.slack, "equality": r.equality }) });
    }

    // L ⊆ K makes i ↦ W̃_i non-increasing, K ⊆ L non-decreasing
    let contained = if b <= 1.0 {
        Some(-1.0)
    } else if a >= 1.0 {
        Some(1.0)
    } else {
        None
    };
    let monotonicity = contained.map(|sign| {
        let pass = w.windows(2).all(|p| sign * (p[1] - p[0]) >= -1e-10 * p[0].max(p[1]));
        Check { pass, detail: json!({ "direction": if sign < 0.0 { "non-increasing" } else { "non-decreasing" } }) }
    });

    let hankel: Vec<_> = (1..=cfg.hankel_m)
        .map(|m| {
            let r = hankel_report(&w, m, dilate);
            Check { pass: r.consistent(), detail: r }
        })
        .collect();

    let p = DualSteinerPoly::from_values(n, &w[..=n])?;
    let roots = p.roots();
    let vieta = p.vieta_deviation(&roots);
    let vieta = Check { pass: vieta <= cfg.root_tol, detail: json!({ "deviation": vieta }) };
    let swapped = DualSteinerPoly::from_values(n, &quermass_values(&l, &k, &consecutive(n), cfg)?)?;
    let rec = p.reciprocity_deviation(&swapped, RECIPROCITY_POINTS, cfg.seed)?;
    let reciprocity = Check { pass: rec <= RECIPROCITY_TOL, detail: json!({ "deviation": rec }) };

    let pass = af.iter().all(|c| c.pass)
        && monotonicity.as_ref().is_none_or(|c| c.pass)
        && hankel.iter().all(|c| c.pass)
        && vieta.pass
        && reciprocity.pass;
    let text = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&json!({
            "dim": n,
            "ratio_range": [a, b],
            "dilate": dilate,
            "values": w,
            "af": af,
            "monotonicity": monotonicity,
            "hankel": hankel,
            "vieta": vieta,
            "reciprocity": reciprocity,
            "pass": pass,
        })),
        Format::Csv => {
            let mut s = String::from("check,pass\n");
            for (c, (i, j, kk)) in af.iter().zip(AF_TRIPLES) {
                s.push_str(&format!("af_{i}_{j}_{kk},{}\n", c.pass));
            }
            if let Some(c) = &monotonicity {
                s.push_str(&format!("monotonicity,{}\n", c.pass));
            }
            for (m, c) in hankel.iter().enumerate() {
                s.push_str(&format!("hankel_{},{}\n", m + 1, c.pass));
            }
            s.push_str(&format!("vieta,{}\nreciprocity,{}\n", vieta.pass, reciprocity.pass));
            s
        }
    };
    if cfg.out.is_some() {
        finish(text.clone(), cfg, ExitCode::Ok)?;
    }
    if pass {
        Ok(Output::ok(text))
    } else {
        Err(CliError { code: ExitCode::Invariant, message: "verification failed".into(), stdout: Some(text) })
    }
}
