//! Realizability of prescribed tuples as moments of a positive measure.
//!
//! A tuple `(ω_i)_{i∈I}` is realized by a pair of star bodies exactly when it
//! lies on a geometric ray `ω_i = λ^i ω_0` or in the interior of the cone
//! `C^I_{a,b}` generated by `(t^i)_{i∈I}`, `t ∈ [a, b]`, for some `0 < a < b`.
//! Interior membership is decided by a floor-maximizing LP over a Chebyshev
//! discretization, which is sound for INTERIOR only. OUTSIDE is reported only
//! from interval-free necessary conditions.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hankel, inf_norm, min_eigenvalue, pd_threshold};
pub use crate::measure::{Interval, IntervalMeasure};
use crate::lp;
use crate::poly;
use crate::quermass::{af_slack_report, QuermassTuple};
use crate::special::{power_integral, rpow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConeStatus {
    Interior,
    GeometricRay,
    Outside,
    Unknown,
}

/// Outcome of a realizability decision.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(into = "VerdictRepr")]
pub struct ConeVerdict {
    pub status: ConeStatus,
    pub interval: Option<Interval>,
    pub density: Option<IntervalMeasure>,
    pub lambda: Option<f64>,
    /// Name of the violated necessary condition, for OUTSIDE.
    pub certificate: Option<String>,
    /// Floor mass fraction `ε(b−a)/ω_0` of the witness, for INTERIOR.
    pub margin: Option<f64>,
}

#[derive(Serialize)]
struct VerdictRepr {
    status: ConeStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    interval: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    density: Option<Vec<(f64, f64)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    floor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    margin: Option<f64>,
}

impl From<ConeVerdict> for VerdictRepr {
    fn from(v: ConeVerdict) -> Self {
        VerdictRepr {
            status: v.status,
            interval: v.interval.map(Into::into),
            density: v.density.as_ref().map(|d| d.atoms().to_vec()),
            floor: v.density.as_ref().map(|d| d.floor()),
            lambda: v.lambda,
            certificate: v.certificate,
            margin: v.margin,
        }
    }
}

impl ConeVerdict {
    fn bare(status: ConeStatus) -> Self {
        ConeVerdict { status, interval: None, density: None, lambda: None, certificate: None, margin: None }
    }

    pub fn unknown() -> Self {
        Self::bare(ConeStatus::Unknown)
    }

    pub fn outside(certificate: impl Into<String>) -> Self {
        ConeVerdict { certificate: Some(certificate.into()), ..Self::bare(ConeStatus::Outside) }
    }

    pub fn ray(lambda: f64) -> Self {
        ConeVerdict { lambda: Some(lambda), ..Self::bare(ConeStatus::GeometricRay) }
    }

    pub fn interior(interval: Interval, density: IntervalMeasure, margin: f64) -> Self {
        ConeVerdict {
            interval: Some(interval),
            density: Some(density),
            margin: Some(margin),
            ..Self::bare(ConeStatus::Interior)
        }
    }

    /// Realizable: interior for some interval, or a geometric ray.
    pub fn is_realizable(&self) -> bool {
        matches!(self.status, ConeStatus::Interior | ConeStatus::GeometricRay)
    }
}

/// Tunables of the decision procedures.
#[derive(Clone, Debug)]
pub struct MomentConfig {
    /// Chebyshev nodes in the LP discretization.
    pub nodes: usize,
    /// Interval doublings scanned by [`interval_search`].
    pub k_max: usize,
    /// Minimal floor mass fraction accepted as strictly positive.
    pub margin_tol: f64,
    /// Relative tolerance of the geometric-ray test.
    pub ray_tol: f64,
    /// Relative moment mismatch allowed for an LP witness.
    pub witness_tol: f64,
}

impl Default for MomentConfig {
    fn default() -> Self {
        MomentConfig { nodes: 2001, k_max: 20, margin_tol: 1e-9, ray_tol: 1e-8, witness_tol: 1e-9 }
    }
}

// ---- Hankel criteria ----

/// Parity-split Hankel matrices of `ω_0..ω_m` on `[a, b]`.
///
/// `m = 2r`: `A = (ω_{j+k})_{0..r}`, `B = ((a+b)ω_{j+k+1} − abω_{j+k} − ω_{j+k+2})_{0..r−1}`.
/// `m = 2r+1`: `A = (ω_{j+k+1} − aω_{j+k})_{0..r}`, `B = (bω_{j+k} − ω_{j+k+1})_{0..r}`.
pub fn hankel_split(values: &[f64], interval: Interval) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if values.len() < 2 {
        return Err(Error::invalid("parity-split Hankel matrices need m >= 1"));
    }
    let m = values.len() - 1;
    let r = m / 2;
    let (a, b) = (interval.a(), interval.b());
    let w = |s: usize| values[s];
    if m.is_multiple_of(2) {
        Ok((
            hankel(r + 1, 0, w),
            hankel(r, 0, |s| (a + b) * w(s + 1) - a * b * w(s) - w(s + 2)),
        ))
    } else {
        Ok((
            hankel(r + 1, 0, |s| w(s + 1) - a * w(s)),
            hankel(r + 1, 0, |s| b * w(s) - w(s + 1)),
        ))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feasibility {
    StrictlyFeasible,
    Boundary,
    Infeasible,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FeasibilityReport {
    pub status: Feasibility,
    pub a_min_eig: f64,
    pub b_min_eig: f64,
    pub a_threshold: f64,
    pub b_threshold: f64,
}

pub fn hausdorff_report(values: &[f64], interval: Interval) -> Result<FeasibilityReport> {
    let (am, bm) = hankel_split(values, interval)?;
    let (ea, eb) = (min_eigenvalue(&am), min_eigenvalue(&bm));
    let (ta, tb) = (pd_threshold(&am), pd_threshold(&bm));
    let status = if ea > ta && eb > tb {
        Feasibility::StrictlyFeasible
    } else if ea >= -ta && eb >= -tb {
        Feasibility::Boundary
    } else {
        Feasibility::Infeasible
    };
    Ok(FeasibilityReport { status, a_min_eig: ea, b_min_eig: eb, a_threshold: ta, b_threshold: tb })
}

/// Truncated Hausdorff feasibility of consecutive moments `ω_0..ω_m`.
pub fn hausdorff_feasible(values: &[f64], interval: Interval) -> Result<Feasibility> {
    Ok(hausdorff_report(values, interval)?.status)
}

/// Scale-free margin `min(λ_min(A)/‖A‖_∞, λ_min(B)/‖B‖_∞)` of the split.
pub fn split_margin(values: &[f64], interval: Interval) -> f64 {
    let Ok((am, bm)) = hankel_split(values, interval) else {
        return f64::NEG_INFINITY;
    };
    let rel = |m: &DMatrix<f64>| {
        if m.nrows() == 0 {
            f64::INFINITY
        } else {
            min_eigenvalue(m) / inf_norm(m).max(f64::MIN_POSITIVE)
        }
    };
    rel(&am).min(rel(&bm))
}

/// `(ω_{j+k+1} − aω_{j+k})_{0..m}` and `(bω_{j+k} − ω_{j+k+1})_{0..m}` built
/// from `ω_0..ω_{2m+1}`; both are PSD for any pair with ratio range `[a, b]`.
pub fn interval_hankels(values: &[f64], a: f64, b: f64, m: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    assert!(values.len() >= 2 * m + 2);
    (
        hankel(m + 1, 0, |s| values[s + 1] - a * values[s]),
        hankel(m + 1, 0, |s| b * values[s] - values[s + 1]),
    )
}

// ---- geometric rays and certificates ----

/// `λ` with `ω_i = λ^i ω_0` within `tol` relative, if the tuple is on a ray.
pub fn geometric_ray(tuple: &QuermassTuple, tol: f64) -> Option<f64> {
    let lambda = ray_scale(tuple);
    let w0 = tuple.omega0();
    let ok = tuple
        .indices()
        .iter()
        .zip(tuple.values())
        .all(|(&i, &w)| (w0 * rpow(lambda, i) / w - 1.0).abs() <= tol);
    ok.then_some(lambda)
}

/// Least-squares `λ` for `log ω_i − log ω_0 ≈ i log λ`.
pub fn ray_scale(tuple: &QuermassTuple) -> f64 {
    let l0 = tuple.omega0().ln();
    let (mut num, mut den) = (0.0, 0.0);
    for (&i, &w) in tuple.indices().iter().zip(tuple.values()) {
        num += i * (w.ln() - l0);
        den += i * i;
    }
    if den > 0.0 {
        (num / den).exp()
    } else {
        1.0
    }
}

/// An interval-free necessary condition violated by the tuple, if any:
/// log-convexity of `i ↦ ω_i` on every index triple, and for consecutive
/// indices positive semidefiniteness of `(ω_{j+k})` and `(ω_{j+k+1})`.
pub fn outside_certificate(tuple: &QuermassTuple) -> Option<String> {
    let idx = tuple.indices();
    let val = tuple.values();
    let len = idx.len();
    for p in 0..len {
        for q in p + 1..len {
            for s in q + 1..len {
                let r = af_slack_report(idx[p], idx[q], idx[s], val[p], val[q], val[s]);
                if !r.holds {
                    return Some(format!(
                        "dual Aleksandrov-Fenchel violated at ({}, {}, {}), slack {:.6e}",
                        idx[p], idx[q], idx[s], r.slack
                    ));
                }
            }
        }
    }
    if let Some(m) = tuple.consecutive_degree() {
        let delta = hankel(m / 2 + 1, 0, |s| val[s]);
        if min_eigenvalue(&delta) < -pd_threshold(&delta) {
            return Some(format!("Hankel matrix (w_(j+k)) of order {} is not PSD", m / 2 + 1));
        }
        if m >= 1 {
            let order = (m - 1) / 2 + 1;
            let delta1 = hankel(order, 1, |s| val[s]);
            if min_eigenvalue(&delta1) < -pd_threshold(&delta1) {
                return Some(format!("Hankel matrix (w_(j+k+1)) of order {order} is not PSD"));
            }
        }
    }
    None
}

// ---- LP witness ----

/// Floor-maximizing measure on `interval` reproducing the tuple, verified
/// against the moments; `None` when the LP fails or the witness is inexact.
pub fn lp_witness(
    indices: &[f64],
    values: &[f64],
    interval: Interval,
    cfg: &MomentConfig,
) -> Option<(f64, IntervalMeasure)> {
    let rows = indices.len();
    let nodes = interval.chebyshev_nodes(cfg.nodes.max(2));
    let cols = nodes.len() + 1;
    let (a, b) = (interval.a(), interval.b());
    let mut mat = DMatrix::zeros(rows, cols);
    for (r, (&i, &w)) in indices.iter().zip(values).enumerate() {
        mat[(r, 0)] = power_integral(i, a, b) / w;
        for (j, &t) in nodes.iter().enumerate() {
            mat[(r, j + 1)] = rpow(t, i) / w;
        }
    }
    let mut col_scale = vec![1.0; cols];
    for (j, s) in col_scale.iter_mut().enumerate() {
        let mx = mat.column(j).amax();
        if mx > 0.0 && mx.is_finite() {
            *s = 1.0 / mx;
            mat.column_mut(j).scale_mut(*s);
        } else if !mx.is_finite() {
            return None;
        }
    }
    let rhs = vec![1.0; rows];
    let mut cost = vec![0.0; cols];
    cost[0] = 1.0;
    let sol = lp::maximize(&mat, &rhs, &cost);
    if sol.status != lp::LpStatus::Optimal {
        return None;
    }
    let floor = sol.x[0] * col_scale[0];
    let atoms: Vec<(f64, f64)> = nodes
        .iter()
        .zip(&sol.x[1..])
        .zip(&col_scale[1..])
        .filter(|((_, &x), _)| x > 0.0)
        .map(|((&t, &x), &s)| (t, x * s))
        .collect();
    let measure = IntervalMeasure::new(interval, atoms, floor).ok()?;
    let exact = indices
        .iter()
        .zip(values)
        .all(|(&i, &w)| (measure.moment(i) / w - 1.0).abs() <= cfg.witness_tol);
    if !exact {
        return None;
    }
    let w0 = indices.iter().position(|&i| i == 0.0).map_or(values[0], |k| values[k]);
    Some((floor * interval.len() / w0, measure))
}

/// Interior membership of the tuple in `C^I_{a,b}` for the given interval.
pub fn cone_interior_check(tuple: &QuermassTuple, interval: Interval) -> Result<ConeVerdict> {
    cone_interior_check_with(tuple, interval, &MomentConfig::default())
}

pub fn cone_interior_check_with(tuple: &QuermassTuple, interval: Interval, cfg: &MomentConfig) -> Result<ConeVerdict> {
    if tuple.len() < 2 {
        return Err(Error::invalid("cone membership needs at least two indices"));
    }
    if let Some(lambda) = geometric_ray(tuple, cfg.ray_tol) {
        return Ok(ConeVerdict::ray(lambda));
    }
    if let Some(cert) = outside_certificate(tuple) {
        return Ok(ConeVerdict::outside(cert));
    }
    Ok(interior_on(tuple, interval, cfg).unwrap_or_else(ConeVerdict::unknown))
}

fn interior_on(tuple: &QuermassTuple, interval: Interval, cfg: &MomentConfig) -> Option<ConeVerdict> {
    if tuple.consecutive_degree().is_some() {
        // the split test is exact for consecutive indices
        let f = hausdorff_feasible(tuple.values(), interval).ok()?;
        if f != Feasibility::StrictlyFeasible {
            return None;
        }
    }
    let (margin, density) = lp_witness(tuple.indices(), tuple.values(), interval, cfg)?;
    (margin > cfg.margin_tol).then(|| ConeVerdict::interior(interval, density, margin))
}

/// Realizability over all intervals: ray test, interval-free certificates,
/// for consecutive indices the best asymmetric split intervals, then nested
/// intervals `[c/2^k, c·2^k]` around the ray scale `c`.
pub fn interval_search(tuple: &QuermassTuple) -> Result<ConeVerdict> {
    interval_search_with(tuple, &MomentConfig::default())
}

pub fn interval_search_with(tuple: &QuermassTuple, cfg: &MomentConfig) -> Result<ConeVerdict> {
    if tuple.len() < 2 {
        return Err(Error::invalid("cone membership needs at least two indices"));
    }
    if let Some(lambda) = geometric_ray(tuple, cfg.ray_tol) {
        return Ok(ConeVerdict::ray(lambda));
    }
    if let Some(cert) = outside_certificate(tuple) {
        return Ok(ConeVerdict::outside(cert));
    }
    if tuple.consecutive_degree().is_some() {
        for interval in split_ranked_intervals(tuple.values(), cfg.k_max) {
            if let Some(v) = interior_on(tuple, interval, cfg) {
                return Ok(v);
            }
        }
    }
    let c = ray_scale(tuple);
    for k in 1..=cfg.k_max {
        let f = 2f64.powi(k as i32);
        let Ok(interval) = Interval::new(c / f, c * f) else {
            continue;
        };
        if let Some(v) = interior_on(tuple, interval, cfg) {
            return Ok(v);
        }
    }
    Ok(ConeVerdict::unknown())
}

/// LP attempts on the best asymmetric intervals before the nested scan.
const RANKED_INTERVALS: usize = 8;

/// Intervals `[c/2^{i/2}, c·2^{j/2}]` around the ray scale whose split is
/// strictly feasible, best [`split_margin`] first. Asymmetric ends matter
/// when the mass sits far to one side of `c`: a symmetric interval wide
/// enough on that side starves the LP floor on the other.
fn split_ranked_intervals(values: &[f64], k_max: usize) -> Vec<Interval> {
    let Ok(t) = QuermassTuple::consecutive(1, values.to_vec()) else {
        return Vec::new();
    };
    let c = ray_scale(&t);
    let mut ranked: Vec<(f64, Interval)> = Vec::new();
    for i in 1..=2 * k_max {
        for j in 1..=2 * k_max {
            let (lo, hi) = (c / 2f64.powf(i as f64 / 2.0), c * 2f64.powf(j as f64 / 2.0));
            let Ok(interval) = Interval::new(lo, hi) else {
                continue;
            };
            let m = split_margin(values, interval);
            if m > 0.0 {
                ranked.push((m, interval));
            }
        }
    }
    ranked.sort_by(|x, y| y.0.total_cmp(&x.0));
    ranked.into_iter().take(RANKED_INTERVALS).map(|(_, iv)| iv).collect()
}

/// Best [`split_margin`] over nested intervals around the ray scale, scanning
/// factors `2^{k/2}`; positive exactly when some scanned interval has a
/// strictly feasible split. Consecutive indices only.
pub fn hankel_margin(values: &[f64], k_max: usize) -> f64 {
    let Ok(t) = QuermassTuple::consecutive(1, values.to_vec()) else {
        return f64::NEG_INFINITY;
    };
    let c = ray_scale(&t);
    let mut best = f64::NEG_INFINITY;
    for k in 1..=2 * k_max {
        let f = 2f64.powf(k as f64 / 2.0);
        if let Ok(interval) = Interval::new(c / f, c * f) {
            best = best.max(split_margin(values, interval));
        }
    }
    best
}

// ---- randomized cross-check ----

#[derive(Clone, Debug, Serialize)]
pub struct CrossCheck {
    pub pass: bool,
    pub trials: usize,
    /// Smallest `Σ c_i ω_i / Σ |c_i| ω_i` over the random trials.
    pub min_normalized: f64,
    /// Same quantity for the extremal eigenvector polynomials of the split.
    pub extremal_normalized: f64,
    /// The extremal value vanishes: the tuple touches the cone boundary.
    pub boundary_contact: bool,
    /// Coefficients of a polynomial positive on `[a, b]` with `Σ c_i ω_i ≤ 0`.
    pub witness: Option<Vec<f64>>,
}

/// Random polynomials positive on `[a, b]` from the Markov–Lukács forms
/// `q² + (t−a)(b−t)h²` (even degree) and `(t−a)q² + (b−t)h²` (odd degree),
/// paired with the tuple. Never the primary decision.
pub fn positivity_cross_check(tuple: &QuermassTuple, interval: Interval, trials: usize, seed: u64) -> Result<CrossCheck> {
    let m = tuple
        .consecutive_degree()
        .ok_or_else(|| Error::invalid("positivity cross-check needs consecutive indices 0..m"))?;
    if m < 1 {
        return Err(Error::invalid("positivity cross-check needs m >= 1"));
    }
    let omega = tuple.values();
    let (a, b) = (interval.a(), interval.b());
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let r = m / 2;
    let (q_len, h_len) = if m % 2 == 0 { (r + 1, r) } else { (r + 1, r + 1) };
    let pair = |q: &[f64], h: &[f64]| -> Vec<f64> {
        let q2 = poly::mul(q, q);
        let h2 = poly::mul(h, h);
        let p = if m % 2 == 0 {
            poly::add(&q2, &poly::mul(&poly::mul(&[-a, 1.0], &[b, -1.0]), &h2))
        } else {
            poly::add(&poly::mul(&[-a, 1.0], &q2), &poly::mul(&[b, -1.0], &h2))
        };
        let kappa = 1e-9 * p.iter().fold(0.0f64, |s, c| s.max(c.abs()));
        poly::add(&p, &[kappa])
    };
    let score = |p: &[f64]| -> (f64, f64) {
        let v: f64 = p.iter().zip(omega).map(|(c, w)| c * w).sum();
        let s: f64 = p.iter().zip(omega).map(|(c, w)| c.abs() * w).sum();
        (v, v / s.max(f64::MIN_POSITIVE))
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_norm = f64::INFINITY;
    let mut witness = None;
    for _ in 0..trials {
        // coefficients drawn in the centred variable x = (t − mid)/half
        let mut draw = |len: usize| -> Vec<f64> {
            let x: Vec<f64> = (0..len).map(|_| StandardNormal.sample(&mut rng)).collect();
            poly::compose_linear(&x, -mid / half, 1.0 / half)
        };
        let q = draw(q_len);
        let h = draw(h_len);
        let p = pair(&q, &h);
        let (v, nv) = score(&p);
        if nv < min_norm {
            min_norm = nv;
        }
        if v <= 0.0 && witness.is_none() {
            witness = Some(p);
        }
    }

    // extremal squares from the eigenvectors of the split matrices
    let (am, bm) = hankel_split(omega, interval)?;
    let mut extremal = f64::INFINITY;
    for (mat, is_q) in [(&am, true), (&bm, false)] {
        if mat.nrows() == 0 {
            continue;
        }
        let eig = nalgebra::SymmetricEigen::new(mat.clone());
        let k = (0..eig.eigenvalues.len())
            .min_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]))
            .unwrap_or(0);
        let v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
        let p = if is_q { pair(&v, &vec![0.0; h_len]) } else { pair(&vec![0.0; q_len], &v) };
        let (val, nv) = score(&p);
        extremal = extremal.min(nv);
        if val <= 0.0 && witness.is_none() {
            witness = Some(p);
        }
    }
    Ok(CrossCheck {
        pass: witness.is_none(),
        trials,
        min_normalized: min_norm,
        extremal_normalized: extremal,
        boundary_contact: extremal.abs() <= 1e-9,
        witness,
    })
}
