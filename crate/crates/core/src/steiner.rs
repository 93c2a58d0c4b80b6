//! Dual Steiner polynomials `f̃_{K;L}(z) = Σ C(n,i) W̃_i(K,L) z^i`: roots,
//! the root transformations, derivative and antiderivative realization,
//! stability and the real-root rigidity check.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::body::{is_dilate_range, ratio_range, StarBody};
use crate::error::{Error, Result};
use crate::grid::SphereGrid;
use crate::moment::{geometric_ray, hankel_margin, MomentConfig};
use crate::optimize::golden_max;
use crate::poly;
use crate::quermass::{full_tuple, full_tuple_auto, QuermassTuple};
use crate::special::binomial;
use crate::synth::{realize_pair_with, Realization};

const EPS: f64 = f64::EPSILON;
const MAX_SWEEPS: usize = 500;
/// Single-linkage radius, relative to modulus, for candidate clusters.
const CLUSTER_RADIUS: f64 = 5e-2;
const MIN_CLUSTER_RADIUS: f64 = 1e-7;
/// A cluster is one multiple root when every lower derivative vanishes at
/// its refined centre to this many ulps of the Horner magnitude.
const MULTIPLICITY_TOL: f64 = 256.0 * EPS;
const REAL_TOL: f64 = 1e-10;
/// Accepted relative residual for a claimed root.
pub const ROOT_CHECK_TOL: f64 = 1e-8;
pub const STABILITY_TAU: f64 = 1e-9;
pub const HULL_SLACK: f64 = 1e-9;
pub const DEFAULT_NONSTABLE_BUDGET: usize = 200;

/// The pair a polynomial was computed from.
#[derive(Clone, Debug)]
pub struct Provenance {
    pub k: StarBody,
    pub l: StarBody,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "PolyRepr", into = "PolyRepr")]
pub struct DualSteinerPoly {
    dim: usize,
    coeffs: Vec<f64>,
    provenance: Option<Arc<Provenance>>,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    dim: usize,
    coeffs: Vec<f64>,
}

impl TryFrom<PolyRepr> for DualSteinerPoly {
    type Error = Error;
    fn try_from(r: PolyRepr) -> Result<Self> {
        DualSteinerPoly::from_coeffs(r.dim, r.coeffs)
    }
}

impl From<DualSteinerPoly> for PolyRepr {
    fn from(p: DualSteinerPoly) -> Self {
        PolyRepr { dim: p.dim, coeffs: p.coeffs }
    }
}

impl DualSteinerPoly {
    /// Ascending coefficients `c_0..c_n`, all positive.
    pub fn from_coeffs(dim: usize, coeffs: Vec<f64>) -> Result<Self> {
        if dim < 1 {
            return Err(Error::invalid("dual Steiner polynomials need n >= 1"));
        }
        if coeffs.len() != dim + 1 {
            return Err(Error::invalid(format!(
                "degree-{dim} polynomial needs {} coefficients, got {}",
                dim + 1,
                coeffs.len()
            )));
        }
        if let Some(c) = coeffs.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
            return Err(Error::invalid(format!("coefficients must be positive and finite, got {c}")));
        }
        Ok(DualSteinerPoly { dim, coeffs, provenance: None })
    }

    /// From `(W̃_0, …, W̃_n)`.
    pub fn from_values(dim: usize, values: &[f64]) -> Result<Self> {
        if values.len() != dim + 1 {
            return Err(Error::invalid(format!("expected {} values, got {}", dim + 1, values.len())));
        }
        let coeffs = values.iter().enumerate().map(|(i, w)| binomial(dim, i) * w).collect();
        Self::from_coeffs(dim, coeffs)
    }

    /// From a tuple with indices exactly `0..=n`.
    pub fn from_tuple(tuple: &QuermassTuple) -> Result<Self> {
        match tuple.consecutive_degree() {
            Some(m) if m == tuple.dim() => Self::from_values(m, tuple.values()),
            _ => Err(Error::invalid(format!(
                "polynomial needs the full index set 0..={}",
                tuple.dim()
            ))),
        }
    }

    pub fn from_pair(k: &StarBody, l: &StarBody, grid: &SphereGrid) -> Result<Self> {
        let tuple = full_tuple(k, l, grid)?;
        Ok(Self::from_tuple(&tuple)?.with_provenance(k, l))
    }

    /// Exact 1-D rule when available, else the shared default grid.
    pub fn from_pair_auto(k: &StarBody, l: &StarBody) -> Result<Self> {
        let tuple = full_tuple_auto(k, l)?;
        Ok(Self::from_tuple(&tuple)?.with_provenance(k, l))
    }

    fn with_provenance(mut self, k: &StarBody, l: &StarBody) -> Self {
        self.provenance = Some(Arc::new(Provenance { k: k.clone(), l: l.clone() }));
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_deref()
    }

    /// `W̃_i = c_i / C(n, i)`.
    pub fn quermass(&self) -> Vec<f64> {
        self.coeffs.iter().enumerate().map(|(i, c)| c / binomial(self.dim, i)).collect()
    }

    pub fn tuple(&self) -> Result<QuermassTuple> {
        QuermassTuple::consecutive(self.dim, self.quermass())
    }

    /// `max c_i`.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m: f64, c| m.max(*c))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        poly::eval_complex(&self.coeffs, z)
    }

    /// `|f̃(z)| / Σ |c_i| |z|^i`.
    pub fn relative_residual(&self, z: Complex64) -> f64 {
        self.eval(z).norm() / horner_magnitude(&self.coeffs, z)
    }

    /// Relative condition number `Σ|c_i||z|^i / (|z|·|f̃'(z)|)` of a root:
    /// coefficient perturbations of relative size `δ` move it by about
    /// `κ·δ·|z|`. Infinite at multiple roots.
    pub fn root_condition(&self, z: Complex64) -> f64 {
        let d = poly::eval_complex(&poly::derivative(&self.coeffs), z).norm();
        horner_magnitude(&self.coeffs, z) / (z.norm() * d)
    }

    /// `f̃_{L;K}`: reversed coefficients, swapped provenance.
    pub fn reciprocal(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        DualSteinerPoly {
            dim: self.dim,
            coeffs,
            provenance: self
                .provenance
                .as_ref()
                .map(|p| Arc::new(Provenance { k: p.l.clone(), l: p.k.clone() })),
        }
    }

    pub fn roots(&self) -> RootSet {
        let roots = polynomial_roots(&self.coeffs);
        let scale = self.scale();
        let residual = roots.iter().map(|&g| self.eval(g).norm()).fold(0.0, f64::max) / scale;
        RootSet { roots, residual }
    }

    /// Max relative gap between the elementary symmetric functions of the
    /// roots and `(−1)^j C(n,j) W̃_{n−j} / W̃_n`.
    pub fn vieta_deviation(&self, roots: &RootSet) -> f64 {
        let monic = poly::from_roots(&roots.roots);
        let lead = self.coeffs[self.dim];
        monic
            .iter()
            .zip(&self.coeffs)
            .map(|(m, c)| (m - c / lead).abs() / (c / lead))
            .fold(0.0, f64::max)
    }

    /// Max relative gap of `f̃_{K;L}(z) = z^n f̃_{L;K}(1/z)` at seeded points
    /// with `|z| ∈ [0.2, 5]`.
    pub fn reciprocity_deviation(&self, swapped: &DualSteinerPoly, points: usize, seed: u64) -> Result<f64> {
        Error::check_dim(self.dim, swapped.dim)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..points {
            let r = (rng.random_range(-1.0..1.0) * 5f64.ln()).exp();
            let z = Complex64::from_polar(r, rng.random_range(0.0..2.0 * PI));
            let lhs = self.eval(z);
            let rhs = z.powu(self.dim as u32) * swapped.eval(z.inv());
            worst = worst.max((lhs - rhs).norm() / horner_magnitude(&self.coeffs, z));
        }
        Ok(worst)
    }

    fn require_provenance(&self) -> Result<&Provenance> {
        self.provenance()
            .ok_or_else(|| Error::invalid("this operation needs the polynomial's body pair"))
    }
}

/// Roots of many polynomials in parallel, in input order.
pub fn roots_batch(polys: &[DualSteinerPoly]) -> Vec<RootSet> {
    polys.par_iter().map(DualSteinerPoly::roots).collect()
}

/// `n` roots, conjugate-paired, sorted by real part then descending
/// imaginary part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "RootSetRepr", into = "RootSetRepr")]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    /// `max |f̃(γ)| / max c_i`.
    pub residual: f64,
}

#[derive(Serialize, Deserialize)]
struct RootSetRepr {
    roots: Vec<[f64; 2]>,
    residual: f64,
}

impl From<RootSet> for RootSetRepr {
    fn from(r: RootSet) -> Self {
        RootSetRepr { roots: r.roots.iter().map(|z| [z.re, z.im]).collect(), residual: r.residual }
    }
}

impl From<RootSetRepr> for RootSet {
    fn from(r: RootSetRepr) -> Self {
        RootSet { roots: r.roots.iter().map(|&[re, im]| Complex64::new(re, im)).collect(), residual: r.residual }
    }
}

impl RootSet {
    pub fn max_real_part(&self) -> f64 {
        self.roots.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `min |γ − z| / max(1, |z|)`.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        self.roots.iter().map(|g| (g - z).norm()).fold(f64::INFINITY, f64::min) / z.norm().max(1.0)
    }

    /// Largest deviation from conjugate closure.
    pub fn conjugate_gap(&self) -> f64 {
        self.roots
            .iter()
            .map(|g| self.roots.iter().map(|h| (h - g.conj()).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    }
}

// ---- root finding ----

fn horner_magnitude(p: &[f64], z: Complex64) -> f64 {
    let r = z.norm();
    p.iter().rev().fold(0.0, |acc, c| acc * r + c.abs())
}

/// Positive root of `r^n = Σ_{i<n} |a_i| r^i` for monic `a`.
fn cauchy_radius(a: &[f64]) -> f64 {
    let n = a.len() - 1;
    let q = |r: f64| r.powi(n as i32) - (0..n).map(|i| a[i].abs() * r.powi(i as i32)).sum::<f64>();
    let dq = |r: f64| {
        n as f64 * r.powi(n as i32 - 1) - (1..n).map(|i| i as f64 * a[i].abs() * r.powi(i as i32 - 1)).sum::<f64>()
    };
    // Fujiwara's bound lies above the root; Newton then decreases monotonically
    let mut r = (0..n)
        .map(|i| 2.0 * (a[i].abs() / if i == 0 { 2.0 } else { 1.0 }).powf(1.0 / (n - i) as f64))
        .fold(0.0, f64::max);
    for _ in 0..100 {
        let step = q(r) / dq(r);
        if !step.is_finite() || step <= r * 1e-15 {
            break;
        }
        r -= step;
    }
    r
}

fn aberth(a: &[f64]) -> Vec<Complex64> {
    let n = a.len() - 1;
    let da = poly::derivative(a);
    let radius = cauchy_radius(a);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * PI * k as f64 / n as f64 + PI / (2.0 * n as f64) + 0.4;
            Complex64::from_polar(radius * (1.0 + 0.01 * k as f64 / n as f64), angle)
        })
        .collect();
    let mut done = vec![false; n];
    for _ in 0..MAX_SWEEPS {
        let mut moved = false;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let zk = z[k];
            let p = poly::eval_complex(a, zk);
            if p.norm() <= 4.0 * EPS * horner_magnitude(a, zk) {
                done[k] = true;
                continue;
            }
            moved = true;
            let w = p / poly::eval_complex(&da, zk);
            let s: Complex64 = (0..n).filter(|&j| j != k).map(|j| 1.0 / (zk - z[j])).sum();
            let d = w / (1.0 - w * s);
            if d.is_finite() {
                z[k] = zk - d;
                if d.norm() <= EPS * zk.norm() {
                    done[k] = true;
                }
            } else {
                z[k] = zk * Complex64::new(1.0 + 1e-8, 1e-8);
            }
        }
        if !moved {
            break;
        }
    }
    z
}

fn newton(p: &[f64], mut z: Complex64, steps: usize) -> Complex64 {
    let dp = poly::derivative(p);
    let mut best = poly::eval_complex(p, z).norm();
    for _ in 0..steps {
        let next = z - poly::eval_complex(p, z) / poly::eval_complex(&dp, z);
        let val = poly::eval_complex(p, next).norm();
        if !next.is_finite() || val >= best {
            break;
        }
        z = next;
        best = val;
    }
    z
}

fn nth_derivative(p: &[f64], j: usize) -> Vec<f64> {
    (0..j).fold(p.to_vec(), |q, _| poly::derivative(&q))
}

/// Replaces each verified cluster by its multiple root and polishes the rest.
/// Clusters failing the multiplicity test are re-split at a smaller radius.
fn merge_clusters(a: &[f64], z: &mut [Complex64]) {
    let all: Vec<usize> = (0..z.len()).collect();
    merge_within(a, z, &all, CLUSTER_RADIUS);
}

fn merge_within(a: &[f64], z: &mut [Complex64], members: &[usize], radius: f64) {
    let n = members.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let (zi, zj) = (z[members[i]], z[members[j]]);
            if (zi - zj).norm() <= radius * zi.norm().max(zj.norm()) {
                let (ri, rj) = (find(&mut label, i), find(&mut label, j));
                label[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for (i, &member) in members.iter().enumerate() {
        let r = find(&mut label, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(member);
    }
    for g in groups {
        let m = g.len();
        if m >= 2 {
            let centre = g.iter().map(|&i| z[i]).sum::<Complex64>() / m as f64;
            let c = newton(&nth_derivative(a, m - 1), centre, 30);
            let multiple = (0..m).all(|j| {
                let q = nth_derivative(a, j);
                poly::eval_complex(&q, c).norm() <= MULTIPLICITY_TOL * horner_magnitude(&q, c)
            });
            if multiple {
                for &i in &g {
                    z[i] = c;
                }
                continue;
            }
            if radius > MIN_CLUSTER_RADIUS {
                merge_within(a, z, &g, radius / 8.0);
                continue;
            }
        }
        for &i in &g {
            z[i] = newton(a, z[i], 5);
        }
    }
}

/// Pairs each root with the nearest candidate for its conjugate and
/// averages; leftovers and near-real roots become real.
fn symmetrize(z: &mut Vec<Complex64>) {
    let mut rest = std::mem::take(z);
    while !rest.is_empty() {
        let i = (0..rest.len())
            .max_by(|&x, &y| rest[x].im.abs().total_cmp(&rest[y].im.abs()).then(y.cmp(&x)))
            .expect("non-empty");
        let r = rest.swap_remove(i);
        if rest.is_empty() || r.im.abs() <= REAL_TOL * r.norm() {
            z.push(Complex64::new(r.re, 0.0));
            continue;
        }
        let target = r.conj();
        let j = (0..rest.len())
            .min_by(|&x, &y| (rest[x] - target).norm().total_cmp(&(rest[y] - target).norm()))
            .expect("non-empty");
        let s = rest.swap_remove(j);
        let re = 0.5 * (r.re + s.re);
        let im = 0.5 * (r.im.abs() + s.im.abs());
        z.push(Complex64::new(re, im));
        z.push(Complex64::new(re, -im));
    }
}

/// All complex roots of a real polynomial with ascending coefficients and
/// non-zero leading term: Aberth–Ehrlich from a perturbed circle of Cauchy
/// radius, cluster merging, Newton polishing and conjugate symmetrization.
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[n];
    let a: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    if n == 1 {
        return vec![Complex64::new(-a[0], 0.0)];
    }
    let mut z = aberth(&a);
    merge_clusters(&a, &mut z);
    symmetrize(&mut z);
    z.sort_by(|x, y| x.re.total_cmp(&y.re).then(y.im.total_cmp(&x.im)));
    z
}

// ---- convex hulls ----

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Counter-clockwise hull vertices; collinear points dropped.
pub fn convex_hull(points: &[Complex64]) -> Vec<Complex64> {
    let mut p = points.to_vec();
    p.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    p.dedup();
    if p.len() <= 2 {
        return p;
    }
    let mut hull: Vec<Complex64> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Complex64>> =
            if pass == 0 { Box::new(p.iter()) } else { Box::new(p.iter().rev()) };
        for &q in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0.0 {
                hull.pop();
            }
            hull.push(q);
        }
        hull.pop();
    }
    hull
}

fn segment_distance(a: Complex64, b: Complex64, z: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}

/// `z ∈ conv(points)` up to an absolute `slack`.
pub fn hull_contains(points: &[Complex64], z: Complex64, slack: f64) -> bool {
    let hull = convex_hull(points);
    match hull.len() {
        0 => false,
        1 => (z - hull[0]).norm() <= slack,
        2 => segment_distance(hull[0], hull[1], z) <= slack,
        m => (0..m).all(|k| {
            let (a, b) = (hull[k], hull[(k + 1) % m]);
            cross(a, b, z) / (b - a).norm() >= -slack
        }),
    }
}

/// Every `inner` point lies in `conv(outer)`, with slack relative to the
/// largest outer modulus.
pub fn lucas_contained(inner: &[Complex64], outer: &[Complex64], rel_slack: f64) -> bool {
    let scale = outer.iter().map(|z| z.norm()).fold(0.0, f64::max);
    inner.iter().all(|&z| hull_contains(outer, z, rel_slack * scale))
}

fn coeff_deviation(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x / y - 1.0).abs()).fold(0.0, f64::max)
}

// ---- root transformations ----

/// Operations on the first body with a predictable effect on a root.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum RootTransform {
    /// `λK`: root `λγ`.
    Scale(f64),
    /// `K +̃ μL`: root `γ − μ`.
    Shift(f64),
    /// `ρK +̃ (ρ−1)aL` for `γ = a + bi`, `a < 0`: root `a + ρbi`.
    Compress(f64),
}

#[derive(Clone, Debug)]
pub struct TransformedRoot {
    pub k: StarBody,
    pub l: StarBody,
    pub predicted: Complex64,
}

impl TransformedRoot {
    /// Relative distance from the prediction to the nearest recomputed root.
    pub fn recomputed_gap(&self) -> Result<f64> {
        Ok(DualSteinerPoly::from_pair_auto(&self.k, &self.l)?.roots().distance_to(self.predicted))
    }
}

pub fn transform_root(p: &DualSteinerPoly, gamma: Complex64, t: RootTransform) -> Result<TransformedRoot> {
    let prov = p.require_provenance()?;
    let res = p.relative_residual(gamma);
    if !(res <= ROOT_CHECK_TOL) {
        return Err(Error::invalid(format!("{gamma} is not a root (relative residual {res:.3e})")));
    }
    let (k, l) = (prov.k.clone(), prov.l.clone());
    let (k_new, predicted) = match t {
        RootTransform::Scale(lambda) => (StarBody::dilate(k, lambda)?, gamma * lambda),
        RootTransform::Shift(mu) => {
            if !(mu >= 0.0 && mu.is_finite()) {
                return Err(Error::invalid(format!("shift must be non-negative, got {mu}")));
            }
            (StarBody::radial_sum(k, l.clone(), 1.0, mu)?, gamma - mu)
        }
        RootTransform::Compress(rho) => {
            if !(rho > 0.0 && rho <= 1.0) {
                return Err(Error::invalid(format!("compression factor must lie in (0, 1], got {rho}")));
            }
            if gamma.re >= 0.0 {
                return Err(Error::invalid("compression needs a root with negative real part"));
            }
            let a = gamma.re;
            (
                StarBody::radial_sum(k, l.clone(), rho, (rho - 1.0) * a)?,
                Complex64::new(a, rho * gamma.im),
            )
        }
    };
    Ok(TransformedRoot { k: k_new, l, predicted })
}

// ---- derivative and antiderivative ----

/// `f̃'` realized in dimension `n−1`.
#[derive(Clone, Debug)]
pub struct Descent {
    /// Coefficient derivative of the input.
    pub target: DualSteinerPoly,
    pub realization: Realization,
    /// Recomputed from the realized pair.
    pub poly: DualSteinerPoly,
    /// Max relative coefficient gap between `poly` and `target`.
    pub deviation: f64,
}

pub fn derivative_descend(p: &DualSteinerPoly) -> Result<Descent> {
    derivative_descend_with(p, &MomentConfig::default())
}

pub fn derivative_descend_with(p: &DualSteinerPoly, cfg: &MomentConfig) -> Result<Descent> {
    let n = p.dim;
    if n < 2 {
        return Err(Error::invalid("derivative descent needs n >= 2"));
    }
    let w = p.quermass();
    let lowered: Vec<f64> = (0..n).map(|j| n as f64 * w[j + 1]).collect();
    let tuple = QuermassTuple::consecutive(n - 1, lowered)?;
    let target = DualSteinerPoly::from_tuple(&tuple)?;
    let realization = realize_pair_with(&tuple, n - 1, cfg)?;
    let poly = DualSteinerPoly::from_pair_auto(&realization.k, &realization.l)?;
    let deviation = coeff_deviation(poly.coeffs(), target.coeffs());
    Ok(Descent { target, realization, poly, deviation })
}

/// A polynomial in dimension `n+1` whose derivative is the input.
#[derive(Clone, Debug)]
pub struct Lift {
    /// The free value `W̃_0` of the lifted tuple.
    pub constant: f64,
    /// Hankel split margin of the lifted tuple at `constant`.
    pub margin: f64,
    pub target: DualSteinerPoly,
    pub realization: Realization,
    pub poly: DualSteinerPoly,
    /// Max relative gap between `poly'` and the input coefficients.
    pub deviation: f64,
}

const LIFT_SCAN: usize = 80;
const LIFT_CANDIDATES: usize = 8;

pub fn antiderivative_lift(p: &DualSteinerPoly) -> Result<Lift> {
    antiderivative_lift_with(p, &MomentConfig::default())
}

/// The lifted tuple is `(C, W̃_0, …, W̃_n)/(n+1)` with `C` free. On a ray the
/// ray completion is used; otherwise `C = C_0·2^s` with `C_0 = ω_1²/ω_2` the
/// log-convexity floor and `s ≥ 0` picked from a scan of the Hankel split
/// margin: golden section at an interior peak, else the smallest `s` within
/// half of the largest margin.
pub fn antiderivative_lift_with(p: &DualSteinerPoly, cfg: &MomentConfig) -> Result<Lift> {
    let n = p.dim;
    let w = p.quermass();
    let tail: Vec<f64> = w.iter().map(|x| x / (n + 1) as f64).collect();
    let lifted = |c: f64| {
        let mut v = Vec::with_capacity(n + 2);
        v.push(c);
        v.extend_from_slice(&tail);
        v
    };
    let base = QuermassTuple::consecutive(n, w.clone())?;
    let candidates: Vec<(f64, f64)> = if let Some(lambda) = geometric_ray(&base, cfg.ray_tol) {
        vec![(tail[0] / lambda, f64::INFINITY)]
    } else {
        let c0 = tail[0] * tail[0] / tail[1];
        let margin_at = |s: f64| hankel_margin(&lifted(c0 * s.exp2()), cfg.k_max);
        let scan: Vec<(f64, f64)> = (0..=LIFT_SCAN)
            .map(|k| {
                let s = k as f64 / 4.0;
                (s, margin_at(s))
            })
            .collect();
        let best = (0..scan.len()).fold(0, |b, k| if scan[k].1 > scan[b].1 { k } else { b });
        let top = scan[best].1;
        let mut picks = Vec::new();
        if best + 1 < scan.len() {
            // an interior peak: refine it
            let s = scan[best].0;
            picks.push(golden_max(margin_at, (s - 0.25).max(0.0), s + 0.25, 1e-7));
        }
        // a margin still rising at the scan edge saturates as C grows, and huge C
        // only widens the interval; prefer the smallest C within half the supremum
        let mut rest: Vec<(f64, f64)> = scan.iter().copied().filter(|&(_, m)| m >= 0.5 * top).collect();
        rest.extend(scan.iter().copied().filter(|&(_, m)| m > 0.0 && m < 0.5 * top));
        picks.extend(rest.into_iter().take(LIFT_CANDIDATES));
        picks.into_iter().filter(|&(_, m)| m > 0.0).map(|(s, m)| (c0 * s.exp2(), m)).collect()
    };
    let mut last: Option<Error> = None;
    for (c, margin) in candidates {
        let tuple = QuermassTuple::consecutive(n + 1, lifted(c))?;
        match realize_pair_with(&tuple, n + 1, cfg) {
            Ok(realization) => {
                let target = DualSteinerPoly::from_tuple(&tuple)?;
                let poly = DualSteinerPoly::from_pair_auto(&realization.k, &realization.l)?;
                let deviation = coeff_deviation(&poly::derivative(poly.coeffs()), p.coeffs());
                return Ok(Lift { constant: c, margin, target, realization, poly, deviation });
            }
            Err(e @ Error::Refusal { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::refusal("no interior completion of the lifted tuple was found", None)))
}

// ---- stability ----

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Nonstable,
    Marginal,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    /// Routh–Hurwitz decision.
    pub verdict: Stability,
    pub routh_column: Vec<f64>,
    pub max_real_part: f64,
    /// Whether the computed roots agree with the verdict at margin τ.
    pub roots_agree: bool,
}

const ROUTH_ZERO: f64 = 1e-12;

/// Routh table on ascending coefficients; returns the decision and the
/// first column. A vanishing pivot is replaced by a tiny positive value and
/// marks the result marginal unless a sign change already decides it.
pub fn routh_hurwitz(coeffs: &[f64]) -> (Stability, Vec<f64>) {
    let n = coeffs.len() - 1;
    let desc: Vec<f64> = coeffs.iter().rev().copied().collect();
    let width = n / 2 + 1;
    let row = |off: usize| -> Vec<f64> { (0..width).map(|j| desc.get(2 * j + off).copied().unwrap_or(0.0)).collect() };
    let mut prev = row(0);
    let mut cur = row(1);
    let mut column = vec![prev[0]];
    let mut marginal = false;
    for r in 1..=n {
        let size = prev.iter().chain(&cur).fold(0.0, |m: f64, x| m.max(x.abs()));
        if cur.iter().all(|x| x.abs() <= ROUTH_ZERO * size) {
            marginal = true;
            break;
        }
        if cur[0].abs() <= ROUTH_ZERO * size {
            marginal = true;
            cur[0] = ROUTH_ZERO * size;
        }
        column.push(cur[0]);
        if r == n {
            break;
        }
        let next: Vec<f64> = (0..width)
            .map(|j| {
                let p1 = prev.get(j + 1).copied().unwrap_or(0.0);
                let c1 = cur.get(j + 1).copied().unwrap_or(0.0);
                (cur[0] * p1 - prev[0] * c1) / cur[0]
            })
            .collect();
        prev = std::mem::replace(&mut cur, next);
    }
    let changes = column.windows(2).filter(|w| (w[0] > 0.0) != (w[1] > 0.0)).count();
    let verdict = if changes > 0 {
        Stability::Nonstable
    } else if marginal {
        Stability::Marginal
    } else {
        Stability::Stable
    };
    (verdict, column)
}

pub fn stability_check(p: &DualSteinerPoly) -> StabilityReport {
    let (verdict, routh_column) = routh_hurwitz(&p.coeffs);
    let roots = p.roots();
    let max_real_part = roots.max_real_part();
    let tau = STABILITY_TAU * roots.roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let roots_agree = match verdict {
        Stability::Stable => max_real_part < -tau,
        Stability::Nonstable => max_real_part > tau,
        Stability::Marginal => max_real_part.abs() <= tau.sqrt().max(tau),
    };
    StabilityReport { verdict, routh_column, max_real_part, roots_agree }
}

/// A realized pair whose polynomial has a root in the open right half-plane.
#[derive(Clone, Debug)]
pub struct NonstableWitness {
    pub tuple: QuermassTuple,
    pub realization: Realization,
    pub poly: DualSteinerPoly,
    /// Upper half-plane root with positive real part.
    pub root: Complex64,
    /// `|f̃(root)| / max c_i`.
    pub residual: f64,
    pub attempts: usize,
}

/// Seeded search over moment tuples of `δ_1 + w·δ_R` plus a small uniform
/// floor on `[1, R]`, `R ∈ [10, 1000]`, `w = R^{−e}`, until Routh–Hurwitz
/// reports non-stability and the tuple is realized.
pub fn nonstable_search(n: usize, seed: u64, budget: usize) -> Result<NonstableWitness> {
    if n < 3 {
        return Err(Error::invalid("every dual Steiner polynomial with n <= 2 is stable"));
    }
    let cfg = MomentConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=budget {
        let big_r = 10f64.powf(rng.random_range(1.0..3.0));
        let w = big_r.powf(-rng.random_range(1.0..n as f64 - 0.5));
        let floor = 1e-3 / (big_r - 1.0);
        let values: Vec<f64> = (0..=n)
            .map(|i| {
                let ip = i as f64 + 1.0;
                1.0 + w * big_r.powi(i as i32) + floor * (big_r.powf(ip) - 1.0) / ip
            })
            .collect();
        let tuple = QuermassTuple::consecutive(n, values)?;
        let candidate = DualSteinerPoly::from_tuple(&tuple)?;
        if routh_hurwitz(candidate.coeffs()).0 != Stability::Nonstable {
            continue;
        }
        let realization = match realize_pair_with(&tuple, n, &cfg) {
            Ok(r) => r,
            Err(Error::Refusal { .. }) => continue,
            Err(e) => return Err(e),
        };
        let poly = DualSteinerPoly::from_pair_auto(&realization.k, &realization.l)?;
        let roots = poly.roots();
        let Some(&root) = roots
            .roots
            .iter()
            .filter(|z| z.im >= 0.0)
            .max_by(|x, y| x.re.total_cmp(&y.re))
        else {
            continue;
        };
        if root.re <= 0.0 {
            continue;
        }
        let residual = poly.eval(root).norm() / poly.scale();
        return Ok(NonstableWitness { tuple, realization, poly, root, residual, attempts: attempt });
    }
    Err(Error::BudgetExhausted(budget))
}

// ---- rigidity ----

#[derive(Clone, Debug, Serialize)]
pub struct RigidityReport {
    pub all_real: bool,
    /// Roots coincide within 1e-6 relative; checked when all are real.
    pub coincide: Option<bool>,
    /// Dilate detector on the provenance pair; run when all roots are real.
    pub dilate: Option<bool>,
    /// `(e_j² − e_{j−1}e_{j+1}) / e_j²` with `e_j = s_j / C(n, j)`.
    pub newton_slack: Vec<f64>,
    /// Newton's inequalities hold on the root multiset.
    pub newton_holds: bool,
}

pub const REAL_ROOT_TOL: f64 = 1e-8;
pub const COINCIDE_TOL: f64 = 1e-6;

/// All roots real forces a single repeated root and a dilate pair; a
/// violation is an invariant failure.
pub fn real_roots_rigidity_check(p: &DualSteinerPoly) -> Result<RigidityReport> {
    let prov = p.require_provenance()?;
    let n = p.dim;
    let roots = p.roots();
    let all_real = roots.roots.iter().all(|z| z.im.abs() <= REAL_ROOT_TOL * z.norm().max(1.0));
    let monic = poly::from_roots(&roots.roots);
    let e: Vec<f64> = (0..=n)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * monic[n - j] / binomial(n, j)
        })
        .collect();
    let newton_slack: Vec<f64> = (1..n).map(|j| (e[j] * e[j] - e[j - 1] * e[j + 1]) / (e[j] * e[j])).collect();
    let newton_holds = newton_slack.iter().all(|&s| s >= -1e-10);
    let mut report = RigidityReport { all_real, coincide: None, dilate: None, newton_slack, newton_holds };
    if all_real {
        let scale = roots.roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let spread = roots.roots.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
            - roots.roots.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        let coincide = spread <= COINCIDE_TOL * scale;
        let grid = SphereGrid::shared_default(n)?;
        let (lo, hi) = ratio_range(&prov.k, &prov.l, &grid)?;
        let dilate = is_dilate_range(lo, hi);
        report.coincide = Some(coincide);
        report.dilate = Some(dilate);
        if !(coincide && dilate) {
            return Err(Error::InvariantViolation(format!(
                "all roots real but coincide={coincide}, dilate={dilate}; roots {:?}, ratio range [{lo}, {hi}]",
                roots.roots
            )));
        }
    }
    Ok(report)
}
