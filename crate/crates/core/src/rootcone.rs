//! Membership in the cone `R̃(n)` of upper half-plane roots of dual Steiner
//! polynomials.
//!
//! IN verdicts always carry a pair of bodies whose polynomial vanishes at the
//! query point, re-verified by quadrature. OUT verdicts come only from
//! certificates: positivity of the coefficients, the exact planar law
//! `Re z < 0`, and `b > √3·a` for `n = 3`. A failed search is UNKNOWN.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::body::StarBody;
use crate::error::{Error, Result};
use crate::format::sig15;
use crate::moment::{hankel_margin, interval_search_with, MomentConfig};
use crate::optimize::nelder_mead;
use crate::poly;
use crate::quermass::QuermassTuple;
use crate::special::binomial;
use crate::steiner::{antiderivative_lift_with, convex_hull, hull_contains, DualSteinerPoly, HULL_SLACK};
use crate::synth::{realize_from_verdict, realize_pair_with};

/// Max relative residual of the query point in an IN witness polynomial.
pub const WITNESS_TOL: f64 = 1e-8;
/// Max relative residual for constructed convex combinations.
pub const COMBINATION_TOL: f64 = 1e-7;
/// Relative imaginary part below which a query is on the real axis.
const REAL_AXIS_TOL: f64 = 1e-12;
/// Query radius of the boundary map; membership is scale invariant.
pub const MAP_RADIUS: f64 = 1.0;

fn ser_complex<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

fn ser_complex_vec<S: Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Membership {
    In,
    Out,
    Unknown,
}

/// A pair `(K, L)` whose polynomial has the query point as a root.
#[derive(Clone, Debug, Serialize)]
pub struct ConeWitness {
    /// `(W̃_0, …, W̃_n)` recomputed from the pair.
    pub tuple: Vec<f64>,
    pub k: StarBody,
    pub l: StarBody,
    /// Root of the witness polynomial nearest the query.
    #[serde(serialize_with = "ser_complex")]
    pub root: Complex64,
    /// Relative residual of the query point.
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConeQuery {
    pub n: usize,
    #[serde(serialize_with = "ser_complex")]
    pub z: Complex64,
    pub status: Membership,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ConeWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
}

impl ConeQuery {
    fn inside(n: usize, z: Complex64, w: ConeWitness) -> Self {
        ConeQuery { n, z, status: Membership::In, witness: Some(w), certificate: None }
    }

    fn outside(n: usize, z: Complex64, cert: String) -> Self {
        ConeQuery { n, z, status: Membership::Out, witness: None, certificate: Some(cert) }
    }

    fn unknown(n: usize, z: Complex64) -> Self {
        ConeQuery { n, z, status: Membership::Unknown, witness: None, certificate: None }
    }
}

fn check_query(n: usize, z: Complex64) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid("root cones are defined for n >= 2"));
    }
    if !(z.re.is_finite() && z.im.is_finite()) || z.im < 0.0 {
        return Err(Error::invalid(format!("query {z} must lie in the closed upper half-plane")));
    }
    Ok(())
}

fn on_real_axis(z: Complex64) -> bool {
    z.im <= REAL_AXIS_TOL * z.norm()
}

/// Recomputes the pair's polynomial and checks `z` is a root of it.
pub fn verify_witness(k: &StarBody, l: &StarBody, z: Complex64, tol: f64) -> Result<ConeWitness> {
    let p = DualSteinerPoly::from_pair_auto(k, l)?;
    let residual = p.relative_residual(z);
    if !(residual <= tol) {
        return Err(Error::InvariantViolation(format!(
            "witness polynomial has relative residual {residual:.3e} at {z}"
        )));
    }
    let roots = p.roots();
    let root = roots
        .roots
        .iter()
        .copied()
        .min_by(|a, b| (a - z).norm().total_cmp(&(b - z).norm()))
        .expect("positive degree");
    Ok(ConeWitness { tuple: p.quermass(), k: k.clone(), l: l.clone(), root, residual })
}

/// `(c·B^n, B^n)`, whose polynomial is `|B^n|(c + z)^n`.
pub fn dilate_witness(n: usize, c: f64, z: Complex64) -> Result<ConeWitness> {
    let l = StarBody::unit_ball(n);
    let k = StarBody::ball(n, c)?;
    verify_witness(&k, &l, z, WITNESS_TOL)
}

/// The interval-free reason `z ∉ R̃(n)`, if one applies.
pub fn certificate(n: usize, z: Complex64) -> Option<String> {
    if z.im == 0.0 && z.re >= 0.0 {
        return Some("non-negative real axis: positive coefficients exclude roots in [0, inf)".into());
    }
    if n == 2 && z.re >= 0.0 {
        return Some("n = 2: every root has negative real part".into());
    }
    if n == 3 && violates_n3_bound(z) {
        return Some("n = 3: a root a+bi with a > 0 needs b > sqrt(3) a".into());
    }
    None
}

/// True when `z = a + bi` violates the `n = 3` bound, i.e. `a > 0` and
/// `b ≤ √3·a`.
pub fn violates_n3_bound(z: Complex64) -> bool {
    z.re > 0.0 && z.im <= 3f64.sqrt() * z.re
}

/// Exact planar rule: IN iff `Re z < 0`, witnessed by realizing
/// `(|z|², −Re z, 1)`, whose polynomial is `|z|² − 2 Re z·w + w²`.
pub fn membership_exact_n2(z: Complex64) -> Result<ConeQuery> {
    check_query(2, z)?;
    if let Some(cert) = certificate(2, z) {
        return Ok(ConeQuery::outside(2, z, cert));
    }
    if on_real_axis(z) {
        return Ok(ConeQuery::inside(2, z, dilate_witness(2, -z.re, z)?));
    }
    let tuple = QuermassTuple::consecutive(2, vec![z.norm_sqr(), -z.re, 1.0])?;
    let realization = realize_pair_with(&tuple, 2, &MomentConfig::default())?;
    let w = verify_witness(&realization.k, &realization.l, z, WITNESS_TOL)?;
    Ok(ConeQuery::inside(2, z, w))
}

/// Search tunables.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Objective evaluations per multistart.
    pub budget: usize,
    pub starts: usize,
    pub seed: u64,
    pub moment: MomentConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { budget: 400, starts: 16, seed: 0, moment: MomentConfig::default() }
    }
}

/// Hankel margin above which a local search stops and tries to realize.
const MARGIN_TARGET: f64 = 1e-2;

/// `(W̃_0..W̃_n)` of the monic polynomial with roots `z, z̄` and `Γ`, where
/// `Γ` holds `⌊(n−2)/2⌋` left half-plane conjugate pairs
/// `−e^{x_{2p}} ± i e^{x_{2p+1}}` and, for odd `n`, the real root `−e^{x_last}`.
fn sigma(n: usize, z: Complex64, x: &[f64]) -> Vec<f64> {
    let mut roots = vec![z, z.conj()];
    for p in 0..(n - 2) / 2 {
        let g = Complex64::new(-x[2 * p].exp(), x[2 * p + 1].exp());
        roots.push(g);
        roots.push(g.conj());
    }
    if n % 2 == 1 {
        roots.push(Complex64::new(-x[x.len() - 1].exp(), 0.0));
    }
    poly::from_roots(&roots).iter().enumerate().map(|(i, c)| c / binomial(n, i)).collect()
}

fn gamma_dims(n: usize) -> usize {
    2 * ((n - 2) / 2) + n % 2
}

/// Minimized by the local search: `−margin` for positive tuples, else a
/// penalty above 1 growing with the most negative coefficient.
fn objective(values: &[f64], k_max: usize) -> f64 {
    let top = values.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    let low = values.iter().copied().fold(f64::INFINITY, f64::min);
    if !(low > 0.0) {
        return 1.0 - low / top.max(f64::MIN_POSITIVE);
    }
    let m = hankel_margin(values, k_max);
    if m.is_finite() {
        -m
    } else {
        1.0
    }
}

fn try_realize(n: usize, z: Complex64, values: Vec<f64>, cfg: &MomentConfig) -> Option<ConeWitness> {
    let tuple = QuermassTuple::consecutive(n, values).ok()?;
    let verdict = interval_search_with(&tuple, cfg).ok()?;
    if !verdict.is_realizable() {
        return None;
    }
    let realization = realize_from_verdict(&tuple, n, verdict).ok()?;
    verify_witness(&realization.k, &realization.l, z, WITNESS_TOL).ok()
}

/// Certificates first, then the dilate and planar rules, then a seeded
/// Nelder–Mead multistart over the remaining roots `Γ` maximizing the Hankel
/// split margin of `σ(z, z̄, Γ)`; the first start (in order) whose tuple is
/// realized and verified wins.
pub fn membership_search(z: Complex64, n: usize, cfg: &SearchConfig) -> Result<ConeQuery> {
    check_query(n, z)?;
    if let Some(cert) = certificate(n, z) {
        return Ok(ConeQuery::outside(n, z, cert));
    }
    if on_real_axis(z) {
        return Ok(ConeQuery::inside(n, z, dilate_witness(n, -z.re, z)?));
    }
    if n == 2 {
        return membership_exact_n2(z);
    }
    let dims = gamma_dims(n);
    let scale = z.norm().ln();
    let found: Vec<Option<ConeWitness>> = (0..cfg.starts)
        .into_par_iter()
        .map(|start| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(start as u64);
            let x0: Vec<f64> = (0..dims).map(|_| scale + rng.random_range(-2.0..2.0)).collect();
            let k_max = cfg.moment.k_max;
            let best = nelder_mead(
                |x| objective(&sigma(n, z, x), k_max),
                &x0,
                0.5,
                cfg.budget,
                1e-12,
                |v| v <= -MARGIN_TARGET,
            );
            if best.value >= 0.0 {
                return None;
            }
            try_realize(n, z, sigma(n, z, &best.x), &cfg.moment)
        })
        .collect();
    Ok(match found.into_iter().flatten().next() {
        Some(w) => ConeQuery::inside(n, z, w),
        None => ConeQuery::unknown(n, z),
    })
}

// ---- convexity ----

/// `M` with `f̃_{M;L}(ργ₁ + (1−ρ)γ₂) = 0`, built from verified witnesses.
#[derive(Clone, Debug, Serialize)]
pub struct CombinationWitness {
    #[serde(serialize_with = "ser_complex")]
    pub target: Complex64,
    /// Witness for the other root sharing the second body `L`.
    pub shared: Option<ConeWitness>,
    pub witness: ConeWitness,
}

/// Follows the convexity construction: the root with the smaller argument
/// keeps its pair `(K₁, L)`; the other root is reached from it by scaling
/// and shifting; then `M = (1/μ)(K₁ +̃ (a₁ − ν)L)`.
pub fn convex_combination_witness(w1: &ConeWitness, w2: &ConeWitness, rho: f64) -> Result<CombinationWitness> {
    let n = w1.k.dim();
    Error::check_dim(n, w2.k.dim())?;
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::invalid(format!("combination weight must lie in (0, 1), got {rho}")));
    }
    let upper = |z: Complex64| if z.im < 0.0 { z.conj() } else { z };
    let (g1, g2) = (upper(w1.root), upper(w2.root));
    for (w, g) in [(w1, g1), (w2, g2)] {
        verify_witness(&w.k, &w.l, g, WITNESS_TOL)?;
    }
    let target = g1 * rho + g2 * (1.0 - rho);
    if on_real_axis(g1) && on_real_axis(g2) {
        let witness = dilate_witness(n, -target.re, target)?;
        return Ok(CombinationWitness { target, shared: None, witness });
    }
    // base: largest a/b among roots with b > 0
    let slope = |g: Complex64| if on_real_axis(g) { f64::NEG_INFINITY } else { g.re / g.im };
    let ((base, gb, wb), (_, go, wo)) = if slope(g1) >= slope(g2) {
        ((w1, g1, rho), (w2, g2, 1.0 - rho))
    } else {
        ((w2, g2, 1.0 - rho), (w1, g1, rho))
    };
    let l = base.l.clone();
    let shared_k = if on_real_axis(go) {
        StarBody::dilate(l.clone(), -go.re)?
    } else {
        let lambda = go.im / gb.im;
        let mu = lambda * gb.re - go.re;
        StarBody::radial_sum(StarBody::dilate(base.k.clone(), lambda)?, l.clone(), 1.0, mu.max(0.0))?
    };
    let shared = verify_witness(&shared_k, &l, go, COMBINATION_TOL)?;
    let bt = wb * gb.im + wo * go.im;
    let at = wb * gb.re + wo * go.re;
    let mu = gb.im / bt;
    let nu = mu * at;
    let shift = (gb.re - nu).max(0.0);
    let m = StarBody::dilate(StarBody::radial_sum(base.k.clone(), l.clone(), 1.0, shift)?, 1.0 / mu)?;
    let witness = verify_witness(&m, &l, target, COMBINATION_TOL)?;
    Ok(CombinationWitness { target, shared: Some(shared), witness })
}

// ---- dimension monotonicity ----

#[derive(Clone, Debug, Serialize)]
pub struct EmbedReport {
    pub dim: usize,
    #[serde(serialize_with = "ser_complex")]
    pub root: Complex64,
    /// Roots of the lifted polynomial in dimension `dim`.
    #[serde(serialize_with = "ser_complex_vec")]
    pub lifted_roots: Vec<Complex64>,
    /// Hull vertices among the lifted roots.
    #[serde(serialize_with = "ser_complex_vec")]
    pub hull: Vec<Complex64>,
    pub contained: bool,
    /// Free constant chosen by the lift.
    pub constant: f64,
    /// Coefficient gap between the lifted derivative and the input.
    pub deviation: f64,
    #[serde(skip)]
    pub poly: DualSteinerPoly,
}

/// Lifts the witness polynomial `steps` times; each report checks the
/// original root lies in the convex hull of the current lifted roots.
pub fn monotone_embed(witness: &ConeWitness, steps: usize) -> Result<Vec<EmbedReport>> {
    let cfg = MomentConfig::default();
    let mut current = DualSteinerPoly::from_pair_auto(&witness.k, &witness.l)?;
    let gamma = witness.root;
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let lift = antiderivative_lift_with(&current, &cfg)?;
        let lifted_roots = lift.poly.roots().roots;
        let scale = lifted_roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let contained = hull_contains(&lifted_roots, gamma, HULL_SLACK * scale);
        out.push(EmbedReport {
            dim: lift.poly.dim(),
            root: gamma,
            hull: convex_hull(&lifted_roots),
            lifted_roots,
            contained,
            constant: lift.constant,
            deviation: lift.deviation,
            poly: lift.poly.clone(),
        });
        current = lift.poly;
    }
    Ok(out)
}

// ---- boundary map ----

#[derive(Clone, Debug, Serialize)]
pub struct MapEntry {
    pub theta: f64,
    pub query: ConeQuery,
    /// Filled from two IN neighbours by convexity rather than by search.
    pub filled: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryMap {
    pub n: usize,
    pub entries: Vec<MapEntry>,
}

/// Directions `θ_j = π(j+1)/samples`, `j < samples`; exact angle test for
/// the `n = 3` bound `θ ≤ π/3`.
fn direction_certificate(n: usize, j: usize, samples: usize) -> Option<String> {
    let k = j + 1;
    if 2 * k <= samples && n == 2 {
        return Some("n = 2: every root has negative real part".into());
    }
    if 3 * k <= samples && n == 3 {
        return Some("n = 3: a root a+bi with a > 0 needs b > sqrt(3) a".into());
    }
    None
}

/// Membership on `samples` directions at radius one, in parallel with one
/// RNG stream per direction. UNKNOWN directions between two IN directions
/// are then witnessed by a convex combination of their neighbours.
pub fn cone_boundary_map(n: usize, samples: usize, cfg: &SearchConfig) -> Result<BoundaryMap> {
    if n < 2 || samples == 0 {
        return Err(Error::invalid("boundary maps need n >= 2 and at least one sample"));
    }
    let queries: Vec<Result<(f64, ConeQuery)>> = (0..samples)
        .into_par_iter()
        .map(|j| {
            let theta = PI * (j + 1) as f64 / samples as f64;
            let z = Complex64::from_polar(MAP_RADIUS, theta);
            let z = Complex64::new(z.re, z.im.max(0.0));
            if let Some(cert) = direction_certificate(n, j, samples) {
                return Ok((theta, ConeQuery::outside(n, z, cert)));
            }
            let local = SearchConfig { seed: cfg.seed.wrapping_add(j as u64), ..cfg.clone() };
            Ok((theta, membership_search(z, n, &local)?))
        })
        .collect();
    let mut entries = Vec::with_capacity(samples);
    for q in queries {
        let (theta, query) = q?;
        entries.push(MapEntry { theta, query, filled: false });
    }
    fill_gaps(&mut entries)?;
    Ok(BoundaryMap { n, entries })
}

fn fill_gaps(entries: &mut [MapEntry]) -> Result<()> {
    let inside: Vec<usize> =
        (0..entries.len()).filter(|&j| entries[j].query.status == Membership::In).collect();
    let (Some(&first), Some(&last)) = (inside.first(), inside.last()) else {
        return Ok(());
    };
    for j in first..last {
        match entries[j].query.status {
            Membership::In => continue,
            Membership::Out => {
                return Err(Error::InvariantViolation(format!(
                    "direction {} certified OUT between IN directions",
                    entries[j].theta
                )))
            }
            Membership::Unknown => {}
        }
        let lo = *inside.iter().rev().find(|&&i| i < j).expect("first IN precedes j");
        let hi = *inside.iter().find(|&&i| i > j).expect("last IN follows j");
        let (wa, wb) = (
            entries[lo].query.witness.clone().expect("IN carries a witness"),
            entries[hi].query.witness.clone().expect("IN carries a witness"),
        );
        let z = entries[j].query.z;
        let dir = z / z.norm();
        // ρ with arg(ρ·γ_a + (1−ρ)·γ_b) = arg z
        let (ga, gb) = (wa.root, wb.root);
        let rho = -(gb * dir.conj()).im / ((ga - gb) * dir.conj()).im;
        if !(rho > 0.0 && rho < 1.0) {
            continue;
        }
        let Ok(comb) = convex_combination_witness(&wa, &wb, rho) else {
            continue;
        };
        let factor = z.norm() / comb.target.norm();
        let m = StarBody::dilate(comb.witness.k.clone(), factor)?;
        if let Ok(w) = verify_witness(&m, &comb.witness.l, z, WITNESS_TOL) {
            entries[j].query = ConeQuery::inside(entries[j].query.n, z, w);
            entries[j].filled = true;
        }
    }
    Ok(())
}

impl BoundaryMap {
    pub fn witness_id(&self, j: usize) -> Option<String> {
        (self.entries[j].query.status == Membership::In).then(|| format!("n{}_t{:04}", self.n, j))
    }

    /// `theta,status,witness_id` with 15 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,status,witness_id\n");
        for (j, e) in self.entries.iter().enumerate() {
            let status = match e.query.status {
                Membership::In => "IN",
                Membership::Out => "OUT",
                Membership::Unknown => "UNKNOWN",
            };
            out.push_str(&format!("{},{},{}\n", sig15(e.theta), status, self.witness_id(j).unwrap_or_default()));
        }
        out
    }

    /// `(id, witness)` for every IN direction.
    pub fn witnesses(&self) -> Vec<(String, &ConeWitness)> {
        (0..self.entries.len())
            .filter_map(|j| Some((self.witness_id(j)?, self.entries[j].query.witness.as_ref()?)))
            .collect()
    }

    /// IN directions form one run ending at `θ = π`.
    pub fn is_monotone(&self) -> bool {
        let first = self.entries.iter().position(|e| e.query.status == Membership::In);
        match first {
            None => false,
            Some(f) => self.entries[f..].iter().all(|e| e.query.status == Membership::In),
        }
    }
}
