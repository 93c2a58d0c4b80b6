//! Dual quermassintegrals `W̃_i(K, L) = (1/n)∫ ρ_K^{n-i} ρ_L^i dσ` for real `i`,
//! the push-forward moment identity, and the inequality checks built on them.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::body::{is_dilate_range, ratio_range, StarBody};
use crate::error::{Error, Result};
use crate::grid::SphereGrid;
use crate::linalg::{hankel, min_eigenvalue, pd_threshold, sym_det};
use crate::measure::Interval;
use crate::quadrature::{pair_samples, zonal_samples, PairSample};
use crate::special::{compensated_sum, rpow};

/// Indices of equal value closer than this are treated as duplicates.
const INDEX_TOL: f64 = 1e-12;

/// Prescribed values `(ω_i)_{i∈I}` on an index set containing 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TupleRepr", into = "TupleRepr")]
pub struct QuermassTuple {
    dim: usize,
    indices: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct TupleRepr {
    dim: usize,
    indices: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<TupleRepr> for QuermassTuple {
    type Error = Error;
    fn try_from(r: TupleRepr) -> Result<Self> {
        QuermassTuple::new(r.dim, r.indices, r.values)
    }
}

impl From<QuermassTuple> for TupleRepr {
    fn from(t: QuermassTuple) -> Self {
        TupleRepr { dim: t.dim, indices: t.indices, values: t.values }
    }
}

impl QuermassTuple {
    /// Validates and sorts by index.
    pub fn new(dim: usize, indices: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if dim < 1 {
            return Err(Error::invalid("tuple dimension must be >= 1"));
        }
        if indices.len() != values.len() {
            return Err(Error::invalid(format!(
                "{} indices but {} values",
                indices.len(),
                values.len()
            )));
        }
        let mut pairs: Vec<(f64, f64)> = indices.into_iter().zip(values).collect();
        for &(i, w) in &pairs {
            if !i.is_finite() {
                return Err(Error::invalid(format!("index {i} is not finite")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::invalid(format!("tuple value {w} at index {i} is not positive")));
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        if pairs.windows(2).any(|p| (p[1].0 - p[0].0).abs() <= INDEX_TOL) {
            return Err(Error::invalid("tuple indices must be distinct"));
        }
        if !pairs.iter().any(|p| p.0 == 0.0) {
            return Err(Error::invalid("tuple index set must contain 0"));
        }
        let (indices, values) = pairs.into_iter().unzip();
        Ok(QuermassTuple { dim, indices, values })
    }

    /// Tuple on the consecutive indices `0..values.len()`.
    pub fn consecutive(dim: usize, values: Vec<f64>) -> Result<Self> {
        let idx = (0..values.len()).map(|i| i as f64).collect();
        Self::new(dim, idx, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn indices(&self) -> &[f64] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, index: f64) -> Option<f64> {
        self.indices
            .iter()
            .position(|&i| (i - index).abs() <= INDEX_TOL)
            .map(|k| self.values[k])
    }

    pub fn omega0(&self) -> f64 {
        self.value(0.0).expect("0 is always an index")
    }

    /// `m` when the index set is exactly `{0, 1, …, m}`.
    pub fn consecutive_degree(&self) -> Option<usize> {
        let ok = self
            .indices
            .iter()
            .enumerate()
            .all(|(k, &i)| i == k as f64);
        ok.then(|| self.indices.len() - 1)
    }

    /// Same indices with every value multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.dim, self.indices.clone(), self.values.iter().map(|v| v * factor).collect())
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = dim;
        self
    }
}

fn quermass_from_samples(samples: &[PairSample], n: usize, i: f64) -> f64 {
    let nf = n as f64;
    let terms = samples.iter().map(|s| {
        // log space keeps wide-ranging radii and negative indices finite
        s.weight * ((nf - i) * s.rho_k.ln() + i * s.rho_l.ln()).exp()
    });
    compensated_sum(terms) / nf
}

/// `W̃_i(K, L)` for any real `i`.
pub fn dual_quermass(k: &StarBody, l: &StarBody, i: f64, grid: &SphereGrid) -> Result<f64> {
    let samples = pair_samples(k, l, grid)?;
    Ok(quermass_from_samples(&samples, k.dim(), i))
}

/// `W̃_i(K, L)` for several indices on one set of samples.
pub fn dual_quermass_many(k: &StarBody, l: &StarBody, indices: &[f64], grid: &SphereGrid) -> Result<Vec<f64>> {
    let samples = pair_samples(k, l, grid)?;
    Ok(indices.iter().map(|&i| quermass_from_samples(&samples, k.dim(), i)).collect())
}

/// `W̃_i(K, L)` on the exact 1-D rule, when both bodies depend on `|u₁|` only.
pub fn dual_quermass_zonal(k: &StarBody, l: &StarBody, indices: &[f64]) -> Option<Vec<f64>> {
    let samples = zonal_samples(k, l)?;
    Some(indices.iter().map(|&i| quermass_from_samples(&samples, k.dim(), i)).collect())
}

pub fn quermass_tuple(k: &StarBody, l: &StarBody, indices: &[f64], grid: &SphereGrid) -> Result<QuermassTuple> {
    let values = dual_quermass_many(k, l, indices, grid)?;
    QuermassTuple::new(k.dim(), indices.to_vec(), values)
}

/// `(W̃_0, …, W̃_n)`.
pub fn full_tuple(k: &StarBody, l: &StarBody, grid: &SphereGrid) -> Result<QuermassTuple> {
    let idx: Vec<f64> = (0..=k.dim()).map(|i| i as f64).collect();
    quermass_tuple(k, l, &idx, grid)
}

/// `(W̃_0, …, W̃_n)` on the exact 1-D rule when the pair admits it, else on
/// the shared default grid.
pub fn full_tuple_auto(k: &StarBody, l: &StarBody) -> Result<QuermassTuple> {
    Error::check_dim(k.dim(), l.dim())?;
    let idx: Vec<f64> = (0..=k.dim()).map(|i| i as f64).collect();
    match dual_quermass_zonal(k, l, &idx) {
        Some(values) => QuermassTuple::new(k.dim(), idx, values),
        None => quermass_tuple(k, l, &idx, &*SphereGrid::shared_default(k.dim())?),
    }
}

/// Image of `(1/n)ρ_K^n dσ` under `f = ρ_L/ρ_K`; equal locations merged.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PushforwardMeasure {
    pub interval: (f64, f64),
    pub atoms: Vec<(f64, f64)>,
}

impl PushforwardMeasure {
    pub fn mass(&self) -> f64 {
        compensated_sum(self.atoms.iter().map(|a| a.1))
    }

    pub fn moment(&self, p: f64) -> f64 {
        compensated_sum(self.atoms.iter().map(|&(t, w)| w * rpow(t, p)))
    }
}

pub fn pushforward_moments(
    k: &StarBody,
    l: &StarBody,
    grid: &SphereGrid,
    indices: &[f64],
) -> Result<(PushforwardMeasure, Vec<f64>)> {
    let samples = pair_samples(k, l, grid)?;
    let (a, b) = ratio_range(k, l, grid)?;
    let nf = k.dim() as f64;
    let mut atoms: Vec<(f64, f64)> = samples
        .iter()
        .map(|s| (s.rho_l / s.rho_k, s.weight * (nf * s.rho_k.ln()).exp() / nf))
        .collect();
    atoms.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
    for (t, w) in atoms {
        match merged.last_mut() {
            Some(last) if t == last.0 => last.1 += w,
            _ => merged.push((t, w)),
        }
    }
    let measure = PushforwardMeasure { interval: (a, b), atoms: merged };
    let moments = indices.iter().map(|&i| measure.moment(i)).collect();
    Ok((measure, moments))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AfReport {
    pub holds: bool,
    pub slack: f64,
    pub equality: bool,
}

/// `slack = (k−j)log ω_i + (j−i)log ω_k − (k−i)log ω_j ≥ 0`.
pub fn dual_af_verify(tuple: &QuermassTuple, i: f64, j: f64, k: f64) -> Result<AfReport> {
    if !(i < j && j < k) {
        return Err(Error::invalid(format!("dual AF needs i < j < k, got ({i}, {j}, {k})")));
    }
    let get = |x: f64| {
        tuple
            .value(x)
            .ok_or_else(|| Error::invalid(format!("index {x} missing from tuple")))
    };
    let (wi, wj, wk) = (get(i)?, get(j)?, get(k)?);
    Ok(af_slack_report(i, j, k, wi, wj, wk))
}

pub(crate) fn af_slack_report(i: f64, j: f64, k: f64, wi: f64, wj: f64, wk: f64) -> AfReport {
    let slack = (k - j) * wi.ln() + (j - i) * wk.ln() - (k - i) * wj.ln();
    AfReport { holds: slack >= -1e-10, slack, equality: slack.abs() <= 1e-8 }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HankelReport {
    pub m: usize,
    pub a_min_eig: f64,
    pub b_min_eig: f64,
    pub a_threshold: f64,
    pub b_threshold: f64,
    pub a_det: f64,
    pub b_det: f64,
    /// Whether the pair is a dilate pair; PSD rather than PD is then expected.
    pub dilate: bool,
}

impl HankelReport {
    pub fn positive_definite(&self) -> bool {
        self.a_min_eig > self.a_threshold && self.b_min_eig > self.b_threshold
    }

    pub fn positive_semidefinite(&self) -> bool {
        self.a_min_eig >= -self.a_threshold && self.b_min_eig >= -self.b_threshold
    }

    /// PD off the dilate locus, PSD on it.
    pub fn consistent(&self) -> bool {
        if self.dilate {
            self.positive_semidefinite()
        } else {
            self.positive_definite()
        }
    }
}

/// `A_m = (ω_{i+j})_{0..m}` and `B_m = (ω_{i+j+1})_{0..m-1}` from a
/// consecutive sequence `ω_0, …, ω_{2m}`.
pub fn quermass_hankels(values: &[f64], m: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    assert!(values.len() > 2 * m, "need 2m+1 values");
    (hankel(m + 1, 0, |s| values[s]), hankel(m, 1, |s| values[s]))
}

pub fn hankel_pd_verify(k: &StarBody, l: &StarBody, grid: &SphereGrid, m: usize) -> Result<HankelReport> {
    if m < 1 {
        return Err(Error::invalid("Hankel order m must be >= 1"));
    }
    let idx: Vec<f64> = (0..=2 * m).map(|i| i as f64).collect();
    let w = dual_quermass_many(k, l, &idx, grid)?;
    let (a, b) = ratio_range(k, l, grid)?;
    Ok(hankel_report(&w, m, is_dilate_range(a, b)))
}

/// Report for `A_m, B_m` built from `ω_0..ω_{2m}`.
pub fn hankel_report(w: &[f64], m: usize, dilate: bool) -> HankelReport {
    let (am, bm) = quermass_hankels(w, m);
    HankelReport {
        m,
        a_min_eig: min_eigenvalue(&am),
        b_min_eig: min_eigenvalue(&bm),
        a_threshold: pd_threshold(&am),
        b_threshold: pd_threshold(&bm),
        a_det: sym_det(&am),
        b_det: sym_det(&bm),
        dilate,
    }
}

/// `W̃_i ≥ W̃_j` for `i < j` when `L ⊆ K` holds on every sample direction.
pub fn monotonicity_verify(k: &StarBody, l: &StarBody, grid: &SphereGrid, i: f64, j: f64) -> Result<bool> {
    if !(i < j) {
        return Err(Error::invalid(format!("monotonicity needs i < j, got ({i}, {j})")));
    }
    let samples = pair_samples(k, l, grid)?;
    let contained_on_grid = grid
        .nodes()
        .all(|u| l.radial_unchecked(u) <= k.radial_unchecked(u) * (1.0 + 1e-12));
    let contained_on_samples = samples.iter().all(|s| s.rho_l <= s.rho_k * (1.0 + 1e-12));
    if !contained_on_grid || !contained_on_samples {
        return Err(Error::ContainmentViolated("ρ_L exceeds ρ_K at some sample direction".into()));
    }
    let wi = quermass_from_samples(&samples, k.dim(), i);
    let wj = quermass_from_samples(&samples, k.dim(), j);
    Ok(wi >= wj - 1e-10 * wi.abs().max(wj.abs()).max(1.0))
}

/// Interval `[a, b]` of the ratio range, when it is non-degenerate.
pub fn ratio_interval(k: &StarBody, l: &StarBody, grid: &SphereGrid) -> Result<Option<Interval>> {
    let (a, b) = ratio_range(k, l, grid)?;
    if is_dilate_range(a, b) {
        Ok(None)
    } else {
        Interval::new(a, b).map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn trig() -> StarBody {
        StarBody::trig(2.0, vec![1.0], vec![]).unwrap()
    }

    #[test]
    fn trig_pair_values() {
        let g = SphereGrid::new(2, 256).unwrap();
        let w = dual_quermass_many(&StarBody::unit_ball(2), &trig(), &[0.0, 1.0, 2.0], &g).unwrap();
        assert!((w[0] / PI - 1.0).abs() < 1e-14);
        assert!((w[1] / (2.0 * PI) - 1.0).abs() < 1e-14);
        assert!((w[2] / (4.5 * PI) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pushforward_matches() {
        let g = SphereGrid::new(2, 256).unwrap();
        let (mu, m) = pushforward_moments(&StarBody::unit_ball(2), &StarBody::ball(2, 2.0).unwrap(), &g, &[0.0, 1.0]).unwrap();
        assert_eq!(mu.atoms.len(), 1);
        assert!((mu.atoms[0].0 - 2.0).abs() < 1e-15);
        assert!((m[0] - PI).abs() < 1e-13 && (m[1] - 2.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn af_examples() {
        let t = QuermassTuple::consecutive(2, vec![PI, 2.0 * PI, 4.5 * PI]).unwrap();
        let r = dual_af_verify(&t, 0.0, 1.0, 2.0).unwrap();
        assert!(r.holds && !r.equality);
        assert!((r.slack - (4.5f64 / 4.0).ln()).abs() < 1e-14);
        let t = QuermassTuple::consecutive(2, vec![1.0, 2.0, 3.0]).unwrap();
        assert!(!dual_af_verify(&t, 0.0, 1.0, 2.0).unwrap().holds);
        assert!(dual_af_verify(&t, 0.0, 1.0, 5.0).is_err());
    }

    #[test]
    fn tuple_validation() {
        assert!(QuermassTuple::new(2, vec![1.0, 2.0], vec![1.0, 1.0]).is_err());
        assert!(QuermassTuple::new(2, vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(QuermassTuple::new(2, vec![0.0, 1.0], vec![1.0, -1.0]).is_err());
        let t = QuermassTuple::new(2, vec![0.5, 0.0, -1.0], vec![2.0, 1.0, 3.0]).unwrap();
        assert_eq!(t.indices(), &[-1.0, 0.0, 0.5]);
        assert_eq!(t.value(0.5), Some(2.0));
        assert_eq!(t.consecutive_degree(), None);
    }

    #[test]
    fn monotonicity_and_containment() {
        let g = SphereGrid::new(2, 128).unwrap();
        let k = StarBody::unit_ball(2);
        let l = StarBody::trig(2.0 / 3.0, vec![1.0 / 3.0], vec![]).unwrap();
        assert!(monotonicity_verify(&k, &l, &g, 1.0, 2.0).unwrap());
        assert!(matches!(
            monotonicity_verify(&k, &trig(), &g, 0.0, 1.0),
            Err(Error::ContainmentViolated(_))
        ));
    }
}
