//! Sampling rules for integrals of `ρ_K, ρ_L` over the sphere.
//!
//! Pairs whose radial functions both depend on `|u₁|` alone reduce exactly to
//! a 1-D integral in the polar angle; the rule places panel breaks on every
//! profile knot, so piecewise-linear tables integrate at spectral accuracy.
//! Every other pair uses the supplied sphere grid.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use crate::body::{direction, StarBody};
use crate::error::{Error, Result};
use crate::grid::{total_measure, SphereGrid};
use crate::special::gauss_legendre;

const UNIFORM_PANELS: usize = 32;
const PANEL_ORDER: usize = 12;
const PAR_THRESHOLD: usize = 1 << 15;

/// 1-D rule on `φ ∈ [0, π/2]` with `Σ w·g(φ) = ∫_{S^{n-1}} g(|u₁|) dσ`.
#[derive(Clone, Debug)]
pub struct ZonalRule {
    dim: usize,
    angles: Vec<f64>,
    weights: Vec<f64>,
}

impl ZonalRule {
    pub fn new(dim: usize, extra_breaks: &[f64]) -> Self {
        let mut breaks: Vec<f64> = (0..=UNIFORM_PANELS)
            .map(|j| FRAC_PI_2 * j as f64 / UNIFORM_PANELS as f64)
            .chain(extra_breaks.iter().map(|b| b.clamp(0.0, FRAC_PI_2)))
            .collect();
        breaks.sort_by(|a, b| a.total_cmp(b));
        breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-13);
        let (x, w) = gauss_legendre(PANEL_ORDER);
        // σ(S^{n-2}), doubled for the two hemispheres u₁ ≷ 0
        let scale = 2.0 * total_measure(dim - 1);
        let mut angles = Vec::with_capacity(PANEL_ORDER * breaks.len());
        let mut weights = Vec::with_capacity(PANEL_ORDER * breaks.len());
        for p in breaks.windows(2) {
            let (lo, hi) = (p[0], p[1]);
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (xi, wi) in x.iter().zip(&w) {
                let phi = mid + half * xi;
                angles.push(phi);
                weights.push(scale * half * wi * phi.sin().powi(dim as i32 - 2));
            }
        }
        ZonalRule { dim, angles, weights }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        self.angles.iter().copied()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

/// The 1-D rule for a pair, if both bodies depend on `|u₁|` only.
pub fn zonal_rule(k: &StarBody, l: &StarBody) -> Option<ZonalRule> {
    if k.dim() != l.dim() || k.dim() < 2 {
        return None;
    }
    let mut breaks = k.zonal_breaks()?;
    breaks.extend(l.zonal_breaks()?);
    Some(ZonalRule::new(k.dim(), &breaks))
}

/// A sample `(ρ_K(u), ρ_L(u), weight)`.
#[derive(Clone, Copy, Debug)]
pub struct PairSample {
    pub rho_k: f64,
    pub rho_l: f64,
    pub weight: f64,
}

/// Samples on the 1-D rule, when the pair admits one.
pub fn zonal_samples(k: &StarBody, l: &StarBody) -> Option<Vec<PairSample>> {
    let rule = zonal_rule(k, l)?;
    Some(
        rule.angles
            .iter()
            .zip(&rule.weights)
            .map(|(&phi, &weight)| {
                let u = direction(k.dim(), phi);
                PairSample { rho_k: k.radial_unchecked(&u), rho_l: l.radial_unchecked(&u), weight }
            })
            .collect(),
    )
}

/// Samples of the pair on the zonal rule when available, else on `grid`.
pub fn pair_samples(k: &StarBody, l: &StarBody, grid: &SphereGrid) -> Result<Vec<PairSample>> {
    Error::check_dim(k.dim(), l.dim())?;
    Error::check_dim(k.dim(), grid.dim())?;
    let samples: Vec<PairSample> = match zonal_samples(k, l) {
        Some(s) => s,
        None => {
            let eval = |(u, &weight): (&[f64], &f64)| PairSample {
                rho_k: k.radial_unchecked(u),
                rho_l: l.radial_unchecked(u),
                weight,
            };
            if grid.len() >= PAR_THRESHOLD {
                let nodes: Vec<&[f64]> = grid.nodes().collect();
                nodes.into_par_iter().zip(grid.weights().par_iter()).map(eval).collect()
            } else {
                grid.nodes().zip(grid.weights()).map(eval).collect()
            }
        }
    };
    for s in &samples {
        if !(s.rho_k > 0.0 && s.rho_l > 0.0 && s.rho_k.is_finite() && s.rho_l.is_finite()) {
            return Err(Error::InvariantViolation(format!(
                "non-positive radial value ({}, {}) during quadrature",
                s.rho_k, s.rho_l
            )));
        }
    }
    Ok(samples)
}
