//! Constructive realization: a measure reproducing prescribed moments, the
//! zonal star body whose radial distribution is that measure, and witness
//! pairs `(K, L)` for realizable tuples.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::body::{interpolate, StarBody, ZonalAxis};
use crate::error::{Error, Result};
pub use crate::measure::{Interval, IntervalMeasure};
use crate::moment::{
    cone_interior_check_with, interval_search_with, lp_witness, ConeStatus, ConeVerdict, MomentConfig,
};
use crate::quermass::{dual_quermass_zonal, QuermassTuple};
use crate::special::{ball_volume, cap_fraction_angle};

/// Relative tolerance on `ω_0 = |B^n_2|` for normalized inputs.
const MASS_TOL: f64 = 1e-9;

/// Round-trip tolerance of a synthesized pair.
pub const ROUND_TRIP_TOL: f64 = 1e-6;

/// Normalized measure of `{v ∈ S^{n-1} : |v₁| ≥ s}`.
pub fn cap_fraction(n: usize, s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::invalid(format!("cap height {s} outside [0, 1]")));
    }
    if n == 0 {
        return Err(Error::invalid("cap fraction needs n >= 1"));
    }
    if n == 1 {
        return Ok(1.0);
    }
    // angle from the axis, computed without cancellation near s = 1
    let phi = (1.0 - s * s).max(0.0).sqrt().atan2(s).min(FRAC_PI_2);
    Ok(cap_fraction_angle(n, phi))
}

/// Tail-mass fraction `F(t) = μ([t, b])/μ([a, b])` and its generalized
/// inverse `G(s) = sup{t : F(t) ≥ s}`, held as the exact piecewise-linear
/// knots of `G` (atoms give flats, the floor gives ramps).
#[derive(Clone, Debug, Serialize)]
pub struct DecreasingProfile {
    measure: IntervalMeasure,
    knots: Vec<(f64, f64)>,
}

impl DecreasingProfile {
    pub fn new(measure: &IntervalMeasure) -> Self {
        let iv = measure.interval();
        let total = measure.mass();
        let eps = measure.floor();
        let mut knots = vec![(0.0, iv.b())];
        let mut cum = 0.0;
        let mut t = iv.b();
        for &(tj, wj) in measure.atoms().iter().rev() {
            if tj < t {
                cum += eps * (t - tj);
                knots.push((cum / total, tj));
            }
            cum += wj;
            knots.push((cum / total, tj));
            t = tj;
        }
        if t > iv.a() {
            cum += eps * (t - iv.a());
            knots.push((cum / total, iv.a()));
        }
        let last = knots.last().map_or(1.0, |k| k.0);
        let mut clean: Vec<(f64, f64)> = Vec::with_capacity(knots.len());
        for (s, t) in knots {
            let s = (s / last).min(1.0);
            match clean.last_mut() {
                // zero-width steps only arise without a floor; keep the sup
                Some(prev) if s - prev.0 <= 1e-15 => prev.1 = prev.1.max(t),
                _ => clean.push((s, t)),
            }
        }
        if let Some(k) = clean.last_mut() {
            k.0 = 1.0;
        }
        DecreasingProfile { measure: measure.clone(), knots: clean }
    }

    pub fn f(&self, t: f64) -> f64 {
        self.measure.tail_mass(t) / self.measure.mass()
    }

    pub fn g(&self, s: f64) -> f64 {
        interpolate(&self.knots, s.clamp(0.0, 1.0))
    }

    /// Knots `(s, G(s))`, `s` ascending from 0 to 1.
    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }
}

fn check_normalized(omega0: f64, n: usize) -> Result<()> {
    let vol = ball_volume(n);
    if (omega0 / vol - 1.0).abs() > MASS_TOL {
        return Err(Error::invalid(format!(
            "expected total mass |B^{n}_2| = {vol}, got {omega0}"
        )));
    }
    Ok(())
}

/// Floored measure on `interval` with `m_i(μ) = ω_i`, for a tuple with
/// `ω_0 = |B^n_2|` interior to `C^I_{a,b}`.
pub fn measure_from_moments(tuple: &QuermassTuple, interval: Interval) -> Result<IntervalMeasure> {
    measure_from_moments_with(tuple, interval, &MomentConfig::default())
}

pub fn measure_from_moments_with(tuple: &QuermassTuple, interval: Interval, cfg: &MomentConfig) -> Result<IntervalMeasure> {
    check_normalized(tuple.omega0(), tuple.dim())?;
    if tuple.len() == 1 {
        return IntervalMeasure::uniform(interval, tuple.omega0());
    }
    let refuse = |reason: &str| -> Result<IntervalMeasure> {
        let verdict = cone_interior_check_with(tuple, interval, cfg)?;
        Err(Error::refusal(reason.to_string(), Some(verdict)))
    };
    if let Some(m) = tuple.consecutive_degree() {
        if m >= 1 && crate::moment::hausdorff_feasible(tuple.values(), interval)? != crate::moment::Feasibility::StrictlyFeasible {
            return refuse("tuple is not interior to the moment cone of this interval");
        }
    }
    match lp_witness(tuple.indices(), tuple.values(), interval, cfg) {
        Some((margin, measure)) if margin > cfg.margin_tol => Ok(measure),
        _ => refuse("no floored measure reproduces the tuple on this interval"),
    }
}

/// Zonal body `ρ_L(u) = G(cap_fraction(n, |u₁|))` for a floored measure of
/// total mass `|B^n_2|`; its radial distribution on the sphere is `μ`.
pub fn body_from_measure(measure: &IntervalMeasure, n: usize) -> Result<StarBody> {
    if n < 2 {
        return Err(Error::invalid("the measure-to-body construction needs n >= 2"));
    }
    check_normalized(measure.mass(), n)?;
    if !measure.has_full_support() {
        return Err(Error::invalid("measure needs a positive floor density"));
    }
    let profile = DecreasingProfile::new(measure);
    StarBody::zonal(n, ZonalAxis::CapFraction, profile.knots().to_vec())
}

/// A realizing pair with the decision that produced it.
#[derive(Clone, Debug)]
pub struct Realization {
    pub k: StarBody,
    pub l: StarBody,
    pub verdict: ConeVerdict,
    /// Normalized measure behind `L` (interior case).
    pub measure: Option<IntervalMeasure>,
    /// Max relative deviation of the recomputed tuple.
    pub deviation: f64,
}

/// Star bodies `K, L ⊂ R^n` with `W̃_i(K, L) = ω_i`, or a refusal carrying
/// the verdict.
pub fn realize_pair(tuple: &QuermassTuple, n: usize) -> Result<Realization> {
    realize_pair_with(tuple, n, &MomentConfig::default())
}

pub fn realize_pair_with(tuple: &QuermassTuple, n: usize, cfg: &MomentConfig) -> Result<Realization> {
    Error::check_dim(n, tuple.dim())?;
    let verdict = if tuple.len() == 1 {
        ConeVerdict::ray(1.0)
    } else {
        interval_search_with(tuple, cfg)?
    };
    realize_from_verdict(tuple, n, verdict)
}

/// Builds the pair for an already computed verdict.
pub fn realize_from_verdict(tuple: &QuermassTuple, n: usize, verdict: ConeVerdict) -> Result<Realization> {
    let vol = ball_volume(n);
    let scale = (tuple.omega0() / vol).powf(1.0 / n as f64);
    let k = StarBody::ball(n, scale)?;
    let (l, measure) = match verdict.status {
        ConeStatus::GeometricRay => {
            let lambda = verdict.lambda.expect("ray verdicts carry lambda");
            (StarBody::dilate(k.clone(), lambda)?, None)
        }
        ConeStatus::Interior if n >= 2 => {
            let density = verdict.density.as_ref().expect("interior verdicts carry a density");
            let normalized = density.scaled(vol / tuple.omega0());
            let lp = body_from_measure(&normalized, n)?;
            (StarBody::dilate(lp, scale)?, Some(normalized))
        }
        ConeStatus::Interior => {
            return Err(Error::refusal("interior tuples are realized only for n >= 2", Some(verdict)));
        }
        ConeStatus::Outside => return Err(Error::refusal("tuple is certified non-realizable", Some(verdict))),
        ConeStatus::Unknown => return Err(Error::refusal("realizability could not be decided", Some(verdict))),
    };
    let deviation = round_trip_deviation(&k, &l, tuple)?;
    if deviation > ROUND_TRIP_TOL {
        return Err(Error::InvariantViolation(format!(
            "synthesized pair deviates from the tuple by {deviation:.3e}"
        )));
    }
    Ok(Realization { k, l, verdict, measure, deviation })
}

/// Max relative deviation of `W̃_i(K, L)` from the tuple, on the exact
/// 1-D rule (available for every synthesized pair).
pub fn round_trip_deviation(k: &StarBody, l: &StarBody, tuple: &QuermassTuple) -> Result<f64> {
    let values = match dual_quermass_zonal(k, l, tuple.indices()) {
        Some(v) => v,
        None => {
            let grid = crate::grid::SphereGrid::shared_default(k.dim())?;
            crate::quermass::dual_quermass_many(k, l, tuple.indices(), &grid)?
        }
    };
    Ok(values
        .iter()
        .zip(tuple.values())
        .map(|(v, w)| (v / w - 1.0).abs())
        .fold(0.0, f64::max))
}
