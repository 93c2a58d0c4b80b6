//! Star bodies carried by their radial functions.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SphereGrid};
use crate::special::{cap_angle_for_fraction, cap_fraction_angle};

/// Relative sup-norm tolerance on `ρ_L/ρ_K` for calling a pair dilates.
pub const DILATE_TOL: f64 = 1e-8;

const UNIT_TOL: f64 = 1e-9;

/// Variable a zonal profile table is indexed by.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZonalAxis {
    /// `t = |u₁| ∈ [0, 1]`.
    #[default]
    Height,
    /// `s = σ({|v₁| ≥ |u₁|})/σ(S^{n-1}) ∈ [0, 1]`, the normalized double-cap measure.
    CapFraction,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    #[default]
    Nearest,
    /// Linear in `|u₁|` across the grid's polar levels.
    Zonal,
}

#[derive(Clone, Debug)]
pub enum BodyKind {
    Ball {
        radius: f64,
    },
    Dilate {
        base: Arc<StarBody>,
        factor: f64,
    },
    Zonal {
        axis: ZonalAxis,
        profile: Vec<(f64, f64)>,
    },
    /// `ρ(θ) = c₀ + Σ_k cos_k·cos kθ + sin_k·sin kθ`, planar only.
    Trig {
        constant: f64,
        cos: Vec<f64>,
        sin: Vec<f64>,
    },
    GridTable {
        grid: Arc<SphereGrid>,
        interpolation: Interpolation,
        values: Vec<f64>,
        levels: Vec<(f64, f64)>,
    },
    RadialSum {
        left: Arc<StarBody>,
        right: Arc<StarBody>,
        left_weight: f64,
        right_weight: f64,
    },
}

/// A star body in `R^n` with positive continuous radial function.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "BodyRepr", into = "BodyRepr")]
pub struct StarBody {
    dim: usize,
    kind: BodyKind,
}

fn positive(x: f64, what: &str) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} must be positive and finite, got {x}")))
    }
}

impl StarBody {
    pub fn ball(n: usize, radius: f64) -> Result<Self> {
        check_dim(n)?;
        positive(radius, "ball radius")?;
        Ok(StarBody { dim: n, kind: BodyKind::Ball { radius } })
    }

    pub fn unit_ball(n: usize) -> Self {
        StarBody { dim: n.max(1), kind: BodyKind::Ball { radius: 1.0 } }
    }

    pub fn dilate(base: impl Into<Arc<StarBody>>, factor: f64) -> Result<Self> {
        let base = base.into();
        positive(factor, "dilation factor")?;
        Ok(StarBody { dim: base.dim, kind: BodyKind::Dilate { base, factor } })
    }

    /// Zonal body from a table sorted by the axis variable on `[0, 1]`.
    pub fn zonal(n: usize, axis: ZonalAxis, profile: Vec<(f64, f64)>) -> Result<Self> {
        check_dim(n)?;
        if profile.is_empty() {
            return Err(Error::invalid("zonal profile is empty"));
        }
        for w in profile.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::invalid("zonal profile abscissae must be strictly increasing"));
            }
        }
        for &(x, r) in &profile {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::invalid(format!("zonal abscissa {x} outside [0, 1]")));
            }
            positive(r, "zonal profile value")?;
        }
        Ok(StarBody { dim: n, kind: BodyKind::Zonal { axis, profile } })
    }

    /// Planar trigonometric body; rejected unless certified positive.
    pub fn trig(constant: f64, cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        if !constant.is_finite() || cos.iter().chain(&sin).any(|c| !c.is_finite()) {
            return Err(Error::invalid("trigonometric coefficients must be finite"));
        }
        let body = StarBody { dim: 2, kind: BodyKind::Trig { constant, cos, sin } };
        let lower = body.trig_lower_bound();
        if lower <= 0.0 {
            return Err(Error::invalid(format!(
                "trigonometric radial function is not certified positive (lower bound {lower:.3e})"
            )));
        }
        Ok(body)
    }

    pub fn grid_table(grid: Arc<SphereGrid>, interpolation: Interpolation, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "grid table has {} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        for &v in &values {
            positive(v, "grid table value")?;
        }
        let levels = zonal_levels(&grid, &values);
        Ok(StarBody {
            dim: grid.dim(),
            kind: BodyKind::GridTable { grid, interpolation, values, levels },
        })
    }

    /// `μ·K +̃ λ·L`.
    pub fn radial_sum(
        left: impl Into<Arc<StarBody>>,
        right: impl Into<Arc<StarBody>>,
        left_weight: f64,
        right_weight: f64,
    ) -> Result<Self> {
        let (left, right) = (left.into(), right.into());
        Error::check_dim(left.dim, right.dim)?;
        if !(left_weight >= 0.0 && right_weight >= 0.0) || !left_weight.is_finite() || !right_weight.is_finite() {
            return Err(Error::invalid("radial sum weights must be finite and non-negative"));
        }
        if left_weight + right_weight <= 0.0 {
            return Err(Error::invalid("radial sum with both weights zero is empty"));
        }
        Ok(StarBody {
            dim: left.dim,
            kind: BodyKind::RadialSum { left, right, left_weight, right_weight },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    /// `ρ_K(u)` for a unit vector `u`.
    pub fn radial(&self, u: &[f64]) -> Result<f64> {
        Error::check_dim(self.dim, u.len())?;
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::invalid(format!("radial function needs a unit vector, |u| = {norm}")));
        }
        let r = self.radial_unchecked(u);
        if r.is_finite() && r > 0.0 {
            Ok(r)
        } else {
            Err(Error::InvariantViolation(format!("radial function evaluated to {r}")))
        }
    }

    /// `ρ_K(u)` without validating `u`.
    pub fn radial_unchecked(&self, u: &[f64]) -> f64 {
        match &self.kind {
            BodyKind::Ball { radius } => *radius,
            BodyKind::Dilate { base, factor } => factor * base.radial_unchecked(u),
            BodyKind::Zonal { axis, profile } => {
                let x = match axis {
                    ZonalAxis::Height => u[0].abs().min(1.0),
                    ZonalAxis::CapFraction => cap_fraction_of(self.dim, u),
                };
                interpolate(profile, x)
            }
            BodyKind::Trig { constant, cos, sin } => {
                let norm = u[0].hypot(u[1]);
                trig_eval(*constant, cos, sin, u[0] / norm, u[1] / norm)
            }
            BodyKind::GridTable { grid, interpolation, values, levels } => match interpolation {
                Interpolation::Nearest => values[grid.nearest(u)],
                Interpolation::Zonal => interpolate(levels, u[0].abs().min(1.0)),
            },
            BodyKind::RadialSum { left, right, left_weight, right_weight } => {
                let mut r = 0.0;
                if *left_weight != 0.0 {
                    r += left_weight * left.radial_unchecked(u);
                }
                if *right_weight != 0.0 {
                    r += right_weight * right.radial_unchecked(u);
                }
                r
            }
        }
    }

    /// `ρ_K` at the direction `(cos φ, sin φ, 0, …)`.
    pub fn radial_at_angle(&self, phi: f64) -> f64 {
        self.radial_unchecked(&direction(self.dim, phi))
    }

    /// Polar angles in `[0, π/2]` where the profile of a body depending only
    /// on `|u₁|` may have kinks; `None` if the body is not of that type.
    pub fn zonal_breaks(&self) -> Option<Vec<f64>> {
        if self.dim < 2 {
            return None;
        }
        match &self.kind {
            BodyKind::Ball { .. } => Some(Vec::new()),
            BodyKind::Dilate { base, .. } => base.zonal_breaks(),
            BodyKind::Zonal { axis, profile } => Some(
                profile
                    .iter()
                    .map(|&(x, _)| match axis {
                        ZonalAxis::Height => x.clamp(0.0, 1.0).acos(),
                        ZonalAxis::CapFraction => cap_angle_for_fraction(self.dim, x),
                    })
                    .collect(),
            ),
            BodyKind::GridTable { interpolation: Interpolation::Zonal, levels, .. } => {
                Some(levels.iter().map(|&(t, _)| t.clamp(0.0, 1.0).acos()).collect())
            }
            BodyKind::RadialSum { left, right, left_weight, right_weight } => {
                let mut out = Vec::new();
                if *left_weight != 0.0 {
                    out.extend(left.zonal_breaks()?);
                }
                if *right_weight != 0.0 {
                    out.extend(right.zonal_breaks()?);
                }
                Some(out)
            }
            _ => None,
        }
    }

    /// Certified lower bound of a trigonometric radial function from dense
    /// sampling plus the Lipschitz constant `Σ k(|a_k| + |b_k|)`.
    fn trig_lower_bound(&self) -> f64 {
        let BodyKind::Trig { constant, cos, sin } = &self.kind else {
            return f64::NAN;
        };
        let order = cos.len().max(sin.len());
        let lip: f64 = (1..=order)
            .map(|k| k as f64 * (cos.get(k - 1).map_or(0.0, |c| c.abs()) + sin.get(k - 1).map_or(0.0, |s| s.abs())))
            .sum();
        let samples = 64 * (order + 1).max(64);
        let h = 2.0 * PI / samples as f64;
        let min = (0..samples)
            .map(|j| {
                let (s, c) = (j as f64 * h).sin_cos();
                trig_eval(*constant, cos, sin, c, s)
            })
            .fold(f64::INFINITY, f64::min);
        min - lip * h / 2.0
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::invalid("star bodies need dimension n >= 1"))
    } else {
        Ok(())
    }
}

/// Unit vector `(cos φ, sin φ, 0, …)` in `R^n`; for `n = 1` the sign of `cos φ`.
pub fn direction(n: usize, phi: f64) -> Vec<f64> {
    let mut u = vec![0.0; n];
    if n == 1 {
        u[0] = if phi.cos() >= 0.0 { 1.0 } else { -1.0 };
    } else {
        let (s, c) = phi.sin_cos();
        u[0] = c;
        u[1] = s;
    }
    u
}

/// Normalized double-cap measure of `{|v₁| ≥ |u₁|}`.
fn cap_fraction_of(n: usize, u: &[f64]) -> f64 {
    if n == 1 {
        return 1.0;
    }
    let rest = u[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
    let phi = rest.atan2(u[0].abs()).min(FRAC_PI_2);
    cap_fraction_angle(n, phi)
}

fn trig_eval(constant: f64, cos: &[f64], sin: &[f64], c1: f64, s1: f64) -> f64 {
    let mut r = constant;
    let (mut ck, mut sk) = (1.0, 0.0);
    for k in 0..cos.len().max(sin.len()) {
        let next = (ck * c1 - sk * s1, sk * c1 + ck * s1);
        ck = next.0;
        sk = next.1;
        r += cos.get(k).copied().unwrap_or(0.0) * ck + sin.get(k).copied().unwrap_or(0.0) * sk;
    }
    r
}

/// Piecewise-linear interpolation on a table with increasing abscissae,
/// constant beyond the ends.
pub fn interpolate(table: &[(f64, f64)], x: f64) -> f64 {
    let n = table.len();
    if x <= table[0].0 {
        return table[0].1;
    }
    if x >= table[n - 1].0 {
        return table[n - 1].1;
    }
    let k = table.partition_point(|p| p.0 <= x);
    let (x0, y0) = table[k - 1];
    let (x1, y1) = table[k];
    let w = (x - x0) / (x1 - x0);
    y0 + w * (y1 - y0)
}

/// Mean table value on each distinct `|u₁|` level, ascending in `|u₁|`.
fn zonal_levels(grid: &SphereGrid, values: &[f64]) -> Vec<(f64, f64)> {
    let mut pairs: Vec<(f64, f64)> = grid.nodes().zip(values).map(|(u, &v)| (u[0].abs(), v)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64, usize)> = Vec::new();
    for (t, v) in pairs {
        match out.last_mut() {
            Some(last) if (t - last.0).abs() <= 1e-12 => {
                last.1 += v;
                last.2 += 1;
            }
            _ => out.push((t, v, 1)),
        }
    }
    out.into_iter().map(|(t, s, c)| (t, s / c as f64)).collect()
}

/// Extremes `(a, b)` of `ρ_L/ρ_K` over the grid nodes, and over the 1-D
/// sample directions when both bodies depend only on `|u₁|`.
pub fn ratio_range(k: &StarBody, l: &StarBody, grid: &SphereGrid) -> Result<(f64, f64)> {
    Error::check_dim(k.dim, l.dim)?;
    Error::check_dim(k.dim, grid.dim())?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut visit = |u: &[f64]| -> Result<()> {
        let rk = k.radial_unchecked(u);
        let rl = l.radial_unchecked(u);
        if !(rk > 0.0 && rl > 0.0 && rk.is_finite() && rl.is_finite()) {
            return Err(Error::InvariantViolation(format!("non-positive radial value ({rk}, {rl})")));
        }
        let f = rl / rk;
        lo = lo.min(f);
        hi = hi.max(f);
        Ok(())
    };
    for u in grid.nodes() {
        visit(u)?;
    }
    if let Some(samples) = crate::quadrature::zonal_rule(k, l) {
        for phi in samples.angles() {
            visit(&direction(k.dim, phi))?;
        }
    }
    Ok((lo, hi))
}

/// Whether `(a, b)` from [`ratio_range`] marks a dilate pair.
pub fn is_dilate_range(a: f64, b: f64) -> bool {
    (b - a) <= DILATE_TOL * b
}

// ---- serialization ----

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BodyRepr {
    pub dim: usize,
    #[serde(flatten)]
    pub kind: KindRepr,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KindRepr {
    Ball {
        radius: f64,
    },
    Dilate {
        base: Box<BodyRepr>,
        factor: f64,
    },
    Zonal {
        #[serde(default)]
        axis: ZonalAxis,
        profile: Vec<(f64, f64)>,
    },
    Trig {
        constant: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
    GridTable {
        grid: GridSpec,
        #[serde(default)]
        interpolation: Interpolation,
        values: Vec<f64>,
    },
    RadialSum {
        left: Box<BodyRepr>,
        right: Box<BodyRepr>,
        left_weight: f64,
        right_weight: f64,
    },
}

impl From<StarBody> for BodyRepr {
    fn from(b: StarBody) -> Self {
        BodyRepr::from(&b)
    }
}

impl From<&StarBody> for BodyRepr {
    fn from(b: &StarBody) -> Self {
        let kind = match &b.kind {
            BodyKind::Ball { radius } => KindRepr::Ball { radius: *radius },
            BodyKind::Dilate { base, factor } => KindRepr::Dilate {
                base: Box::new(BodyRepr::from(base.as_ref())),
                factor: *factor,
            },
            BodyKind::Zonal { axis, profile } => KindRepr::Zonal { axis: *axis, profile: profile.clone() },
            BodyKind::Trig { constant, cos, sin } => KindRepr::Trig {
                constant: *constant,
                cos: cos.clone(),
                sin: sin.clone(),
            },
            BodyKind::GridTable { grid, interpolation, values, .. } => KindRepr::GridTable {
                grid: grid.spec(),
                interpolation: *interpolation,
                values: values.clone(),
            },
            BodyKind::RadialSum { left, right, left_weight, right_weight } => KindRepr::RadialSum {
                left: Box::new(BodyRepr::from(left.as_ref())),
                right: Box::new(BodyRepr::from(right.as_ref())),
                left_weight: *left_weight,
                right_weight: *right_weight,
            },
        };
        BodyRepr { dim: b.dim, kind }
    }
}

impl TryFrom<BodyRepr> for StarBody {
    type Error = Error;

    fn try_from(r: BodyRepr) -> Result<Self> {
        let body = match r.kind {
            KindRepr::Ball { radius } => StarBody::ball(r.dim, radius)?,
            KindRepr::Dilate { base, factor } => StarBody::dilate(StarBody::try_from(*base)?, factor)?,
            KindRepr::Zonal { axis, profile } => StarBody::zonal(r.dim, axis, profile)?,
            KindRepr::Trig { constant, cos, sin } => {
                if r.dim != 2 {
                    return Err(Error::invalid("trigonometric bodies are planar (dim 2)"));
                }
                StarBody::trig(constant, cos, sin)?
            }
            KindRepr::GridTable { grid, interpolation, values } => {
                let g = SphereGrid::new(grid.dim, grid.resolution)?;
                StarBody::grid_table(Arc::new(g), interpolation, values)?
            }
            KindRepr::RadialSum { left, right, left_weight, right_weight } => StarBody::radial_sum(
                StarBody::try_from(*left)?,
                StarBody::try_from(*right)?,
                left_weight,
                right_weight,
            )?,
        };
        if body.dim != r.dim {
            return Err(Error::DimensionMismatch { expected: r.dim, found: body.dim });
        }
        Ok(body)
    }
}

impl StarBody {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let repr: BodyRepr = serde_json::from_str(s)?;
        StarBody::try_from(repr)
    }
}
