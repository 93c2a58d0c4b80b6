//! Positive measures on a compact interval of `(0, ∞)`: grid atoms plus an
//! optional uniform floor density.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{compensated_sum, power_integral, rpow};

/// `[a, b]` with `0 < a < b`; serializes as `[a, b]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a.is_finite() && b.is_finite() && 0.0 < a && a < b {
            Ok(Interval { a, b })
        } else {
            Err(Error::invalid(format!("interval needs 0 < a < b, got [{a}, {b}]")))
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.a <= other.a && other.b <= self.b
    }

    /// Chebyshev–Lobatto points, endpoints included, ascending.
    pub fn chebyshev_nodes(&self, count: usize) -> Vec<f64> {
        assert!(count >= 2);
        let mid = 0.5 * (self.a + self.b);
        let half = 0.5 * (self.b - self.a);
        let mut t: Vec<f64> = (0..count)
            .map(|j| mid - half * (std::f64::consts::PI * j as f64 / (count - 1) as f64).cos())
            .collect();
        t[0] = self.a;
        t[count - 1] = self.b;
        t
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = Error;
    fn try_from(v: [f64; 2]) -> Result<Self> {
        Interval::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.a, i.b]
    }
}

/// `μ = Σ w_j δ_{t_j} + ε·dt` on `[a, b]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct IntervalMeasure {
    interval: Interval,
    atoms: Vec<(f64, f64)>,
    floor: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct MeasureRepr {
    interval: Interval,
    #[serde(default)]
    atoms: Vec<(f64, f64)>,
    #[serde(default)]
    floor: f64,
}

impl TryFrom<MeasureRepr> for IntervalMeasure {
    type Error = Error;
    fn try_from(r: MeasureRepr) -> Result<Self> {
        IntervalMeasure::new(r.interval, r.atoms, r.floor)
    }
}

impl From<IntervalMeasure> for MeasureRepr {
    fn from(m: IntervalMeasure) -> Self {
        MeasureRepr { interval: m.interval, atoms: m.atoms, floor: m.floor }
    }
}

impl IntervalMeasure {
    /// Atoms are sorted by location; zero-mass atoms are dropped.
    pub fn new(interval: Interval, atoms: Vec<(f64, f64)>, floor: f64) -> Result<Self> {
        if !(floor >= 0.0 && floor.is_finite()) {
            return Err(Error::invalid(format!("measure floor must be finite and >= 0, got {floor}")));
        }
        let mut kept = Vec::with_capacity(atoms.len());
        for (t, w) in atoms {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::invalid(format!("atom mass must be finite and >= 0, got {w}")));
            }
            if !(interval.a <= t && t <= interval.b) {
                return Err(Error::invalid(format!("atom location {t} outside [{}, {}]", interval.a, interval.b)));
            }
            if w > 0.0 {
                kept.push((t, w));
            }
        }
        kept.sort_by(|x, y| x.0.total_cmp(&y.0));
        let m = IntervalMeasure { interval, atoms: kept, floor };
        if m.mass() <= 0.0 {
            return Err(Error::invalid("measure has zero total mass"));
        }
        Ok(m)
    }

    pub fn uniform(interval: Interval, mass: f64) -> Result<Self> {
        Self::new(interval, Vec::new(), mass / interval.len())
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn mass(&self) -> f64 {
        self.moment(0.0)
    }

    /// `m_p(μ) = ∫ t^p dμ(t)` for real `p`.
    pub fn moment(&self, p: f64) -> f64 {
        let floor_part = if self.floor > 0.0 {
            self.floor * power_integral(p, self.interval.a, self.interval.b)
        } else {
            0.0
        };
        compensated_sum(self.atoms.iter().map(|&(t, w)| w * rpow(t, p)).chain([floor_part]))
    }

    /// `μ([t, b])`.
    pub fn tail_mass(&self, t: f64) -> f64 {
        let t = t.clamp(self.interval.a, self.interval.b);
        let atoms = compensated_sum(self.atoms.iter().filter(|a| a.0 >= t).map(|a| a.1));
        atoms + self.floor * (self.interval.b - t)
    }

    /// Full support on `[a, b]` is guaranteed by a positive floor.
    pub fn has_full_support(&self) -> bool {
        self.floor > 0.0
    }

    pub fn scaled(&self, factor: f64) -> Self {
        IntervalMeasure {
            interval: self.interval,
            atoms: self.atoms.iter().map(|&(t, w)| (t, w * factor)).collect(),
            floor: self.floor * factor,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_of_uniform_and_atoms() {
        let i = Interval::new(1.0, 3.0).unwrap();
        let u = IntervalMeasure::uniform(i, 2.0).unwrap();
        assert!((u.moment(1.0) - 4.0).abs() < 1e-14);
        assert!((u.moment(2.0) - 26.0 / 3.0).abs() < 1e-14);
        let d = IntervalMeasure::new(i, vec![(3.0, 1.0), (1.0, 1.0)], 0.0).unwrap();
        assert_eq!(d.atoms()[0].0, 1.0);
        assert!((d.moment(2.0) - 10.0).abs() < 1e-13);
        assert_eq!(d.tail_mass(2.0), 1.0);
        assert_eq!(d.tail_mass(1.0), 2.0);
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(IntervalMeasure::new(i, vec![(4.0, 1.0)], 0.0).is_err());
    }

    #[test]
    fn json_shape() {
        let i = Interval::new(1.0, 3.0).unwrap();
        let m = IntervalMeasure::new(i, vec![(2.0, 0.5)], 0.25).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"interval":[1.0,3.0],"atoms":[[2.0,0.5]],"floor":0.25}"#);
        let back: IntervalMeasure = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
