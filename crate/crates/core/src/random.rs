//! Seeded random star bodies for property suites and searches.

use rand::Rng;

use crate::body::{ratio_range, StarBody, ZonalAxis};
use crate::error::Result;
use crate::grid::SphereGrid;

/// `c + Σ a_k cos kθ + b_k sin kθ` with `Σ|a_k|+|b_k| ≤ 0.8c`, so the
/// radial function stays above `0.2c`.
pub fn random_trig<R: Rng + ?Sized>(rng: &mut R, max_degree: usize) -> Result<StarBody> {
    let degree = rng.random_range(1..=max_degree.max(1));
    let constant = rng.random_range(0.5..2.0);
    let raw: Vec<f64> = (0..2 * degree).map(|_| rng.random_range(-1.0..1.0)).collect();
    let total: f64 = raw.iter().map(|x| x.abs()).sum();
    let budget = 0.8 * constant * rng.random_range(0.2..1.0);
    let scaled: Vec<f64> = raw.iter().map(|x| x * budget / total).collect();
    StarBody::trig(constant, scaled[..degree].to_vec(), scaled[degree..].to_vec())
}

/// Piecewise-linear profile in `|u₁|` with `knots` equispaced knots and
/// values in `[0.5, 2]`.
pub fn random_zonal<R: Rng + ?Sized>(rng: &mut R, n: usize, knots: usize) -> Result<StarBody> {
    let m = knots.max(2);
    let profile = (0..m)
        .map(|j| (j as f64 / (m - 1) as f64, rng.random_range(0.5..2.0)))
        .collect();
    StarBody::zonal(n, ZonalAxis::Height, profile)
}

/// A random body in `R^n`: trigonometric in the plane, zonal otherwise.
pub fn random_body<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<StarBody> {
    if n == 2 {
        random_trig(rng, 3)
    } else {
        let knots = rng.random_range(2..=6);
        random_zonal(rng, n, knots)
    }
}

/// Least `max(ρ_L/ρ_K) / min(ρ_L/ρ_K)` of a [`random_pair`]. Pairs much
/// closer to a dilate are numerically indistinguishable from one at the
/// default Hankel and root tolerances.
pub const MIN_RATIO_SPREAD: f64 = 1.25;

/// Two independent random bodies, redrawn until their ratio range spans at
/// least [`MIN_RATIO_SPREAD`] on a coarse grid.
pub fn random_pair<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<(StarBody, StarBody)> {
    let grid = SphereGrid::new(n, if n == 2 { 64 } else { 6 })?;
    loop {
        let (k, l) = (random_body(rng, n)?, random_body(rng, n)?);
        let (a, b) = ratio_range(&k, &l, &grid)?;
        if b >= MIN_RATIO_SPREAD * a {
            return Ok((k, l));
        }
    }
}

/// `(K, λK)` for a random `K` and `λ ∈ [0.25, 4]`.
pub fn random_dilate_pair<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<(StarBody, StarBody)> {
    let k = random_body(rng, n)?;
    let lambda = 4f64.powf(rng.random_range(-1.0..1.0));
    let l = StarBody::dilate(k.clone(), lambda)?;
    Ok((k, l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bodies_are_valid_and_seeded() {
        let mut a = ChaCha8Rng::seed_from_u64(5);
        let mut b = ChaCha8Rng::seed_from_u64(5);
        for n in 2..=4 {
            let (k1, _) = random_pair(&mut a, n).unwrap();
            let (k2, _) = random_pair(&mut b, n).unwrap();
            assert_eq!(k1.to_json().unwrap(), k2.to_json().unwrap());
            assert_eq!(k1.dim(), n);
        }
    }
}
