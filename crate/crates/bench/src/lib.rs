//! Fixed inputs shared by the benchmarks.

use dualsteiner_core::random::random_pair;
use dualsteiner_core::{DualSteinerPoly, QuermassTuple, StarBody};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A seeded non-dilate pair in `R^n`.
pub fn pair(n: usize, seed: u64) -> (StarBody, StarBody) {
    random_pair(&mut ChaCha8Rng::seed_from_u64(seed), n).expect("random pairs are valid")
}

/// Moments `ω_i = ∫_1^3 t^i dt / 2` of the uniform probability measure on
/// `[1, 3]`, as a tuple in dimension `n`.
pub fn uniform_tuple(n: usize) -> QuermassTuple {
    let values = (0..=n).map(|i| (3f64.powi(i as i32 + 1) - 1.0) / (2.0 * (i as f64 + 1.0))).collect();
    QuermassTuple::consecutive(n, values).expect("moments of a positive measure")
}

/// Dual Steiner polynomial of [`uniform_tuple`].
pub fn uniform_poly(n: usize) -> DualSteinerPoly {
    DualSteinerPoly::from_tuple(&uniform_tuple(n)).expect("positive coefficients")
}
