//! Dense real polynomials with ascending coefficients.

use num_complex::Complex64;

pub fn add(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len().max(q.len())];
    for (k, c) in p.iter().enumerate() {
        out[k] += c;
    }
    for (k, c) in q.iter().enumerate() {
        out[k] += c;
    }
    out
}

pub fn mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

pub fn scale(p: &[f64], s: f64) -> Vec<f64> {
    p.iter().map(|c| c * s).collect()
}

/// `p(α + β t)` as a polynomial in `t`.
pub fn compose_linear(p: &[f64], alpha: f64, beta: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &c in p.iter().rev() {
        out = add(&mul(&out, &[alpha, beta]), &[c]);
    }
    out
}

pub fn eval(p: &[f64], t: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

pub fn eval_complex(p: &[f64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

pub fn derivative(p: &[f64]) -> Vec<f64> {
    p.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect()
}

/// Monic polynomial with the given roots, complex arithmetic; imaginary
/// parts are dropped, which is exact for conjugate-closed root sets.
pub fn from_roots(roots: &[Complex64]) -> Vec<f64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (k, &a) in c.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= a * r;
        }
        c = next;
    }
    c.into_iter().map(|z| z.re).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebra() {
        assert_eq!(mul(&[1.0, 1.0], &[1.0, 1.0]), vec![1.0, 2.0, 1.0]);
        assert_eq!(compose_linear(&[0.0, 0.0, 1.0], -2.0, 1.0), vec![4.0, -4.0, 1.0]);
        assert_eq!(eval(&[1.0, 2.0, 3.0], 2.0), 17.0);
        assert_eq!(derivative(&[1.0, 2.0, 3.0]), vec![2.0, 6.0]);
        let p = from_roots(&[Complex64::new(-1.0, 2.0), Complex64::new(-1.0, -2.0)]);
        assert_eq!(p, vec![5.0, 2.0, 1.0]);
    }
}
