//! Closed forms and small numerical kernels shared by the geometry modules.

use std::f64::consts::{FRAC_PI_2, PI};

/// Volume of the unit ball `|B^n_2| = π^{n/2} / Γ(n/2 + 1)`, via the
/// two-step recurrence `V_n = 2π/n · V_{n-2}`.
pub fn ball_volume(n: usize) -> f64 {
    let (mut v, start) = if n.is_multiple_of(2) { (1.0, 2) } else { (2.0, 3) };
    let mut k = start;
    while k <= n {
        v *= 2.0 * PI / k as f64;
        k += 2;
    }
    v
}

/// Spherical Lebesgue measure of `S^{n-1}`, i.e. `n·|B^n_2|`.
pub fn sphere_area(n: usize) -> f64 {
    n as f64 * ball_volume(n)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    acc.round()
}

/// `∫_0^φ sin^k(x) dx` by the standard reduction formula.
pub fn sin_power_integral(k: usize, phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    let half = (0.5 * phi).sin();
    let mut before = phi; // I_{j-2}
    let mut last = 2.0 * half * half; // I_{j-1} = 1 - cos φ
    match k {
        0 => return before,
        1 => return last,
        _ => {}
    }
    let mut sp = s; // sin^{j-1}
    for j in 2..=k {
        let jf = j as f64;
        let cur = -sp * c / jf + (jf - 1.0) / jf * before;
        before = last;
        last = cur;
        sp *= s;
    }
    last
}

/// Normalised spherical measure of the double cap `{v ∈ S^{n-1} : angle(v, ±e_1) ≤ φ}`
/// for `φ ∈ [0, π/2]`.
pub fn cap_fraction_angle(n: usize, phi: f64) -> f64 {
    debug_assert!(n >= 2);
    let k = n - 2;
    let phi = phi.clamp(0.0, FRAC_PI_2);
    (sin_power_integral(k, phi) / sin_power_integral(k, FRAC_PI_2)).clamp(0.0, 1.0)
}

/// Inverse of [`cap_fraction_angle`] on `[0, π/2]`.
pub fn cap_angle_for_fraction(n: usize, frac: f64) -> f64 {
    let frac = frac.clamp(0.0, 1.0);
    if frac <= 0.0 {
        return 0.0;
    }
    if frac >= 1.0 {
        return FRAC_PI_2;
    }
    let (mut lo, mut hi) = (0.0_f64, FRAC_PI_2);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cap_fraction_angle(n, mid) < frac {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi.max(1e-300) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(p: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(p >= 1);
    let mut nodes = vec![0.0; p];
    let mut weights = vec![0.0; p];
    let m = p.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (p as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (pn, dpn) = legendre_with_derivative(p, x);
            dp = dpn;
            let dx = pn / dpn;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, dpn) = legendre_with_derivative(p, x);
        dp = if dpn != 0.0 { dpn } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[p - 1 - i] = x;
        weights[i] = w;
        weights[p - 1 - i] = w;
    }
    if p % 2 == 1 {
        nodes[p / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(p: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=p {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let pn = if p == 0 { 1.0 } else { p1 };
    let prev = if p == 0 { 0.0 } else { p0 };
    let d = p as f64 * (x * pn - prev) / (x * x - 1.0);
    (pn, d)
}

/// Gauss–Legendre rule mapped onto `[a, b]`.
pub fn gauss_legendre_on(p: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(p);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        x.iter().map(|&xi| mid + half * xi).collect(),
        w.iter().map(|&wi| half * wi).collect(),
    )
}

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<KahanSum>().value()
}

/// `∫_a^b t^p dt` for any real `p`, stable near `p = -1`.
pub fn power_integral(p: f64, a: f64, b: f64) -> f64 {
    let q = p + 1.0;
    let log_ratio = (b / a).ln();
    if q.abs() < 1e-300 {
        return log_ratio;
    }
    // a^q (exp(q ln(b/a)) - 1) / q
    (q * a.ln()).exp() * (q * log_ratio).exp_m1() / q
}

/// `t^p` evaluated as `exp(p ln t)` for `t > 0`.
#[inline]
pub fn rpow(t: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else if p == 1.0 {
        t
    } else {
        (p * t.ln()).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ball_volumes_match_closed_forms() {
        assert_relative_eq!(ball_volume(1), 2.0);
        assert_relative_eq!(ball_volume(2), PI, max_relative = 1e-15);
        assert_relative_eq!(ball_volume(3), 4.0 * PI / 3.0, max_relative = 1e-15);
        assert_relative_eq!(ball_volume(4), PI * PI / 2.0, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(3), 4.0 * PI, max_relative = 1e-15);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(10, 3), 120.0);
        assert_eq!(binomial(3, 5), 0.0);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        for deg in 0..14 {
            let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "deg {deg}: {q} vs {exact}");
        }
        let (x, w) = gauss_legendre(200);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-13);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn cap_fraction_closed_forms() {
        // n = 2: 2 arccos(s)/π, n = 3: 1 - s
        for &s in &[0.0, 0.1, 0.5, 0.9, 1.0_f64] {
            let phi = s.acos();
            assert!((cap_fraction_angle(2, phi) - 2.0 * phi / PI).abs() < 1e-15);
            assert!((cap_fraction_angle(3, phi) - (1.0 - s)).abs() < 1e-15);
        }
        for n in 2..7 {
            for &f in &[0.0, 0.01, 0.3, 0.77, 1.0] {
                let phi = cap_angle_for_fraction(n, f);
                assert!((cap_fraction_angle(n, phi) - f).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn power_integral_cases() {
        assert_relative_eq!(power_integral(2.0, 1.0, 3.0), 26.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(power_integral(-1.0, 1.0, 3.0), 3f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(power_integral(0.5, 1.0, 3.0), (2.0 / 3.0) * (3f64.powf(1.5) - 1.0), max_relative = 1e-14);
    }
}
