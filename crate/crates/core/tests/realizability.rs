use std::f64::consts::{E, PI};

use dualsteiner_core::body::direction;
use dualsteiner_core::moment::*;
use dualsteiner_core::quermass::{dual_quermass, full_tuple_auto};
use dualsteiner_core::random::random_zonal;
use dualsteiner_core::special::power_integral;
use dualsteiner_core::synth::*;
use dualsteiner_core::{Error, Interval, IntervalMeasure, QuermassTuple, SphereGrid, StarBody};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn iv(a: f64, b: f64) -> Interval {
    Interval::new(a, b).unwrap()
}

fn lebesgue(p: f64) -> f64 {
    (3f64.powf(p + 1.0) - 1.0) / (p + 1.0)
}

fn trig_tuple() -> QuermassTuple {
    QuermassTuple::consecutive(2, vec![PI, 2.0 * PI, 4.5 * PI]).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

#[test]
fn hankel_split_examples() {
    let (a, b) = hankel_split(&[2.0, 4.0, 10.0], iv(1.0, 3.0)).unwrap();
    assert_eq!(a.as_slice(), &[2.0, 4.0, 4.0, 10.0]);
    assert_eq!(b.as_slice(), &[0.0]);
    let (_, b) = hankel_split(&[2.0, 4.0, 26.0 / 3.0], iv(1.0, 3.0)).unwrap();
    assert!((b[(0, 0)] - 4.0 / 3.0).abs() < 1e-14);
    let (a, b) = hankel_split(&[1.0, 2.0, 4.0, 8.0, 16.0], iv(1.0, 3.0)).unwrap();
    assert_eq!((a.nrows(), b.nrows()), (3, 2));
    let (a, b) = hankel_split(&[1.0, 2.0, 4.0, 8.0], iv(1.0, 3.0)).unwrap();
    assert_eq!((a.nrows(), b.nrows()), (2, 2));
    let (a, _) = hankel_split(&[1.0, 1.5, 2.25], iv(1.0, 3.0)).unwrap();
    assert!(a.determinant().abs() < 1e-14);
}

#[test]
fn hausdorff_examples() {
    let leb: Vec<f64> = (0..5).map(|i| lebesgue(i as f64)).collect();
    for (x, y) in leb.iter().zip([2.0, 4.0, 26.0 / 3.0, 20.0, 242.0 / 5.0]) {
        assert!(rel(*x, y) < 1e-15);
    }
    assert_eq!(hausdorff_feasible(&leb, iv(1.0, 3.0)).unwrap(), Feasibility::StrictlyFeasible);
    assert_eq!(hausdorff_feasible(&[2.0, 4.0, 10.0], iv(1.0, 3.0)).unwrap(), Feasibility::Boundary);
    assert_eq!(hausdorff_feasible(&[1.0, 2.0, 3.0], iv(0.1, 10.0)).unwrap(), Feasibility::Infeasible);
    // (t−1)(3−t) ≥ 0 on [1,3] pairs to zero with δ₁+δ₃; (t−2)² pairs negatively with (1,2,3)
    let pair = |c: &[f64], w: &[f64]| c.iter().zip(w).map(|(a, b)| a * b).sum::<f64>();
    assert_eq!(pair(&[-3.0, 4.0, -1.0], &[2.0, 4.0, 10.0]), 0.0);
    assert_eq!(pair(&[4.0, -4.0, 1.0], &[1.0, 2.0, 3.0]), -1.0);
}

#[test]
fn cone_interior_examples() {
    let v = cone_interior_check(&trig_tuple(), iv(1.0, 3.0)).unwrap();
    assert_eq!(v.status, ConeStatus::Interior);
    let d = v.density.unwrap();
    assert!(d.floor() > 0.0);
    for (i, w) in [(0.0, PI), (1.0, 2.0 * PI), (2.0, 4.5 * PI)] {
        assert!(rel(d.moment(i), w) < 1e-8);
    }
    let ray = QuermassTuple::consecutive(2, vec![PI, 2.0 * PI, 4.0 * PI]).unwrap();
    let v = cone_interior_check(&ray, iv(1.0, 3.0)).unwrap();
    assert_eq!(v.status, ConeStatus::GeometricRay);
    assert!((v.lambda.unwrap() - 2.0).abs() < 1e-12);

    let idx = vec![0.0, 0.5, E];
    let vals = idx.iter().map(|&p| power_integral(p, 1.0, 3.0)).collect();
    let t = QuermassTuple::new(2, idx.clone(), vals).unwrap();
    let v = cone_interior_check(&t, iv(1.0, 3.0)).unwrap();
    assert_eq!(v.status, ConeStatus::Interior);
    let d = v.density.unwrap();
    for (&p, &w) in idx.iter().zip(t.values()) {
        assert!(rel(d.moment(p), w) < 1e-8);
        assert!(rel(w, lebesgue(p)) < 1e-13);
    }
    let single = QuermassTuple::new(2, vec![0.0], vec![1.0]).unwrap();
    assert!(cone_interior_check(&single, iv(1.0, 3.0)).is_err());
}

#[test]
fn interval_search_examples() {
    let v = interval_search(&trig_tuple()).unwrap();
    assert_eq!(v.status, ConeStatus::Interior);
    let d = v.density.unwrap();
    for (i, w) in [(0.0, PI), (1.0, 2.0 * PI), (2.0, 4.5 * PI)] {
        assert!(rel(d.moment(i), w) < 1e-8);
    }
    let bad = QuermassTuple::consecutive(2, vec![1.0, 2.0, 3.0]).unwrap();
    let v = interval_search(&bad).unwrap();
    assert_eq!(v.status, ConeStatus::Outside);
    assert!(v.certificate.is_some());
    let ray = QuermassTuple::consecutive(3, vec![0.7, 0.7 * 1.3, 0.7 * 1.69, 0.7 * 2.197]).unwrap();
    assert_eq!(interval_search(&ray).unwrap().status, ConeStatus::GeometricRay);
}

#[test]
fn positivity_cross_check_examples() {
    let leb = QuermassTuple::consecutive(4, (0..5).map(|i| lebesgue(i as f64)).collect()).unwrap();
    let r = positivity_cross_check(&leb, iv(1.0, 3.0), 10_000, 1).unwrap();
    assert!(r.pass && r.witness.is_none());
    let bad = QuermassTuple::consecutive(2, vec![1.0, 2.0, 3.0]).unwrap();
    let r = positivity_cross_check(&bad, iv(0.1, 10.0), 1000, 1).unwrap();
    assert!(!r.pass && r.witness.is_some());
    let edge = QuermassTuple::consecutive(2, vec![2.0, 4.0, 10.0]).unwrap();
    let r = positivity_cross_check(&edge, iv(1.0, 3.0), 1000, 1).unwrap();
    assert!(r.boundary_contact);
}

#[test]
fn feasibility_agrees_with_lp_on_random_densities() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let cfg = MomentConfig::default();
    for _ in 0..100 {
        let m = rng.random_range(2..=5usize);
        let knots: Vec<f64> = (0..6).map(|_| rng.random_range(0.05..1.0)).collect();
        // piecewise-constant positive density on [1, 3], moments in closed form
        let vals: Vec<f64> = (0..=m)
            .map(|i| {
                knots
                    .iter()
                    .enumerate()
                    .map(|(j, h)| h * power_integral(i as f64, 1.0 + j as f64 / 3.0, 1.0 + (j + 1) as f64 / 3.0))
                    .sum()
            })
            .collect();
        let t = QuermassTuple::consecutive(m, vals.clone()).unwrap();
        let lp = cone_interior_check_with(&t, iv(1.0, 3.0), &cfg).unwrap();
        let hk = hausdorff_feasible(&vals, iv(1.0, 3.0)).unwrap();
        assert_eq!(lp.status == ConeStatus::Interior, hk == Feasibility::StrictlyFeasible);
        assert_eq!(lp.status, ConeStatus::Interior);
        let wide = cone_interior_check_with(&t, iv(0.5, 4.0), &cfg).unwrap();
        assert_eq!(wide.status, ConeStatus::Interior);
    }
}

#[test]
fn cap_fraction_examples() {
    assert!((cap_fraction(2, 0.5f64.sqrt()).unwrap() - 0.5).abs() < 1e-14);
    assert!((cap_fraction(3, 0.25).unwrap() - 0.75).abs() < 1e-14);
    for n in 2..=7 {
        assert_eq!(cap_fraction(n, 1.0).unwrap(), 0.0);
        assert!((cap_fraction(n, 0.0).unwrap() - 1.0).abs() < 1e-14);
        let mut last = 1.0;
        for k in 1..=20 {
            let f = cap_fraction(n, k as f64 / 20.0).unwrap();
            assert!(f <= last);
            last = f;
        }
    }
    assert!(cap_fraction(3, 1.5).is_err());
}

#[test]
fn measure_fit_examples() {
    let t = QuermassTuple::new(2, vec![0.0, 1.0], vec![PI, 2.0 * PI]).unwrap();
    let m = measure_from_moments(&t, iv(1.0, 3.0)).unwrap();
    assert!(rel(m.mass(), PI) < 1e-9 && rel(m.moment(1.0), 2.0 * PI) < 1e-9);
    assert!(m.floor() > 0.0);
    let t = QuermassTuple::new(2, vec![0.0], vec![PI]).unwrap();
    let m = measure_from_moments(&t, iv(1.0, 2.0)).unwrap();
    assert!(rel(m.mass(), PI) < 1e-9 && m.has_full_support());
    let m = measure_from_moments(&trig_tuple(), iv(1.0, 3.0)).unwrap();
    for (i, w) in [(0.0, PI), (1.0, 2.0 * PI), (2.0, 4.5 * PI)] {
        assert!(rel(m.moment(i), w) < 1e-9);
    }
    let bad = QuermassTuple::consecutive(2, vec![PI, 2.0 * PI, 3.0 * PI]).unwrap();
    assert!(matches!(measure_from_moments(&bad, iv(1.0, 3.0)), Err(Error::Refusal { .. })));
    let unnormalized = QuermassTuple::consecutive(2, vec![1.0, 2.0, 4.5]).unwrap();
    assert!(matches!(measure_from_moments(&unnormalized, iv(1.0, 3.0)), Err(Error::InvalidInput(_))));
}

#[test]
fn uniform_measure_body() {
    let mu = IntervalMeasure::uniform(iv(1.0, 3.0), PI).unwrap();
    let profile = DecreasingProfile::new(&mu);
    for k in 0..=40 {
        let t = 1.0 + k as f64 / 20.0;
        assert!((profile.f(t) - (3.0 - t) / 2.0).abs() < 1e-10);
        let s = k as f64 / 40.0;
        assert!((profile.g(s) - (3.0 - 2.0 * s)).abs() < 1e-10);
        assert!((profile.g(profile.f(t)) - t).abs() < 1e-10);
    }
    let l = body_from_measure(&mu, 2).unwrap();
    let closed = |th: f64| 3.0 - 4.0 / PI * th.cos().abs().acos();
    for k in 0..100 {
        let th = k as f64 * 0.0731;
        assert!((l.radial(&direction(2, th)).unwrap() - closed(th)).abs() < 1e-9);
    }
    let b = StarBody::unit_ball(2);
    let g = SphereGrid::new(2, 2048).unwrap();
    assert!(rel(dual_quermass(&b, &l, 1.0, &g).unwrap(), 2.0 * PI) < 1e-6);
    assert!(rel(dual_quermass(&b, &l, 2.0, &g).unwrap(), 13.0 * PI / 3.0) < 1e-6);
    let unnormalized = IntervalMeasure::uniform(iv(1.0, 3.0), 1.0).unwrap();
    assert!(body_from_measure(&unnormalized, 2).is_err());
    let atomic = IntervalMeasure::new(iv(1.0, 3.0), vec![(3.0, PI)], 0.0).unwrap();
    assert!(body_from_measure(&atomic, 2).is_err());
}

#[test]
fn near_atomic_measure_gives_near_ball() {
    let eps = 1e-9;
    let mu = IntervalMeasure::new(iv(1.0, 3.0), vec![(2.0, PI - 2.0 * eps)], eps).unwrap();
    let l = body_from_measure(&mu, 2).unwrap();
    let g = SphereGrid::new(2, 256).unwrap();
    // only the poles and the equator, where the cap fraction is 0 or 1, see the floor
    let off = g
        .nodes()
        .filter(|u| (1e-3..0.999).contains(&u[0].abs()))
        .map(|u| (l.radial(u).unwrap() - 2.0).abs())
        .fold(0.0, f64::max);
    assert!(off < 1e-3, "{off}");
}

#[test]
fn synthesized_body_grows_towards_the_axis() {
    let mu = IntervalMeasure::uniform(iv(0.5, 2.0), 4.0 * PI / 3.0).unwrap();
    let l = body_from_measure(&mu, 3).unwrap();
    let g = SphereGrid::new(3, 12).unwrap();
    let mut pts: Vec<(f64, f64)> = g.nodes().map(|u| (u[0].abs(), l.radial(u).unwrap())).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert!(pts.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-12));
}

#[test]
fn realize_examples() {
    let r = realize_pair(&trig_tuple(), 2).unwrap();
    assert_eq!(r.verdict.status, ConeStatus::Interior);
    assert!(r.deviation <= ROUND_TRIP_TOL);
    let again = full_tuple_auto(&r.k, &r.l).unwrap();
    for (x, y) in again.values().iter().zip([PI, 2.0 * PI, 4.5 * PI]) {
        assert!(rel(*x, y) < 1e-6);
    }
    let ray = QuermassTuple::consecutive(2, vec![PI, 2.0 * PI, 4.0 * PI]).unwrap();
    let r = realize_pair(&ray, 2).unwrap();
    assert_eq!(r.verdict.status, ConeStatus::GeometricRay);
    let g = SphereGrid::new(2, 64).unwrap();
    for u in g.nodes() {
        assert!((r.k.radial(u).unwrap() - 1.0).abs() < 1e-12);
        assert!((r.l.radial(u).unwrap() - 2.0).abs() < 1e-12);
    }
    let bad = QuermassTuple::consecutive(2, vec![1.0, 2.0, 3.0]).unwrap();
    match realize_pair(&bad, 2) {
        Err(Error::Refusal { verdict: Some(v), .. }) => assert_eq!(v.status, ConeStatus::Outside),
        other => panic!("expected refusal, got {other:?}"),
    }
}

#[test]
fn round_trip_random_zonal_bodies() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for n in [3usize, 4] {
        for _ in 0..3 {
            let l = random_zonal(&mut rng, n, 4).unwrap();
            let t = full_tuple_auto(&StarBody::unit_ball(n), &l).unwrap();
            let r = realize_pair(&t, n).unwrap();
            assert!(r.deviation <= ROUND_TRIP_TOL, "n = {n}: {}", r.deviation);
            let back = full_tuple_auto(&r.k, &r.l).unwrap();
            for (x, y) in back.values().iter().zip(t.values()) {
                assert!(rel(*x, *y) < 1e-6);
            }
        }
    }
}
