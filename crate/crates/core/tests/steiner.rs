use std::f64::consts::PI;

use dualsteiner_core::moment::interval_search;
use dualsteiner_core::random::{random_dilate_pair, random_pair};
use dualsteiner_core::special::ball_volume;
use dualsteiner_core::steiner::*;
use dualsteiner_core::{quermass, ConeStatus, QuermassTuple, SphereGrid, StarBody};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn trig_pair() -> (StarBody, StarBody) {
    (StarBody::unit_ball(2), StarBody::trig(2.0, vec![1.0], vec![]).unwrap())
}

fn trig_poly() -> DualSteinerPoly {
    let (k, l) = trig_pair();
    DualSteinerPoly::from_pair_auto(&k, &l).unwrap()
}

fn gamma() -> Complex64 {
    Complex64::new(-4.0 / 9.0, 2f64.sqrt() / 9.0)
}

#[test]
fn trig_pair_polynomial_and_volume() {
    let p = trig_poly();
    for (c, e) in p.coeffs().iter().zip([PI, 4.0 * PI, 4.5 * PI]) {
        assert!((c / e - 1.0).abs() < 1e-12);
    }
    let (k, l) = trig_pair();
    let sum = StarBody::radial_sum(k, l, 1.0, 1.0).unwrap();
    let grid = SphereGrid::new(2, 256).unwrap();
    let vol = quermass::dual_quermass(&sum, &sum, 0.0, &grid).unwrap();
    assert!((p.eval(Complex64::new(1.0, 0.0)).re / vol - 1.0).abs() < 1e-12);
    assert!((vol / (9.5 * PI) - 1.0).abs() < 1e-12);
}

#[test]
fn equal_bodies_give_binomial_polynomial() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 2..=4 {
        let (k, _) = random_pair(&mut rng, n).unwrap();
        let p = DualSteinerPoly::from_pair_auto(&k, &k).unwrap();
        let vol = p.coeffs()[0];
        for i in 0..=n {
            let expect = vol * dualsteiner_core::special::binomial(n, i);
            assert!((p.coeffs()[i] / expect - 1.0).abs() < 1e-13);
        }
        let r = p.roots();
        assert!(r.roots.iter().all(|z| (z + 1.0).norm() < 1e-12), "{:?}", r.roots);
    }
}

#[test]
fn reciprocity_and_vieta_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=4 {
        for s in 0..5 {
            let (k, l) = random_pair(&mut rng, n).unwrap();
            let p = DualSteinerPoly::from_pair_auto(&k, &l).unwrap();
            let q = DualSteinerPoly::from_pair_auto(&l, &k).unwrap();
            assert!(p.reciprocity_deviation(&q, 20, s).unwrap() < 1e-10);
            let r = p.roots();
            assert!(r.residual <= 1e-10, "residual {}", r.residual);
            assert!(r.conjugate_gap() <= 1e-9);
            assert!(p.vieta_deviation(&r) <= 1e-8);
            assert!(r.roots.iter().all(|z| !(z.im == 0.0 && z.re >= 0.0)));
        }
    }
}

#[test]
fn transform_examples() {
    let l = StarBody::unit_ball(3);
    let p = DualSteinerPoly::from_pair_auto(&l, &l).unwrap();
    let t = transform_root(&p, Complex64::new(-1.0, 0.0), RootTransform::Scale(2.0)).unwrap();
    assert_eq!(t.predicted, Complex64::new(-2.0, 0.0));
    assert!(t.recomputed_gap().unwrap() < 1e-8);

    let p = trig_poly();
    let t = transform_root(&p, gamma(), RootTransform::Shift(0.1)).unwrap();
    assert!((t.predicted - (gamma() - 0.1)).norm() < 1e-15);
    assert!(t.recomputed_gap().unwrap() < 1e-8);
    let t = transform_root(&p, gamma(), RootTransform::Compress(0.5)).unwrap();
    assert!((t.predicted - Complex64::new(-4.0 / 9.0, 0.5 * 2f64.sqrt() / 9.0)).norm() < 1e-15);
    assert!(t.recomputed_gap().unwrap() < 1e-8);
    assert!(transform_root(&p, gamma().conj() * -1.0, RootTransform::Compress(0.5)).is_err());
    assert!(transform_root(&p, Complex64::new(-1.0, 1.0), RootTransform::Scale(2.0)).is_err());
}

#[test]
fn descend_trig_pair() {
    let p = trig_poly();
    let d = derivative_descend(&p).unwrap();
    assert!(d.deviation < 1e-6);
    assert!((d.target.coeffs()[0] / (4.0 * PI) - 1.0).abs() < 1e-12);
    assert!((d.target.coeffs()[1] / (9.0 * PI) - 1.0).abs() < 1e-12);
    let r = d.poly.roots();
    assert!((r.roots[0].re + 4.0 / 9.0).abs() < 1e-9);
    assert!(lucas_contained(&r.roots, &p.roots().roots, HULL_SLACK));
}

#[test]
fn lift_examples() {
    let b = StarBody::unit_ball(2);
    let p = DualSteinerPoly::from_pair_auto(&b, &b).unwrap();
    let lift = antiderivative_lift(&p).unwrap();
    for (i, c) in lift.poly.coeffs().iter().enumerate() {
        let expect = PI / 3.0 * dualsteiner_core::special::binomial(3, i);
        assert!((c / expect - 1.0).abs() < 1e-10, "{:?}", lift.poly.coeffs());
    }
    assert!(lucas_contained(&p.roots().roots, &lift.poly.roots().roots, HULL_SLACK));

    let p = trig_poly();
    let lift = antiderivative_lift(&p).unwrap();
    assert!(lift.deviation < 1e-6, "deviation {}", lift.deviation);
    assert!(lift.margin > 0.0);
    assert!(lucas_contained(&p.roots().roots, &lift.poly.roots().roots, HULL_SLACK));
    let again = antiderivative_lift(&lift.poly).unwrap();
    assert!(again.deviation < 1e-6);
    assert!(lucas_contained(&lift.poly.roots().roots, &again.poly.roots().roots, HULL_SLACK));
}

#[test]
fn stability_and_nonstable_search() {
    let p = DualSteinerPoly::from_values(3, &[1.001, 0.02, 0.1001, 1.000001]).unwrap();
    assert_eq!(stability_check(&p).verdict, Stability::Nonstable);
    let c = p.coeffs();
    assert!(c[1] * c[2] < c[0] * c[3]);
    assert!(nonstable_search(2, 0, 10).is_err());
    let w = nonstable_search(3, 0, DEFAULT_NONSTABLE_BUDGET).unwrap();
    assert!(w.root.re > 0.0 && w.residual <= 1e-10);
    assert!(w.root.im > 3f64.sqrt() * w.root.re);
    assert_eq!(stability_check(&w.poly).verdict, Stability::Nonstable);
}

#[test]
fn rigidity_examples() {
    let l = StarBody::unit_ball(2);
    let k = StarBody::dilate(l.clone(), 2.0).unwrap();
    let p = DualSteinerPoly::from_pair_auto(&k, &l).unwrap();
    let rep = real_roots_rigidity_check(&p).unwrap();
    assert!(rep.all_real && rep.coincide == Some(true) && rep.dilate == Some(true));
    assert!(p.roots().roots.iter().all(|z| *z == Complex64::new(-2.0, 0.0)));

    let rep = real_roots_rigidity_check(&trig_poly()).unwrap();
    assert!(!rep.all_real);
    assert_eq!(rep.newton_slack.len(), 1);
    assert!(rep.newton_slack[0] < 0.0);

    let synthetic = DualSteinerPoly::from_coeffs(3, vec![1.0, 11.0 / 6.0, 1.0, 1.0 / 6.0]).unwrap();
    let t = synthetic.tuple().unwrap();
    let v = interval_search(&t).unwrap();
    assert!(matches!(v.status, ConeStatus::Outside | ConeStatus::Unknown));

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in 2..=3 {
        let (k, l) = random_dilate_pair(&mut rng, n).unwrap();
        let p = DualSteinerPoly::from_pair_auto(&k, &l).unwrap();
        let rep = real_roots_rigidity_check(&p).unwrap();
        assert!(rep.all_real, "{:?}", p.roots());
    }
}

#[test]
fn descend_random_and_tuple_normalization() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 2..=4 {
        let (k, l) = random_pair(&mut rng, n).unwrap();
        let p = DualSteinerPoly::from_pair_auto(&k, &l).unwrap();
        let d = derivative_descend(&p).unwrap();
        assert!(d.deviation < 1e-6, "n={n} dev {}", d.deviation);
        assert!(lucas_contained(&d.target.roots().roots, &p.roots().roots, HULL_SLACK));
        let t = QuermassTuple::consecutive(n, p.quermass()).unwrap();
        assert!(t.omega0() > 0.0 && ball_volume(n) > 0.0);
    }
}
