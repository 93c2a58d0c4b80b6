use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use dualsteiner_bench::{pair, uniform_poly, uniform_tuple};
use dualsteiner_core::moment::{interval_search, lp_witness};
use dualsteiner_core::quermass::dual_quermass_many;
use dualsteiner_core::rootcone::{membership_search, SearchConfig};
use dualsteiner_core::{Interval, MomentConfig, SphereGrid};
use num_complex::Complex64;

fn quadrature(c: &mut Criterion) {
    let idx = [0.0, 1.0, 2.0, 3.0];
    for n in [2, 3] {
        let (k, l) = pair(n, 1);
        let grid = SphereGrid::shared_default(n).unwrap();
        c.bench_function(&format!("quermass n={n} default grid"), |b| {
            b.iter(|| dual_quermass_many(black_box(&k), black_box(&l), &idx, &grid).unwrap())
        });
    }
}

fn roots(c: &mut Criterion) {
    for n in [3, 8, 16] {
        let p = uniform_poly(n);
        c.bench_function(&format!("roots n={n}"), |b| b.iter(|| black_box(&p).roots()));
    }
}

fn lp(c: &mut Criterion) {
    let t = uniform_tuple(4);
    let iv = Interval::new(0.9, 3.2).unwrap();
    let cfg = MomentConfig::default();
    c.bench_function("lp witness m=4", |b| b.iter(|| lp_witness(t.indices(), black_box(t.values()), iv, &cfg)));
    c.bench_function("interval search m=4", |b| b.iter(|| interval_search(black_box(&t)).unwrap()));
}

fn search(c: &mut Criterion) {
    let cfg = SearchConfig::default();
    let z = Complex64::new(-0.1, 1.0);
    let mut g = c.benchmark_group("membership");
    g.sample_size(10);
    g.bench_function("search n=3 at -0.1+i", |b| b.iter(|| membership_search(black_box(z), 3, &cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, quadrature, roots, lp, search);
criterion_main!(benches);
