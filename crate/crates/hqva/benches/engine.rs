//! One-worker pool against the full rayon pool on the same suites.
//! `cargo bench -p hqva --no-default-features` gives the sequential build.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hqva::fock::{self, FockCfg};
use hqva::genspace::{self, Tables};
use hqva::par;
use hqva::series::{q, Trunc};
use hqva::structconst;
use hqva::tau::{self, CartanDatum};
use std::hint::black_box;

fn modes() -> Vec<(&'static str, Option<usize>)> {
    let all = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut v = vec![("threads=1", Some(1))];
    if par::is_parallel() {
        v.push(("threads=all", Some(all)));
    }
    v
}

fn suites(c: &mut Criterion) {
    let d = CartanDatum::a2();
    let t = Trunc::new(6, 12);
    let tb = Tables::build(&d, &[q(1), q(2), q(3)], t, None).unwrap();
    let cfg = FockCfg { modes: 2, degree: 2, hbar: 3, zwin: 1 };
    let mut g = c.benchmark_group("suites");
    g.sample_size(10);
    for (label, n) in modes() {
        g.bench_with_input(BenchmarkId::new("tech1", label), &n, |b, &n| {
            b.iter(|| par::with_threads(n, || black_box(tau::tech1_suite(&d, &q(1), &q(2), t, None))))
        });
        g.bench_with_input(BenchmarkId::new("unitarity", label), &n, |b, &n| {
            b.iter(|| par::with_threads(n, || black_box(genspace::check_unitarity(&tb, &q(1), &q(2)))))
        });
        g.bench_with_input(BenchmarkId::new("serre", label), &n, |b, &n| {
            b.iter(|| par::with_threads(n, || black_box(structconst::check_serre(&CartanDatum::g2t(), 6, 3, 6))))
        });
        g.bench_with_input(BenchmarkId::new("fock-com", label), &n, |b, &n| {
            b.iter(|| par::with_threads(n, || black_box(fock::check_com_suite(&d, &q(1), &cfg))))
        });
    }
    g.finish();
}

criterion_group!(benches, suites);
criterion_main!(benches);
