use criterion::{criterion_group, criterion_main, Criterion};
use hochgysin_bench::{torus_algebra, torus_sections};
use hochgysin_core::exactlin::smith_normal_form;
use hochgysin_core::hochschild::{theta, trivialize};
use hochgysin_core::TwistedBimodule;
use std::hint::black_box;

fn smith(c: &mut Criterion) {
    let d2 = torus_algebra(3).d(2);
    c.bench_function("snf torus(3) d^2", |b| {
        b.iter(|| smith_normal_form(black_box(&d2)))
    });
}

fn secondary(c: &mut Criterion) {
    let co = torus_sections(2, Some(1));
    c.bench_function("theta torus(2)", |b| {
        b.iter(|| theta(black_box(&co)).unwrap())
    });
    let th = theta(&co).unwrap();
    let m = TwistedBimodule::new(co.cohomology_ring());
    c.bench_function("trivialize torus(2)", |b| {
        b.iter(|| trivialize(black_box(&th), &m).unwrap())
    });
    c.bench_function("sections torus(2)", |b| {
        b.iter(|| torus_sections(2, Some(1)))
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = smith, secondary
}
criterion_main!(benches);
