use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use tetra_bench::{degree4_poly, reference_pair, reference_triple, sample_points};
use tetra_core::calculus::{eval_point, BoundarySamples};
use tetra_core::dilation::{build_theorem_b, residual_report};
use tetra_core::domain::{inscribed_polydisk_radius, member};
use tetra_core::matrix::{operator_norm, random_unitary};
use tetra_core::structure::{certify_sampling, fundamental_operators, SamplingParams};

fn membership(c: &mut Criterion) {
    let pts = sample_points();
    c.bench_function("member/64 points", |b| {
        b.iter(|| {
            for p in &pts {
                black_box(member(p, 1e-9).unwrap());
            }
        })
    });
    c.bench_function("inscribed_radius/1e-3", |b| {
        b.iter(|| inscribed_polydisk_radius(black_box(1e-3)))
    });
}

fn linear_algebra(c: &mut Criterion) {
    let u = random_unitary(16, 3);
    c.bench_function("operator_norm/16x16", |b| {
        b.iter(|| operator_norm(black_box(&u)).unwrap())
    });
    let t = reference_triple();
    c.bench_function("fundamental_operators/2x2", |b| {
        b.iter(|| fundamental_operators(black_box(&t)).unwrap())
    });
}

fn polynomials(c: &mut Criterion) {
    let f = degree4_poly();
    let pts = sample_points();
    c.bench_function("eval_point/degree 4", |b| {
        b.iter(|| pts.iter().map(|p| eval_point(&f, p).norm()).sum::<f64>())
    });
    let samples = BoundarySamples::new(2000, 5);
    c.bench_function("sup_norm/2000 samples", |b| {
        b.iter(|| samples.sup_norm(black_box(&f)))
    });
}

fn pipelines(c: &mut Criterion) {
    let t = reference_triple();
    let p = reference_pair();
    c.bench_function("dilation/depth 8 report", |b| {
        b.iter(|| {
            let d = build_theorem_b(&t, &p, 8, 1).unwrap();
            residual_report(&d, &t, 3, 5).unwrap()
        })
    });
    let params = SamplingParams {
        npolys: 20,
        ..SamplingParams::default()
    };
    let mut group = c.benchmark_group("sampling");
    group.sample_size(10);
    group.bench_function("certify_sampling/20 polys", |b| {
        b.iter(|| certify_sampling(&t, &params, 1).unwrap())
    });
    group.finish();
}

criterion_group!(benches, membership, linear_algebra, polynomials, pipelines);
criterion_main!(benches);
