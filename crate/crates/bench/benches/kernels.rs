use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use gl2lab::basechange::NormCorrespondence;
use gl2lab::curves::Census;
use gl2lab::hecke::{congruence_transversal, hecke_context, tower_average};
use gl2lab::test_functions::{phi_pn, phi_pnt};
use gl2lab::tree::{orbital_ratio, orbital_ratio_by_weights};
use gl2lab::LocalContext;
use gl2lab_bench::{orbital_inputs, phi_inputs};

fn evaluation(c: &mut Criterion) {
    let mut group = c.benchmark_group("phi");
    for (p, n) in [(2u64, 1u32), (3, 2)] {
        let ctx = hecke_context(p, 1, n).unwrap();
        let inputs = phi_inputs(&ctx, n, 64);
        group.bench_with_input(BenchmarkId::new("value", format!("{p}^{n}")), &inputs, |b, gs| {
            b.iter(|| gs.iter().map(|g| phi_pn(black_box(g), n).unwrap()).collect::<Vec<_>>())
        });
        group.bench_with_input(BenchmarkId::new("deformed", format!("{p}^{n}")), &inputs, |b, gs| {
            b.iter(|| gs.iter().map(|g| phi_pnt(black_box(g), n).unwrap()).collect::<Vec<_>>())
        });
    }
    group.finish();
}

fn orbital(c: &mut Criterion) {
    let mut group = c.benchmark_group("orbital");
    group.sample_size(10);
    let (p, n) = (3u64, 1u32);
    let ctx = LocalContext::new(p, 1, 6 * n + 14).unwrap();
    let inputs = orbital_inputs(&ctx, 8);
    group.bench_function("tree_walk", |b| {
        b.iter(|| inputs.iter().map(|g| orbital_ratio(black_box(g), n).unwrap()).collect::<Vec<_>>())
    });
    group.bench_function("branch_weights", |b| {
        b.iter(|| inputs.iter().map(|g| orbital_ratio_by_weights(black_box(g), n).unwrap()).collect::<Vec<_>>())
    });
    group.finish();
}

fn tower(c: &mut Criterion) {
    let mut group = c.benchmark_group("tower");
    group.sample_size(10);
    let n = 1;
    let ctx = hecke_context(2, 1, n).unwrap();
    let transversal = congruence_transversal(&ctx, n, n + 1).unwrap();
    let inputs = phi_inputs(&ctx, n, 8);
    group.bench_function("average_2^1", |b| {
        b.iter(|| inputs.iter().map(|g| tower_average(black_box(g), n, &transversal).unwrap()).collect::<Vec<_>>())
    });
    group.finish();
}

fn finite(c: &mut Criterion) {
    let mut group = c.benchmark_group("finite");
    group.sample_size(10);
    group.bench_function("norm_correspondence_2_2_1", |b| b.iter(|| NormCorrespondence::new(2, 2, 1).unwrap()));
    for q in [7u64, 9] {
        group.bench_with_input(BenchmarkId::new("census", q), &q, |b, &q| b.iter(|| Census::new(q).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, evaluation, orbital, tower, finite);
criterion_main!(benches);
