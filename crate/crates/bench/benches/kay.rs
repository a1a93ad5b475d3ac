use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kaylab::class::{enumerate_class, Family};
use kaylab::kay::{kay_edges, parity_violation, reconstruct_edges};
use kaylab::subsets::binomial;
use kaylab::EdgeSet;

fn kay_images(c: &mut Criterion) {
    let mut group = c.benchmark_group("kay_edges");
    for (k, n) in [(2, 6), (3, 6), (3, 7)] {
        let slots = binomial(n, k);
        let codes: Vec<u64> = (0..256u64).map(|i| i.wrapping_mul(0x9e37_79b9_7f4a_7c15) & ((1 << slots) - 1)).collect();
        group.bench_with_input(BenchmarkId::from_parameter(format!("k{k}_n{n}")), &codes, |b, codes| {
            b.iter(|| {
                for &code in codes {
                    black_box(kay_edges(&EdgeSet::from_code(n, k, code)));
                }
            })
        });
    }
    group.finish();
}

fn parity_and_reconstruct(c: &mut Criterion) {
    let images: Vec<EdgeSet> = (0..256u64).map(|code| kay_edges(&EdgeSet::from_code(7, 3, code * 0x1_0001))).collect();
    c.bench_function("parity_violation_k3_n7", |b| {
        b.iter(|| images.iter().filter(|s| parity_violation(s).is_none()).count())
    });
    c.bench_function("reconstruct_k3_n7", |b| {
        b.iter(|| {
            for s in &images {
                black_box(reconstruct_edges(s, 0).unwrap());
            }
        })
    });
}

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_class");
    group.sample_size(10);
    group.bench_function("graphs_n6", |b| b.iter(|| enumerate_class(Family::Hypergraphs, 2, 6, 1 << 24).unwrap().len()));
    group.bench_function("tournaments_n5", |b| b.iter(|| enumerate_class(Family::Tournaments, 0, 5, 1 << 24).unwrap().len()));
    group.bench_function("two_graphs_n7", |b| b.iter(|| enumerate_class(Family::Kay, 2, 7, 1 << 24).unwrap().len()));
    group.finish();
}

criterion_group!(benches, kay_images, parity_and_reconstruct, enumeration);
criterion_main!(benches);
