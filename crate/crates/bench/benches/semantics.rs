use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sonet_core::bsa::validate_bsa;
use sonet_core::csa::csa_is_well_formed;
use sonet_core::fixtures;
use sonet_core::scenarios::enumerate_scenarios;
use sonet_core::semantics::{behaviours, reachable_markings};
use sonet_core::wellformed::is_well_formed;
use sonet_core::{AcyclicNet, BehaviourKind, BehaviourQuery, Limits, RawNet};

/// `n` independent lines of `len` transitions each.
fn lines(n: usize, len: usize) -> AcyclicNet {
    let mut raw = RawNet::default();
    for i in 0..n {
        for j in 0..=len {
            raw.places.push(format!("p{i}_{j}"));
        }
        for j in 0..len {
            let t = format!("t{i}_{j}");
            raw.arcs.push((format!("p{i}_{j}"), t.clone()));
            raw.arcs.push((t.clone(), format!("p{i}_{}", j + 1)));
            raw.transitions.push(t);
        }
    }
    raw.validate().unwrap()
}

fn fixtures_bench(c: &mut Criterion) {
    let bd1 = fixtures::bd1();
    let cs1 = fixtures::cs1();
    let bsa0 = fixtures::bsa0();
    let mut g = c.benchmark_group("fixtures");
    g.bench_function("bd1 sseq", |b| b.iter(|| behaviours(black_box(&bd1), BehaviourQuery::new(BehaviourKind::Sseq))));
    g.bench_function("cs1 maxsseq", |b| b.iter(|| behaviours(black_box(&cs1), BehaviourQuery::new(BehaviourKind::Maxsseq))));
    g.bench_function("bsa0 reach", |b| b.iter(|| reachable_markings(black_box(&bsa0), Limits::default())));
    g.bench_function("bsa0 phases", |b| {
        let raw = fixtures::bsa0_raw();
        b.iter(|| validate_bsa(black_box(&raw)))
    });
    g.bench_function("w1 well-formedness", |b| b.iter(|| is_well_formed(black_box(&fixtures::w1()), Limits::default())));
    g.bench_function("cs1 well-formedness", |b| b.iter(|| csa_is_well_formed(black_box(&cs1), Limits::default())));
    g.bench_function("an1 scenarios", |b| b.iter(|| enumerate_scenarios(black_box(&fixtures::an1()), Limits::default())));
    g.finish();
}

fn scaling(c: &mut Criterion) {
    let mut g = c.benchmark_group("independent lines");
    for n in [2, 3, 4] {
        let net = lines(n, 2);
        g.bench_with_input(BenchmarkId::new("reach", n), &net, |b, net| b.iter(|| reachable_markings(net, Limits::default())));
        g.bench_with_input(BenchmarkId::new("sseq", n), &net, |b, net| {
            b.iter(|| behaviours(net, BehaviourQuery::new(BehaviourKind::Sseq)))
        });
        g.bench_with_input(BenchmarkId::new("well-formedness", n), &net, |b, net| b.iter(|| is_well_formed(net, Limits::default())));
    }
    g.finish();
}

criterion_group!(benches, fixtures_bench, scaling);
criterion_main!(benches);
