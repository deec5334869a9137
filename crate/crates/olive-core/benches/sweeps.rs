// SPDX-License-Identifier: Apache-2.0

//! Sequential against parallel execution of the main sweeps.
//!
//! Every sweep returns the same report under both modes; only wall time
//! differs. Without the `parallel` feature both rows run sequentially.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use olive_core::kgroup::conjugator::{toy_conjugator, Carrier};
use olive_core::kgroup::selftest::{check_associativity, check_associativity_printed};
use olive_core::kgroup::tiered::{toy_params, KParams};
use olive_core::kgroup::truncated::Truncated;
use olive_core::par::Exec;
use olive_core::relational::{check_class_olive, OliveSignature};
use olive_core::witness::sampling::sample_forbidden;
use olive_core::witness::{sweep, Evaluator};
use olive_core::{Ladder, PartialIso, SigmaVariant};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn witness_sweep(c: &mut Criterion) {
    let k2 = Truncated::k2(6, SigmaVariant::Repaired).unwrap();
    let ev = Evaluator::new(&k2, SigmaVariant::Repaired).unwrap();
    let mut g = c.benchmark_group("witness_sweep");
    g.sample_size(10);
    for lambda in [4, 5] {
        let ladders: Vec<Ladder> = (0..Ladder::count(lambda)).map(|i| Ladder::from_index(lambda, i)).collect();
        g.throughput(Throughput::Elements(ladders.len() as u64));
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, lambda), &ladders, |b, ls| {
                b.iter(|| black_box(sweep(&ev, lambda, "exhaustive", None, ls, exec).unwrap()))
            });
        }
    }
    g.finish();
}

fn associativity(c: &mut Criterion) {
    let full = KParams::new(6);
    let toy = Truncated::toy();
    let mut g = c.benchmark_group("associativity");
    g.sample_size(10);
    g.throughput(Throughput::Elements(2000));
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, "printed_m6"), |b| {
            b.iter(|| black_box(check_associativity_printed(&full, 2000, 0, exec)))
        });
        g.bench_function(BenchmarkId::new(name, "truncated_toy"), |b| {
            b.iter(|| black_box(check_associativity(&toy, 2000, 0, exec)))
        });
    }
    g.finish();
}

fn forbidden_sampling(c: &mut Criterion) {
    let mut g = c.benchmark_group("forbidden_sampling");
    g.sample_size(10);
    g.throughput(Throughput::Elements(10_000));
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| black_box(sample_forbidden(10_000, 0, SigmaVariant::Repaired, exec))));
    }
    g.finish();
}

fn conjugators(c: &mut Criterion) {
    let k2 = Truncated::k2(1, SigmaVariant::Repaired).unwrap();
    let carrier = Carrier::new(&k2, Exec::Parallel);
    let pi = PartialIso::new(vec![(0, 0), (1, 2), (2, 1)]).unwrap();
    let printed = toy_params();
    let printed_carrier = Carrier::new(&printed, Exec::Parallel);
    let mut g = c.benchmark_group("toy_conjugator");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, "truncated"), |b| {
            b.iter(|| black_box(toy_conjugator(&k2, &carrier, &pi, exec).unwrap().report))
        });
        g.bench_function(BenchmarkId::new(name, "printed"), |b| {
            b.iter(|| black_box(toy_conjugator(&printed, &printed_carrier, &pi, exec).map(|z| z.report).ok()))
        });
    }
    g.finish();
}

fn class_olive(c: &mut Criterion) {
    let sig = OliveSignature::default_test();
    let mut g = c.benchmark_group("class_olive");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, 5), |b| b.iter(|| black_box(check_class_olive(&sig, 5, exec).unwrap())));
    }
    g.finish();
}

criterion_group!(benches, witness_sweep, associativity, forbidden_sampling, conjugators, class_olive);
criterion_main!(benches);
