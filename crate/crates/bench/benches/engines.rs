use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use verso::eval::{eval_condensed, eval_flat};
use verso_bench::{plans, stores};

fn corpus(c: &mut Criterion) {
    let plans = plans();
    for (versions, steps) in [(5, 5), (20, 5)] {
        let (flat, condensed) = stores(versions, steps);
        let mut group = c.benchmark_group(format!("corpus/{versions}x{steps}"));
        for plan in &plans {
            group.bench_with_input(BenchmarkId::new("flat", plan.name), &plan.flat, |b, a| {
                b.iter(|| eval_flat(black_box(&flat), a).expect("evaluates"))
            });
            group.bench_with_input(BenchmarkId::new("condensed", plan.name), &plan.condensed, |b, a| {
                b.iter(|| eval_condensed(black_box(&condensed), a).expect("evaluates"))
            });
        }
        group.finish();
    }
}

criterion_group!(benches, corpus);
criterion_main!(benches);
