use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use plgb_bench::Inputs;
use plgb_core::{datasets, run_checks, CheckOptions};

fn arithmetic(c: &mut Criterion) {
    let g = datasets::su2_selfaction().unwrap();
    let m = g.manifold();
    let inputs = Inputs::new(m, 1, 4, 8);
    let f = &inputs.functions;
    c.bench_function("su2 product normal form", |b| b.iter(|| &(&f[0] * &f[1]) * &f[2]));
    c.bench_function("su2 bracket", |b| b.iter(|| m.bracket(&f[3], &f[4])));
    c.bench_function("su2 differential", |b| b.iter(|| m.d(&f[5])));
}

fn connection(c: &mut Criterion) {
    let g = datasets::su2_selfaction().unwrap();
    let m = g.manifold();
    let inputs = Inputs::new(m, 2, 2, 3);
    let w = &inputs.forms;
    c.bench_function("su2 nabla", |b| b.iter(|| m.nabla(&w[0], &w[1]).unwrap()));
    c.bench_function("su2 schouten", |b| b.iter(|| m.schouten(&w[0], &w[1])));
    c.bench_function("su2 curvature", |b| b.iter(|| m.curvature(&w[0], &w[1], &w[2]).unwrap()));
}

fn pipelines(c: &mut Criterion) {
    let mut group = c.benchmark_group("pipelines");
    group.sample_size(10);
    let hopf = datasets::su2_hopf().unwrap();
    group.bench_function("hopf induce base", |b| b.iter(|| hopf.induce_base().unwrap()));
    let s1 = datasets::s1_group().unwrap();
    group.bench_function("s1 all checks", |b| {
        b.iter_batched(CheckOptions::default, |o| run_checks(&s1, &o).unwrap(), BatchSize::SmallInput)
    });
    group.bench_function("load su2 spec", |b| b.iter(|| datasets::su2_selfaction().unwrap()));
    group.finish();
}

criterion_group!(benches, arithmetic, connection, pipelines);
criterion_main!(benches);
