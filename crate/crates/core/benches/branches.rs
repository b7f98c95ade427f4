use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ctsim::circuit::{enumerate_branches_with, SimOptions};
use ctsim::protocols::{build_ct_controlled, NetworkSpec};
use ctsim::verify::sweep;
use ctsim::Dim;

fn modes() -> [(&'static str, SimOptions); 2] {
    let cap = 5u128.pow(6);
    [("parallel", SimOptions::with_cap(cap)), ("sequential", SimOptions { parallel: false, ..SimOptions::with_cap(cap) })]
}

fn enumerate(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_branches");
    group.sample_size(10);
    for (d, n) in [(3u32, 2usize), (5, 1), (5, 2)] {
        let spec = NetworkSpec::random(Dim::new(d).unwrap(), n, 0).unwrap();
        let circuit = build_ct_controlled(&spec).unwrap();
        for (name, opts) in modes() {
            group.bench_with_input(BenchmarkId::new(name, format!("d{d}_n{n}")), &circuit, |b, c| {
                b.iter(|| enumerate_branches_with(c, &opts).unwrap())
            });
        }
    }
    group.finish();
}

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for (name, opts) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| sweep("ct-controlled", &[2, 3], &[1, 2], &[0, 1, 2, 3], 1e-9, &opts))
        });
    }
    group.finish();
}

criterion_group!(benches, enumerate, sweeps);
criterion_main!(benches);
