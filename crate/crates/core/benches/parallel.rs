//! Parallel library paths against a plain sequential loop over the same work.
//! Build with `--no-default-features` to bench the library's own sequential
//! fallback instead.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use interchange_lab::exact::kernel::{evolve_distribution, DEFAULT_KERNEL_TOL};
use interchange_lab::exact::{build_generator, tv, worst_case_d};
use interchange_lab::generators;
use interchange_lab::model::{LabeledConfig, DEFAULT_STATE_BUDGET};
use interchange_lab::par;
use interchange_lab::sim::{estimate_probj, RingSampler, RngSpec};
use interchange_lab::ProcessSpec;

fn distance(c: &mut Criterion) {
    let c8 = generators::cycle(8).unwrap();
    let gen = build_generator(&ProcessSpec::ip(3, &c8).unwrap(), DEFAULT_STATE_BUDGET).unwrap();
    let pi = vec![1.0 / gen.dim() as f64; gen.dim()];
    let t = 1.5;
    let mut group = c.benchmark_group(format!("worst_case_d IP(3) C8, parallel build = {}", par::is_parallel()));
    group.sample_size(20);
    group.bench_function("library", |b| b.iter(|| worst_case_d(&gen, black_box(t)).unwrap()));
    group.bench_function("sequential loop", |b| {
        b.iter(|| {
            (0..gen.dim())
                .map(|a| {
                    let mut e = vec![0.0; gen.dim()];
                    e[a] = 1.0;
                    tv(&evolve_distribution(gen.rates(), &e, black_box(t), DEFAULT_KERNEL_TOL), &pi)
                })
                .fold(0.0, f64::max)
        })
    });
    group.finish();
}

fn replicas(c: &mut Criterion) {
    let k6 = generators::complete(6).unwrap();
    let start = LabeledConfig(vec![0, 1, 2]);
    let rng = RngSpec::new(1, 0);
    let (s, n) = (0.5, 10_000);
    let mut group = c.benchmark_group(format!("probJ 1e4 replicas K6, parallel build = {}", par::is_parallel()));
    group.sample_size(20);
    group.bench_function("library", |b| b.iter(|| estimate_probj(&k6, &start, black_box(s), n, rng).unwrap()));
    group.bench_function("sequential loop", |b| {
        let sampler = RingSampler::new(&k6);
        b.iter(|| {
            let mut hits = 0usize;
            for r in 0..n {
                let mut pos = start.positions().to_vec();
                let mut clean = true;
                for ring in sampler.rings(rng.replica(r as u64), 2.0 * black_box(s)) {
                    if ring.t > s && sampler.holds_both(&ring, pos[2], pos[0]) | sampler.holds_both(&ring, pos[2], pos[1]) {
                        clean = false;
                        break;
                    }
                    sampler.apply(&ring, &mut pos);
                }
                hits += clean as usize;
            }
            hits
        })
    });
    group.finish();
}

criterion_group!(benches, distance, replicas);
criterion_main!(benches);
