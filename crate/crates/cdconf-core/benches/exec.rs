use cdconf_core::normal::{self, ClassifyParams, CompactGrid};
use cdconf_core::suites::{self, SuiteConfig};
use cdconf_core::Exec;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

const STRATEGIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn classify(c: &mut Criterion) {
    let grid = CompactGrid::ball(2, 1.0, 243).unwrap();
    let family = normal::bounded_affine_family(2, 32, &mut ChaCha8Rng::seed_from_u64(3));
    let maps: Vec<_> = family.iter().map(|f| f.map()).collect();
    let params = ClassifyParams::default();
    let mut group = c.benchmark_group("classify_sequence");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |b| b.iter(|| normal::classify_sequence(black_box(&maps), &grid, &params, exec).unwrap()));
    }
    group.finish();
}

fn suite_runs(c: &mut Criterion) {
    let mut group = c.benchmark_group("suite");
    group.sample_size(10);
    for suite in ["thm23-argument-principle", "thm37-ball-automorphisms", "algebra-laws"] {
        for (name, exec) in STRATEGIES {
            let cfg = SuiteConfig { seed: 7, exec };
            group.bench_with_input(BenchmarkId::new(suite, name), &cfg, |b, cfg| b.iter(|| suites::run(suite, cfg).unwrap()));
        }
    }
    group.finish();
}

criterion_group!(benches, classify, suite_runs);
criterion_main!(benches);
