//! Parallel vs sequential throughput on the two data-parallel hot paths:
//! episode generation and beam evaluation. Run with the default features to
//! get both sides; the parallel path degenerates to the sequential one when
//! the `parallel` feature is off.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use lasynth_core::datagen::{generate_split, generate_split_seq, GenConfig};
use lasynth_core::engine::{evaluate, evaluate_seq, EvalConfig};
use lasynth_core::model::{ModelConfig, ModelParams};

fn bench_generation(c: &mut Criterion) {
    let mut group = c.benchmark_group("generate_200_episodes");
    group.sample_size(10);
    let cfg = GenConfig::desk(11);
    group.bench_function("parallel", |b| {
        b.iter(|| generate_split(&cfg, 0x11, 200).unwrap());
    });
    group.bench_function("sequential", |b| {
        b.iter(|| generate_split_seq(&cfg, 0x11, 200).unwrap());
    });
    group.finish();
}

fn bench_evaluation(c: &mut Criterion) {
    let mut group = c.benchmark_group("evaluate_16_episodes_beam4");
    group.sample_size(10);
    let gcfg = GenConfig::tiny(3, 16);
    let episodes = generate_split(&gcfg, 0x11, 16).unwrap();
    let vocab = gcfg.vocab();
    let mp: ModelParams<f32> = ModelParams::init(ModelConfig::desk(vocab.len()), 1);
    let ecfg = EvalConfig { beam: 4, bucket_width: 16 };
    group.bench_function("parallel", |b| {
        b.iter_batched(
            || (),
            |_| evaluate(&mp, &episodes, &gcfg, &ecfg),
            BatchSize::PerIteration,
        );
    });
    group.bench_function("sequential", |b| {
        b.iter_batched(
            || (),
            |_| evaluate_seq(&mp, &episodes, &gcfg, &ecfg),
            BatchSize::PerIteration,
        );
    });
    group.finish();
}

criterion_group!(benches, bench_generation, bench_evaluation);
criterion_main!(benches);
