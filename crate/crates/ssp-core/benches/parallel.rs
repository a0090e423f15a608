//! Parallel-vs-sequential benches for the data-parallel kernels.
//!
//! Each group pits the rayon-backed `par::map` path against the always
//! sequential `par::map_seq` twin on the same workload. Built without the
//! `parallel` feature, both sides run sequentially, which makes the fallback
//! cost visible in the same report.
//!
//! Run with `cargo bench -p ssp-core`.

use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ssp_core::backends::fake::{
    FakeImageFeatureExtractor, FakeImageGenerator, FakeLlmClient, FakeTextEncoder,
    LexiconToxicityScorer, ScriptedAlignmentOracle,
};
use ssp_core::backends::retry::RetryPolicy;
use ssp_core::backends::{Backends, TextEncoder};
use ssp_core::corpus::{PromptRecord, Source};
use ssp_core::linalg::Mat;
use ssp_core::metrics::{fit_gaussian, frechet_distance, prompt_consistency, GaussianSummary};
use ssp_core::par;
use ssp_core::pipeline::{run_pipeline, PipelineConfig, PromptSource};

fn synthetic_prompts(n: usize, seed: u64) -> Vec<String> {
    let words = [
        "portrait", "landscape", "river", "market", "evening", "window", "harbor", "forest",
        "bridge", "garden", "mountain", "street", "morning", "subject", "texture", "shadow",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let len = rng.random_range(8..16);
            let mut text = format!("prompt {i}");
            for _ in 0..len {
                text.push(' ');
                text.push_str(words[rng.random_range(0..words.len())]);
            }
            text
        })
        .collect()
}

fn bench_encode_batch(c: &mut Criterion) {
    let encoder = FakeTextEncoder::new(256, 42);
    let texts = synthetic_prompts(2000, 1);
    let mut group = c.benchmark_group("encode_batch_2000");
    group.bench_function("seq", |b| {
        b.iter(|| {
            let rows = par::map_seq(&texts, |t| {
                encoder.encode_texts(std::slice::from_ref(t)).unwrap()
            });
            black_box(rows.len())
        })
    });
    group.bench_function("par", |b| {
        b.iter(|| {
            let rows = par::map(&texts, |t| {
                encoder.encode_texts(std::slice::from_ref(t)).unwrap()
            });
            black_box(rows.len())
        })
    });
    group.finish();
}

fn bench_prompt_consistency(c: &mut Criterion) {
    let encoder = FakeTextEncoder::new(256, 42);
    let originals = synthetic_prompts(500, 2);
    let pairs: Vec<(String, String)> = originals
        .into_iter()
        .map(|o| {
            let optimized = format!("{o}, shot on Sony A7R IV");
            (o, optimized)
        })
        .collect();
    let mut group = c.benchmark_group("prompt_consistency_500");
    group.bench_function("seq", |b| {
        b.iter(|| {
            let scores = par::map_seq(&pairs, |(o, p)| prompt_consistency(&encoder, o, p).unwrap());
            black_box(scores.iter().sum::<f64>())
        })
    });
    group.bench_function("par", |b| {
        b.iter(|| {
            let scores = par::map(&pairs, |(o, p)| prompt_consistency(&encoder, o, p).unwrap());
            black_box(scores.iter().sum::<f64>())
        })
    });
    group.finish();
}

fn random_summary(rng: &mut ChaCha8Rng, d: usize) -> GaussianSummary {
    let rows: Vec<Vec<f64>> = (0..3 * d)
        .map(|_| (0..d).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect())
        .collect();
    fit_gaussian(&Mat::from_rows(&rows).unwrap()).unwrap()
}

fn bench_frechet_batch(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pairs: Vec<(GaussianSummary, GaussianSummary)> = (0..200)
        .map(|_| (random_summary(&mut rng, 16), random_summary(&mut rng, 16)))
        .collect();
    let mut group = c.benchmark_group("frechet_batch_200x16d");
    group.bench_function("seq", |b| {
        b.iter(|| {
            let out = par::map_seq(&pairs, |(a, b)| frechet_distance(a, b).unwrap());
            black_box(out.iter().sum::<f64>())
        })
    });
    group.bench_function("par", |b| {
        b.iter(|| {
            let out = par::map(&pairs, |(a, b)| frechet_distance(a, b).unwrap());
            black_box(out.iter().sum::<f64>())
        })
    });
    group.finish();
}

fn bench_pipeline(c: &mut Criterion) {
    let dir = tempfile::tempdir().unwrap();
    let dim = 128;
    let backends = Backends {
        text_encoder: Arc::new(FakeTextEncoder::new(dim, 42)),
        generator: Arc::new(FakeImageGenerator::new(42, dim, dir.path())),
        oracle: Arc::new(ScriptedAlignmentOracle::default()),
        llm: Arc::new(FakeLlmClient::default()),
        toxicity: Arc::new(LexiconToxicityScorer::default()),
        image_features: Arc::new(FakeImageFeatureExtractor::new(dir.path(), dim)),
        retry: RetryPolicy::no_delay(3),
    };
    let records: Vec<PromptRecord> = synthetic_prompts(100, 4)
        .into_iter()
        .enumerate()
        .map(|(i, text)| {
            let mut r = PromptRecord::new(format!("b{i:03}"), Source::User, text);
            r.set_optimized("shot on Sony A7R IV", ", ");
            r
        })
        .collect();

    let mut group = c.benchmark_group("pipeline_100_prompts");
    group.sample_size(10);
    for (name, workers) in [("workers_1", 1usize), ("workers_4", 4)] {
        group.bench_function(name, |b| {
            b.iter(|| {
                let out = run_pipeline(
                    &records,
                    PromptSource::Stored,
                    &backends,
                    &PipelineConfig {
                        worker_count: workers,
                        ..Default::default()
                    },
                    None,
                )
                .unwrap();
                black_box(out.results.len())
            })
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_encode_batch,
    bench_prompt_consistency,
    bench_frechet_batch,
    bench_pipeline
);
criterion_main!(benches);
