use criterion::{criterion_group, criterion_main, Criterion};
use genlimit::replay_metrics;
use genlimit_bench::{scenario, GREEDY_GAME, SBG_GAME};
use std::hint::black_box;

fn games(c: &mut Criterion) {
    let mut g = c.benchmark_group("game");
    g.sample_size(10);
    let sbg = scenario(SBG_GAME);
    g.bench_function("sbg_1e5", |b| b.iter(|| black_box(sbg.run().unwrap())));
    let greedy = scenario(GREEDY_GAME);
    g.bench_function("greedy_1e5", |b| b.iter(|| black_box(greedy.run().unwrap())));
    let trace = sbg.run().unwrap().trace;
    g.bench_function("replay_metrics_1e5", |b| {
        b.iter(|| black_box(replay_metrics(&trace, sbg.target.as_ref(), &sbg.deadline, &sbg.checkpoints).unwrap()))
    });
    g.finish();
}

criterion_group!(benches, games);
criterion_main!(benches);
