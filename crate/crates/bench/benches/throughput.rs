use chordstat_core::exact::{a_table, factorial_moment_d1, mean_b_exact};
use chordstat_core::game::play;
use chordstat_core::sampler::{sample_chord_diagram, sample_deal_insertion, sample_deal_shuffle};
use chordstat_core::urn::{char_poly, urn_simulate};
use chordstat_core::RngStream;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

fn sampling(c: &mut Criterion) {
    let mut g = c.benchmark_group("sampling");
    for n in [1_000usize, 10_000, 100_000] {
        g.throughput(Throughput::Elements(n as u64));
        g.bench_with_input(BenchmarkId::new("shuffle_and_play", n), &n, |b, &n| {
            let mut rng = RngStream::new(1, 0).rng();
            b.iter(|| play(&sample_deal_shuffle(n, &mut rng).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("insertion", n), &n, |b, &n| {
            let mut rng = RngStream::new(2, 0).rng();
            b.iter(|| sample_deal_insertion(n, &mut rng).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("random_matching", n), &n, |b, &n| {
            let mut rng = RngStream::new(3, 0).rng();
            b.iter(|| sample_chord_diagram(n, &mut rng).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("urn", n), &n, |b, &n| {
            let mut rng = RngStream::new(4, 0).rng();
            b.iter(|| urn_simulate(n as u64, &mut rng))
        });
    }
    g.finish();
}

fn exact(c: &mut Criterion) {
    let mut g = c.benchmark_group("exact");
    g.sample_size(10);
    for n in [100usize, 500] {
        g.bench_with_input(BenchmarkId::new("a_table", n), &n, |b, &n| {
            b.iter(|| a_table(black_box(n)).unwrap())
        });
    }
    g.bench_function("factorial_moment_r4_n300", |b| {
        b.iter(|| factorial_moment_d1(black_box(300), 4))
    });
    g.bench_function("mean_blocks_n1000", |b| {
        b.iter(|| (1..=10).map(|i| mean_b_exact(black_box(1000), i)).count())
    });
    g.bench_function("char_poly_30", |b| b.iter(|| char_poly(black_box(30)).unwrap()));
    g.finish();
}

criterion_group!(benches, sampling, exact);
criterion_main!(benches);
