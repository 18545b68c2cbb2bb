use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use dupaudit::{audit, find_near_duplicates, NearDupConfig, NormalizationConfig};
use dupaudit_bench::{planted_corpus, tweet_corpus};

fn scan(c: &mut Criterion) {
    let norm = NormalizationConfig::default();
    let mut group = c.benchmark_group("near_dup_scan");
    group.sample_size(10);
    for n in [2_000, 10_000] {
        let corpus = tweet_corpus(n, 7);
        group.throughput(Throughput::Elements(n as u64));
        for (name, config) in [
            ("absolute_20", NearDupConfig::absolute(20)),
            ("ratio_0.2", NearDupConfig::normalized_ratio(0.2).unwrap()),
        ] {
            group.bench_with_input(BenchmarkId::new(name, n), &corpus, |b, corpus| {
                b.iter(|| find_near_duplicates(corpus, &config, &norm).0.len())
            });
        }
    }
    group.finish();
}

fn full_audit(c: &mut Criterion) {
    let norm = NormalizationConfig::default();
    let corpus = planted_corpus(10_000, 3);
    let mut group = c.benchmark_group("audit");
    group.sample_size(10);
    group.throughput(Throughput::Elements(corpus.len() as u64));
    group.bench_function("planted_10k", |b| {
        b.iter(|| audit(&corpus, &norm, &NearDupConfig::default()).n_distinct_after_neardup)
    });
    group.finish();
}

criterion_group!(benches, scan, full_audit);
criterion_main!(benches);
