use criterion::{criterion_group, criterion_main, Criterion};
use dupaudit::near_dup::{bounded_levenshtein_chars, levenshtein_chars, MyersPattern};
use dupaudit_bench::text_pairs;

fn kernels(c: &mut Criterion) {
    let close = text_pairs(256, 5, 1);
    let far: Vec<_> = close
        .iter()
        .zip(close.iter().skip(1))
        .map(|((a, _), (b, _))| (a.clone(), b.clone()))
        .collect();
    let mut group = c.benchmark_group("distance");
    for (name, pairs) in [("close", &close), ("far", &far)] {
        group.bench_function(format!("full_dp/{name}"), |bench| {
            bench.iter(|| pairs.iter().map(|(a, b)| levenshtein_chars(a, b)).sum::<usize>())
        });
        group.bench_function(format!("banded_20/{name}"), |bench| {
            bench.iter(|| {
                pairs
                    .iter()
                    .filter(|(a, b)| bounded_levenshtein_chars(a, b, 20).is_within())
                    .count()
            })
        });
        group.bench_function(format!("bit_parallel_20/{name}"), |bench| {
            bench.iter(|| {
                pairs
                    .iter()
                    .filter(|(a, b)| MyersPattern::new(a).bounded(b, 20).is_within())
                    .count()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
