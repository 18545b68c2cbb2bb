//! Shared inputs for the criterion benches.

use dupaudit::synth::{self, PlantedSpec};
use dupaudit::Corpus;

/// Tweet-like corpus, lengths 40..=120 (mean about 80).
pub fn tweet_corpus(n: usize, seed: u64) -> Corpus {
    synth::tweet_like(seed, n, 40, 120)
}

/// Planted corpus of about `n` records with every kind of duplicate.
pub fn planted_corpus(n: usize, seed: u64) -> Corpus {
    let unit = n / 20;
    PlantedSpec {
        singletons: n - 10 * unit,
        exact_groups: 2 * unit,
        exact_group_size: 2,
        conflicting_groups: unit / 2,
        normalization_groups: unit,
        normalization_group_size: 2,
        near_groups: unit,
        near_group_size: 2,
        max_edits: 10,
        seed,
    }
    .build()
}

/// Pairs of base texts and edited copies, for kernel timing.
pub fn text_pairs(n: usize, edits: usize, seed: u64) -> Vec<(Vec<char>, Vec<char>)> {
    let mut rng = synth::rng(seed);
    (0..n)
        .map(|_| {
            let a = synth::base_text(&mut rng);
            let b = synth::perturb(&mut rng, &a, edits);
            (a.chars().collect(), b.chars().collect())
        })
        .collect()
}
