//! Seeded synthetic corpora with planted duplicate structure, for tests,
//! benchmarks and demos.
//!
//! Base texts are lowercase words over `a-z` separated by single spaces, at
//! least 60 characters long, so two independent bases sit far beyond any
//! distance threshold of 20. Near-duplicate variants only edit letters inside
//! words, which keeps whitespace (and therefore normalization) unchanged.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::record::{Corpus, Language, Record};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn below(rng: &mut ChaCha8Rng, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

fn letter(rng: &mut ChaCha8Rng) -> char {
    (b'a' + below(rng, 26) as u8) as char
}

/// Words of 2..=8 random letters until at least `min_len` characters.
pub fn random_words(rng: &mut ChaCha8Rng, min_len: usize) -> String {
    let mut out = String::new();
    while out.len() < min_len {
        if !out.is_empty() {
            out.push(' ');
        }
        for _ in 0..2 + below(rng, 7) {
            out.push(letter(rng));
        }
    }
    out
}

/// A base text of 60..=100 characters.
pub fn base_text(rng: &mut ChaCha8Rng) -> String {
    let len = 60 + below(rng, 41);
    random_words(rng, len)
}

/// Applies exactly `edits` letter-level edits (substitute, insert after a
/// letter, delete from a word of two or more letters). The result is within
/// `edits` of the input and has the same whitespace layout.
pub fn perturb(rng: &mut ChaCha8Rng, text: &str, edits: usize) -> String {
    let mut chars: Vec<char> = text.chars().collect();
    for _ in 0..edits {
        let letters: Vec<usize> = (0..chars.len()).filter(|&i| chars[i] != ' ').collect();
        let at = letters[below(rng, letters.len())];
        match below(rng, 3) {
            0 => {
                let mut c = letter(rng);
                while c == chars[at] {
                    c = letter(rng);
                }
                chars[at] = c;
            }
            1 => chars.insert(at + 1, letter(rng)),
            _ => {
                let word_len_ok = (at > 0 && chars[at - 1] != ' ')
                    || (at + 1 < chars.len() && chars[at + 1] != ' ');
                if word_len_ok {
                    chars.remove(at);
                } else {
                    chars[at] = if chars[at] == 'z' { 'y' } else { 'z' };
                }
            }
        }
    }
    chars.into_iter().collect()
}

/// Shape of a planted corpus.
#[derive(Debug, Clone)]
pub struct PlantedSpec {
    pub singletons: usize,
    /// Groups of byte-identical texts.
    pub exact_groups: usize,
    pub exact_group_size: usize,
    /// How many exact groups carry two distinct labels.
    pub conflicting_groups: usize,
    /// Groups whose texts differ only in mentions, URLs and letter case.
    pub normalization_groups: usize,
    pub normalization_group_size: usize,
    /// Groups of distinct texts, each within `max_edits` of a shared base,
    /// hence pairwise within `2 * max_edits`.
    pub near_groups: usize,
    pub near_group_size: usize,
    pub max_edits: usize,
    pub seed: u64,
}

impl Default for PlantedSpec {
    fn default() -> Self {
        PlantedSpec {
            singletons: 100,
            exact_groups: 10,
            exact_group_size: 2,
            conflicting_groups: 3,
            normalization_groups: 10,
            normalization_group_size: 3,
            near_groups: 10,
            near_group_size: 3,
            max_edits: 10,
            seed: 0,
        }
    }
}

/// Counts implied by a [`PlantedSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlantedCounts {
    pub n_posts: usize,
    pub n_distinct_raw: usize,
    pub n_distinct_normalized: usize,
    pub n_distinct_after_neardup: usize,
    pub n_conflicting_clusters: usize,
    /// Records removed by keep-one-consistent/drop-conflicting resolution.
    pub n_conflict_resolution_removed: usize,
}

impl PlantedSpec {
    pub fn expected(&self) -> PlantedCounts {
        let exact = self.exact_groups * self.exact_group_size;
        let norm = self.normalization_groups * self.normalization_group_size;
        let near = self.near_groups * self.near_group_size;
        let consistent_exact = self.exact_groups - self.conflicting_groups;
        PlantedCounts {
            n_posts: self.singletons + exact + norm + near,
            n_distinct_raw: self.singletons + self.exact_groups + norm + near,
            n_distinct_normalized: self.singletons + self.exact_groups + self.normalization_groups + near,
            n_distinct_after_neardup: self.singletons
                + self.exact_groups
                + self.normalization_groups
                + self.near_groups,
            n_conflicting_clusters: self.conflicting_groups,
            n_conflict_resolution_removed: self.conflicting_groups * self.exact_group_size
                + consistent_exact * (self.exact_group_size - 1)
                + self.normalization_groups * (self.normalization_group_size - 1),
        }
    }

    /// Builds the corpus; records are shuffled and get ids `p0`, `p1`, ...
    pub fn build(&self) -> Corpus {
        assert!(self.conflicting_groups <= self.exact_groups);
        assert!(self.exact_group_size >= 2 || self.exact_groups == 0);
        assert!(self.max_edits >= 1 || self.near_groups == 0);
        let mut rng = rng(self.seed);
        let mut items: Vec<(String, String)> = Vec::with_capacity(self.expected().n_posts);

        for _ in 0..self.singletons {
            items.push((base_text(&mut rng), "neutral".into()));
        }
        for g in 0..self.exact_groups {
            let text = base_text(&mut rng);
            for m in 0..self.exact_group_size {
                let label = if g < self.conflicting_groups && m % 2 == 1 { "against" } else { "favor" };
                items.push((text.clone(), label.into()));
            }
        }
        for _ in 0..self.normalization_groups {
            let base = base_text(&mut rng);
            for m in 0..self.normalization_group_size {
                let text = match m % 3 {
                    0 => format!("@user{} {base} www.x{}.com", below(&mut rng, 1_000_000), below(&mut rng, 1000)),
                    1 => format!("@{}_x {base} https://t.co/{}", letter(&mut rng), below(&mut rng, 1_000_000)),
                    _ => format!("@USER {} URL", capitalize(&base)),
                };
                // Any repeat would be an exact duplicate, not a normalization one.
                let text = format!("{text}{}", " ".repeat(m / 3));
                items.push((text, "favor".into()));
            }
        }
        for _ in 0..self.near_groups {
            let base = base_text(&mut rng);
            let mut variants: Vec<String> = Vec::new();
            while variants.len() < self.near_group_size {
                let edits = 1 + below(&mut rng, self.max_edits);
                let v = perturb(&mut rng, &base, edits);
                if !variants.contains(&v) {
                    variants.push(v);
                }
            }
            items.extend(variants.into_iter().map(|v| (v, "favor".to_string())));
        }

        shuffle(&mut rng, &mut items);
        let records = items
            .into_iter()
            .enumerate()
            .map(|(i, (text, label))| Record::new(format!("p{i}"), text).with_label(label))
            .collect();
        Corpus::new(records, Language::EnglishLike, format!("planted-{}", self.seed))
            .expect("synthetic ids are unique")
    }
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

pub fn shuffle<T>(rng: &mut ChaCha8Rng, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = below(rng, i + 1);
        items.swap(i, j);
    }
}

/// Tweet-like texts with lengths uniform in `min_len..=max_len`.
pub fn tweet_like(seed: u64, n: usize, min_len: usize, max_len: usize) -> Corpus {
    let mut rng = rng(seed);
    let vocab: Vec<String> = (0..5000)
        .map(|_| (0..2 + below(&mut rng, 8)).map(|_| letter(&mut rng)).collect())
        .collect();
    let records = (0..n)
        .map(|i| {
            let target = min_len + below(&mut rng, max_len - min_len + 1);
            let mut text = String::new();
            while text.len() < target {
                if !text.is_empty() {
                    text.push(' ');
                }
                text.push_str(&vocab[below(&mut rng, vocab.len())]);
            }
            text.truncate(target);
            Record::new(i.to_string(), text.trim_end())
        })
        .collect();
    Corpus::new(records, Language::EnglishLike, format!("tweet-like-{seed}"))
        .expect("synthetic ids are unique")
}
