//! Length-sorted key index shared by self-joins and train/test probes.
//!
//! A pair is evaluated only if every lossless filter passes:
//! * length gap `|len_a - len_b|` at most the pair's bound `k`;
//! * character-histogram bound: with counts over 32 buckets, at least
//!   `max(Σ(a-b)⁺, Σ(b-a)⁺)` edits are needed, since each edit lowers each
//!   sum by at most one;
//! * bigram bound: an edit changes at most four bigram counts, so
//!   `L1(bigrams) + |#bigrams_a - #bigrams_b| <= 4k`. Hashing bigrams into
//!   buckets and saturating counts only shrink the L1 term, and so does
//!   replacing counts by bucket occupancy bits (checked first, it is cheap).
//!
//! Keys are stored in (length, position) order so candidate scans walk
//! memory sequentially.

use rayon::prelude::*;

use super::distance::MyersPattern;
use super::NearDupConfig;

const BUCKETS: usize = 32;
const BIGRAM_BUCKETS: usize = 256;

#[inline]
fn bucket(c: char) -> usize {
    match c {
        'a'..='z' => c as usize - 'a' as usize,
        '0'..='9' => 26,
        ' ' => 27,
        _ => 28 + (c as usize & 3),
    }
}

#[inline]
fn bigram_bucket(a: char, b: char) -> usize {
    let h = (a as u32).wrapping_mul(0x9E37_79B1) ^ (b as u32);
    (h.wrapping_mul(0x85EB_CA6B) >> 24) as usize
}

#[derive(Debug, Clone)]
pub(crate) struct PreparedKey {
    pub chars: Vec<char>,
    hist: [u8; BUCKETS],
    bigrams: Box<[u8; BIGRAM_BUCKETS]>,
    /// Occupied bigram buckets.
    bigram_set: [u64; BIGRAM_BUCKETS / 64],
}

impl PreparedKey {
    pub fn new(key: &str) -> Self {
        let chars: Vec<char> = key.chars().collect();
        let mut hist = [0u8; BUCKETS];
        for &c in &chars {
            let slot = &mut hist[bucket(c)];
            *slot = slot.saturating_add(1);
        }
        let mut bigrams = Box::new([0u8; BIGRAM_BUCKETS]);
        let mut bigram_set = [0u64; BIGRAM_BUCKETS / 64];
        for w in chars.windows(2) {
            let b = bigram_bucket(w[0], w[1]);
            bigrams[b] = bigrams[b].saturating_add(1);
            bigram_set[b / 64] |= 1 << (b % 64);
        }
        PreparedKey {
            chars,
            hist,
            bigrams,
            bigram_set,
        }
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    /// Lower bound on the edit distance to `other`. Saturated counts keep the
    /// bound valid because saturation never widens a difference.
    #[inline]
    pub fn histogram_bound(&self, other: &PreparedKey) -> usize {
        let mut surplus = 0u32;
        let mut deficit = 0u32;
        for i in 0..BUCKETS {
            let (x, y) = (self.hist[i], other.hist[i]);
            surplus += u32::from(x.saturating_sub(y));
            deficit += u32::from(y.saturating_sub(x));
        }
        surplus.max(deficit) as usize
    }

    /// `L1(bigrams) + |#bigrams difference|`; at most `4 * distance`.
    #[inline]
    pub fn bigram_excess(&self, other: &PreparedKey) -> usize {
        let l1: u32 = self
            .bigrams
            .iter()
            .zip(other.bigrams.iter())
            .map(|(&x, &y)| u32::from(x.abs_diff(y)))
            .sum();
        let count = |k: &PreparedKey| k.len().saturating_sub(1);
        l1 as usize + count(self).abs_diff(count(other))
    }

    /// Occupancy differences; never more than the bucket L1.
    #[inline]
    fn bigram_set_excess(&self, other: &PreparedKey) -> usize {
        let differing: u32 = self
            .bigram_set
            .iter()
            .zip(&other.bigram_set)
            .map(|(x, y)| (x ^ y).count_ones())
            .sum();
        let count = |k: &PreparedKey| k.len().saturating_sub(1);
        differing as usize + count(self).abs_diff(count(other))
    }

    /// Whether the filters leave `distance <= bound` possible.
    #[inline]
    pub fn may_be_within(&self, other: &PreparedKey, bound: usize) -> bool {
        self.bigram_set_excess(other) <= 4 * bound
            && self.histogram_bound(other) <= bound
            && self.bigram_excess(other) <= 4 * bound
    }
}

/// Keys in (length, corpus position) order.
#[derive(Debug, Clone)]
pub(crate) struct KeyIndex {
    sorted: Vec<PreparedKey>,
    /// Corpus position of each rank.
    order: Vec<usize>,
}

impl KeyIndex {
    pub fn new(keys: &[String]) -> Self {
        let lens: Vec<usize> = keys.iter().map(|k| k.chars().count()).collect();
        let mut order: Vec<usize> = (0..keys.len()).collect();
        order.sort_by_key(|&i| (lens[i], i));
        let sorted = order.par_iter().map(|&i| PreparedKey::new(&keys[i])).collect();
        KeyIndex { sorted, order }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn order_at(&self, rank: usize) -> usize {
        self.order[rank]
    }

    /// Later ranks within the length gap of `rank`.
    fn later_ranks(&self, rank: usize, config: &NearDupConfig) -> std::ops::Range<usize> {
        let len_a = self.sorted[rank].len();
        let end = rank
            + 1
            + self.sorted[rank + 1..]
                .iter()
                .take_while(|k| k.len() - len_a <= config.pair_bound(len_a, k.len()))
                .count();
        rank + 1..end
    }

    /// Candidate positions `b` for the key at `order[rank]`, restricted to
    /// later ranks; every unordered pair is produced once.
    pub fn self_candidates<'a>(
        &'a self,
        rank: usize,
        config: &'a NearDupConfig,
    ) -> impl Iterator<Item = usize> + 'a {
        self.later_ranks(rank, config).map(move |r| self.order[r])
    }

    /// Ranks whose length is compatible with an outside key of length `len_q`.
    fn probe_ranks(&self, len_q: usize, config: &NearDupConfig) -> impl Iterator<Item = usize> + '_ {
        let min_len = len_q.saturating_sub(config.shorter_gap(len_q));
        let start = self.sorted.partition_point(|k| k.len() < min_len);
        let config = *config;
        (start..self.len())
            .take_while(move |&r| {
                let len_b = self.sorted[r].len();
                len_b <= len_q || len_b - len_q <= config.pair_bound(len_q, len_b)
            })
            .filter(move |&r| {
                let len_b = self.sorted[r].len();
                len_q.abs_diff(len_b) <= config.pair_bound(len_q, len_b)
            })
    }

    /// All position pairs `(a, b, distance)` with `a < b` within their bound,
    /// sorted by `(a, b)`.
    pub fn self_join(&self, config: &NearDupConfig) -> Vec<(usize, usize, usize)> {
        let mut pairs: Vec<(usize, usize, usize)> = (0..self.len())
            .into_par_iter()
            .flat_map_iter(|rank| {
                let key_a = &self.sorted[rank];
                let a = self.order[rank];
                let mut pattern: Option<MyersPattern> = None;
                let mut found = Vec::new();
                for r in self.later_ranks(rank, config) {
                    let key_b = &self.sorted[r];
                    let bound = config.pair_bound(key_a.len(), key_b.len());
                    if !key_a.may_be_within(key_b, bound) {
                        continue;
                    }
                    let pattern = pattern.get_or_insert_with(|| MyersPattern::new(&key_a.chars));
                    let d = pattern.distance(&key_b.chars);
                    if d <= bound {
                        let b = self.order[r];
                        found.push((a.min(b), a.max(b), d));
                    }
                }
                found
            })
            .collect();
        pairs.sort_unstable();
        pairs
    }

    /// Positions in this index within bound of `query`, ascending.
    pub fn probe(&self, query: &PreparedKey, config: &NearDupConfig) -> Vec<(usize, usize)> {
        let mut pattern: Option<MyersPattern> = None;
        let mut found = Vec::new();
        for r in self.probe_ranks(query.len(), config) {
            let key_b = &self.sorted[r];
            let bound = config.pair_bound(query.len(), key_b.len());
            if !query.may_be_within(key_b, bound) {
                continue;
            }
            let pattern = pattern.get_or_insert_with(|| MyersPattern::new(&query.chars));
            let d = pattern.distance(&key_b.chars);
            if d <= bound {
                found.push((self.order[r], d));
            }
        }
        found.sort_unstable();
        found
    }
}
