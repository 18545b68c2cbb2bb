//! Train/test splits and cross-split leakage.
//!
//! Random splits use ChaCha8 seeded through `rand_core`'s `seed_from_u64`,
//! followed by a Fisher–Yates shuffle that draws indices by rejection
//! sampling on `next_u64`. Both pieces are fixed, so a `(corpus, ratio,
//! seed)` triple yields the same split on every platform.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_dedup::{corpus_keys, KeyMode};
use crate::kv::KeyValues;
use crate::near_dup::index::{KeyIndex, PreparedKey};
use crate::near_dup::NearDupConfig;
use crate::normalize::NormalizationConfig;
use crate::record::Corpus;

/// Default train fraction.
pub const DEFAULT_TRAIN_RATIO: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SplitKind {
    Random { seed: u64, ratio: f64 },
    LeaveOneOut { group: String },
    /// Train and test supplied as separate files.
    External,
}

/// Disjoint train and test sides whose union is the source corpus; each side
/// keeps source order.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Corpus,
    pub test: Corpus,
    pub kind: SplitKind,
}

impl Split {
    /// Plain key-value manifest describing this split.
    pub fn manifest(&self) -> KeyValues {
        let mut kv = KeyValues::new();
        match &self.kind {
            SplitKind::Random { seed, ratio } => {
                kv.insert("split_kind".into(), "random".into());
                kv.insert("seed".into(), seed.to_string());
                kv.insert("ratio".into(), ratio.to_string());
                kv.insert("stratified".into(), "false".into());
                kv.insert("generator".into(), "chacha8-seed_from_u64-fisher_yates".into());
            }
            SplitKind::LeaveOneOut { group } => {
                kv.insert("split_kind".into(), "leave_one_out".into());
                kv.insert("test_group".into(), group.clone());
            }
            SplitKind::External => {
                kv.insert("split_kind".into(), "external".into());
            }
        }
        kv.insert("n_train".into(), self.train.len().to_string());
        kv.insert("n_test".into(), self.test.len().to_string());
        kv
    }
}

fn uniform_below(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let zone = u64::MAX - (u64::MAX % bound);
    loop {
        let x = rng.next_u64();
        if x < zone {
            return x % bound;
        }
    }
}

/// Seeded permutation of `0..n`.
pub fn seeded_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = uniform_below(&mut rng, i as u64 + 1) as usize;
        perm.swap(i, j);
    }
    perm
}

/// First `floor(ratio * n)` positions of a seeded permutation go to train.
pub fn random_split(corpus: &Corpus, ratio: f64, seed: u64) -> Result<Split> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Split(format!("ratio must lie in (0, 1), got {ratio}")));
    }
    let n = corpus.len();
    let n_train = (ratio * n as f64 + 1e-9).floor() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::Split(format!(
            "ratio {ratio} on {n} records leaves an empty side"
        )));
    }
    let mut in_train = vec![false; n];
    for &p in &seeded_permutation(n, seed)[..n_train] {
        in_train[p] = true;
    }
    let (train, test) = corpus.partition_by_keep(&in_train);
    let test = corpus.with_records(test);
    Ok(Split {
        train,
        test,
        kind: SplitKind::Random { seed, ratio },
    })
}

/// One fold per group, ordered by first appearance; the fold's test side is
/// that group.
pub fn leave_one_out_split(corpus: &Corpus) -> Result<Vec<Split>> {
    let mut groups: Vec<&str> = Vec::new();
    let mut seen = HashSet::new();
    for record in corpus {
        let group = record.group.as_deref().ok_or_else(|| {
            Error::Split(format!("record `{}` has no group", record.id))
        })?;
        if seen.insert(group) {
            groups.push(group);
        }
    }
    if groups.len() < 2 {
        return Err(Error::Split(format!(
            "leave-one-out needs at least two groups, found {}",
            groups.len()
        )));
    }
    Ok(groups
        .into_iter()
        .map(|group| {
            let in_train: Vec<bool> = corpus
                .iter()
                .map(|r| r.group.as_deref() != Some(group))
                .collect();
            let (train, test) = corpus.partition_by_keep(&in_train);
            Split {
                train,
                test: corpus.with_records(test),
                kind: SplitKind::LeaveOneOut {
                    group: group.to_string(),
                },
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeakageMode {
    #[default]
    Exact,
    Near,
}

impl LeakageMode {
    pub fn as_str(self) -> &'static str {
        match self {
            LeakageMode::Exact => "exact",
            LeakageMode::Near => "near",
        }
    }
}

impl fmt::Display for LeakageMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LeakageMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(LeakageMode::Exact),
            "near" => Ok(LeakageMode::Near),
            other => Err(Error::Config(format!("unknown leakage mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeakMatch {
    pub train_id: String,
    /// Test order; never empty.
    pub test_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageReport {
    pub mode: LeakageMode,
    pub n_train: usize,
    pub n_test: usize,
    pub n_contaminated: usize,
    /// Fraction of train records flagged.
    pub contamination_rate: f64,
    /// Train order.
    pub matches: Vec<LeakMatch>,
}

impl LeakageReport {
    pub fn contaminated_train_ids(&self) -> impl Iterator<Item = &str> {
        self.matches.iter().map(|m| m.train_id.as_str())
    }

    pub fn is_empty(&self) -> bool {
        self.matches.is_empty()
    }
}

/// Train positions with their matching test positions.
fn leaked_positions(
    split: &Split,
    mode: LeakageMode,
    near: &NearDupConfig,
    norm: &NormalizationConfig,
) -> Vec<(usize, Vec<usize>)> {
    let train_keys = corpus_keys(&split.train, KeyMode::Normalized, norm);
    let test_keys = corpus_keys(&split.test, KeyMode::Normalized, norm);
    match mode {
        LeakageMode::Exact => {
            let mut by_key: HashMap<&str, Vec<usize>> = HashMap::new();
            for (p, key) in test_keys.iter().enumerate() {
                by_key.entry(key).or_default().push(p);
            }
            train_keys
                .iter()
                .enumerate()
                .filter_map(|(p, key)| by_key.get(key.as_str()).map(|t| (p, t.clone())))
                .collect()
        }
        LeakageMode::Near => {
            let index = KeyIndex::new(&test_keys);
            train_keys
                .par_iter()
                .enumerate()
                .filter_map(|(p, key)| {
                    let query = PreparedKey::new(key);
                    let hits: Vec<usize> =
                        index.probe(&query, near).into_iter().map(|(t, _)| t).collect();
                    (!hits.is_empty()).then_some((p, hits))
                })
                .collect()
        }
    }
}

pub fn detect_leakage(
    split: &Split,
    mode: LeakageMode,
    near: &NearDupConfig,
    norm: &NormalizationConfig,
) -> LeakageReport {
    let leaked = leaked_positions(split, mode, near, norm);
    let train = split.train.records();
    let test = split.test.records();
    let matches: Vec<LeakMatch> = leaked
        .into_iter()
        .map(|(p, hits)| LeakMatch {
            train_id: train[p].id.clone(),
            test_ids: hits.into_iter().map(|t| test[t].id.clone()).collect(),
        })
        .collect();
    let n_train = split.train.len();
    LeakageReport {
        mode,
        n_train,
        n_test: split.test.len(),
        n_contaminated: matches.len(),
        contamination_rate: if n_train == 0 {
            0.0
        } else {
            matches.len() as f64 / n_train as f64
        },
        matches,
    }
}

/// Drops flagged train records; the test side is returned untouched.
pub fn scrub_train(
    split: &Split,
    mode: LeakageMode,
    near: &NearDupConfig,
    norm: &NormalizationConfig,
) -> Split {
    let mut keep = vec![true; split.train.len()];
    for (p, _) in leaked_positions(split, mode, near, norm) {
        keep[p] = false;
    }
    let (train, _) = split.train.partition_by_keep(&keep);
    Split {
        train,
        test: split.test.clone(),
        kind: split.kind.clone(),
    }
}
