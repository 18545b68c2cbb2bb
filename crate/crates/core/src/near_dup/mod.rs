//! Near-duplicate detection by bounded Levenshtein distance between
//! comparison keys.
//!
//! Candidate generation is exact: a pair is skipped only when a necessary
//! condition for `distance <= bound` fails (length gap, character histogram).
//! Flagged pairs are closed transitively with union-find; each cluster keeps
//! its first member in corpus order.

mod distance;
pub(crate) mod index;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use distance::{
    bounded_levenshtein, bounded_levenshtein_chars, levenshtein, levenshtein_chars, Distance,
    MyersPattern,
};
use index::KeyIndex;

use crate::error::{Error, Result};
use crate::exact_dedup::{corpus_keys, KeyMode};
use crate::normalize::NormalizationConfig;
use crate::record::{Corpus, Record};
use crate::union_find::UnionFind;

/// Default absolute edit-distance threshold.
pub const DEFAULT_THRESHOLD: usize = 20;
/// Default fraction for [`NearDupMode::NormalizedRatio`].
pub const DEFAULT_RATIO: f64 = 0.2;

// Guards against `0.29 * 100.0 == 28.999...` style truncation.
const RATIO_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NearDupMode {
    /// `distance <= threshold`.
    #[default]
    Absolute,
    /// `distance <= floor(ratio * max(len_a, len_b))`.
    NormalizedRatio,
}

impl NearDupMode {
    pub fn as_str(self) -> &'static str {
        match self {
            NearDupMode::Absolute => "absolute",
            NearDupMode::NormalizedRatio => "normalized_ratio",
        }
    }
}

impl fmt::Display for NearDupMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NearDupMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "absolute" => Ok(NearDupMode::Absolute),
            "normalized_ratio" | "ratio" => Ok(NearDupMode::NormalizedRatio),
            other => Err(Error::Config(format!("unknown near-duplicate mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NearDupConfig {
    #[serde(rename = "neardup_threshold")]
    pub threshold: usize,
    #[serde(rename = "neardup_mode")]
    pub mode: NearDupMode,
    /// Only read in [`NearDupMode::NormalizedRatio`].
    #[serde(rename = "neardup_ratio")]
    pub ratio: f64,
}

impl Default for NearDupConfig {
    fn default() -> Self {
        NearDupConfig {
            threshold: DEFAULT_THRESHOLD,
            mode: NearDupMode::Absolute,
            ratio: DEFAULT_RATIO,
        }
    }
}

impl NearDupConfig {
    pub fn absolute(threshold: usize) -> Self {
        NearDupConfig {
            threshold,
            ..Default::default()
        }
    }

    pub fn normalized_ratio(ratio: f64) -> Result<Self> {
        let config = NearDupConfig {
            mode: NearDupMode::NormalizedRatio,
            ratio,
            ..Default::default()
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode == NearDupMode::NormalizedRatio && !(self.ratio > 0.0 && self.ratio <= 1.0) {
            return Err(Error::Config(format!(
                "neardup_ratio must lie in (0, 1], got {}",
                self.ratio
            )));
        }
        Ok(())
    }

    /// Largest distance at which keys of these lengths count as near-duplicates.
    #[inline]
    pub fn pair_bound(&self, len_a: usize, len_b: usize) -> usize {
        match self.mode {
            NearDupMode::Absolute => self.threshold,
            NearDupMode::NormalizedRatio => ratio_bound(self.ratio, len_a.max(len_b)),
        }
    }

    /// Largest length gap to a shorter key, for a key of length `len`.
    pub(crate) fn shorter_gap(&self, len: usize) -> usize {
        match self.mode {
            NearDupMode::Absolute => self.threshold,
            NearDupMode::NormalizedRatio => ratio_bound(self.ratio, len),
        }
    }

    pub fn is_near(&self, a: &str, b: &str) -> bool {
        let (la, lb) = (a.chars().count(), b.chars().count());
        bounded_levenshtein(a, b, self.pair_bound(la, lb)).is_within()
    }
}

fn ratio_bound(ratio: f64, max_len: usize) -> usize {
    (ratio * max_len as f64 + RATIO_EPSILON).floor() as usize
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NearDupPair {
    /// Earlier of the two records in corpus order.
    pub id_a: String,
    pub id_b: String,
    pub distance: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NearDupCluster {
    /// First member in corpus order.
    pub representative: String,
    pub member_ids: Vec<String>,
}

/// Transitive closure of the pair relation over flagged records only;
/// clusters are ordered by representative position.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NearDupClusterSet {
    pub clusters: Vec<NearDupCluster>,
}

impl NearDupClusterSet {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Records dropped by keeping one per cluster.
    pub fn removal_count(&self) -> usize {
        self.clusters.iter().map(|c| c.member_ids.len() - 1).sum()
    }
}

/// Lazily yields candidate pairs `(id_a, id_b)`, `id_a` first in corpus
/// order. Superset of all near-duplicate pairs; pruned by length gap only.
pub struct CandidatePairs<'a> {
    corpus: &'a Corpus,
    index: KeyIndex,
    config: NearDupConfig,
    rank: usize,
    pending: std::vec::IntoIter<usize>,
}

impl<'a> Iterator for CandidatePairs<'a> {
    type Item = (&'a str, &'a str);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(b) = self.pending.next() {
                let a = self.outer();
                let (first, second) = (a.min(b), a.max(b));
                let records = self.corpus.records();
                return Some((&records[first].id, &records[second].id));
            }
            if self.rank + 1 >= self.index.len() {
                return None;
            }
            self.rank += 1;
            self.pending = self
                .index
                .self_candidates(self.rank, &self.config)
                .collect::<Vec<_>>()
                .into_iter();
        }
    }
}

impl CandidatePairs<'_> {
    fn outer(&self) -> usize {
        self.index.order_at(self.rank)
    }
}

pub fn candidate_pairs<'a>(
    corpus: &'a Corpus,
    config: &NearDupConfig,
    normcfg: &NormalizationConfig,
) -> CandidatePairs<'a> {
    let keys = corpus_keys(corpus, KeyMode::Normalized, normcfg);
    let index = KeyIndex::new(&keys);
    let pending = if index.len() > 0 {
        index.self_candidates(0, config).collect::<Vec<_>>()
    } else {
        Vec::new()
    };
    CandidatePairs {
        corpus,
        index,
        config: *config,
        rank: 0,
        pending: pending.into_iter(),
    }
}

/// Pairs and clusters over corpus positions.
pub(crate) struct NearDupScan {
    pub pairs: Vec<(usize, usize, usize)>,
    /// Each cluster sorted ascending; clusters ordered by first member.
    pub clusters: Vec<Vec<usize>>,
}

pub(crate) fn scan_keys(keys: &[String], config: &NearDupConfig) -> NearDupScan {
    let index = KeyIndex::new(keys);
    let pairs = index.self_join(config);

    let mut uf = UnionFind::new(keys.len());
    let mut flagged = vec![false; keys.len()];
    for &(a, b, _) in &pairs {
        uf.union(a, b);
        flagged[a] = true;
        flagged[b] = true;
    }
    let mut slot_of_root: HashMap<usize, usize> = HashMap::new();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for position in (0..keys.len()).filter(|&p| flagged[p]) {
        let root = uf.find(position);
        let slot = *slot_of_root.entry(root).or_insert_with(|| {
            clusters.push(Vec::new());
            clusters.len() - 1
        });
        clusters[slot].push(position);
    }
    NearDupScan { pairs, clusters }
}

pub fn find_near_duplicates(
    corpus: &Corpus,
    config: &NearDupConfig,
    normcfg: &NormalizationConfig,
) -> (Vec<NearDupPair>, NearDupClusterSet) {
    let keys = corpus_keys(corpus, KeyMode::Normalized, normcfg);
    let scan = scan_keys(&keys, config);
    let records = corpus.records();
    let pairs = scan
        .pairs
        .iter()
        .map(|&(a, b, distance)| NearDupPair {
            id_a: records[a].id.clone(),
            id_b: records[b].id.clone(),
            distance,
        })
        .collect();
    let clusters = scan
        .clusters
        .iter()
        .map(|members| NearDupCluster {
            representative: records[members[0]].id.clone(),
            member_ids: members.iter().map(|&p| records[p].id.clone()).collect(),
        })
        .collect();
    (pairs, NearDupClusterSet { clusters })
}

/// Keeps each cluster's representative and every unflagged record.
pub fn remove_near_duplicates(
    corpus: &Corpus,
    config: &NearDupConfig,
    normcfg: &NormalizationConfig,
) -> (Corpus, Vec<Record>) {
    let keys = corpus_keys(corpus, KeyMode::Normalized, normcfg);
    let scan = scan_keys(&keys, config);
    let mut keep = vec![true; corpus.len()];
    for cluster in &scan.clusters {
        for &p in &cluster[1..] {
            keep[p] = false;
        }
    }
    corpus.partition_by_keep(&keep)
}

/// Pair dump with header `id_a,id_b,distance`.
pub fn pairs_to_csv(pairs: &[NearDupPair]) -> Result<String> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(["id_a", "id_b", "distance"])?;
    for pair in pairs {
        writer.write_record([&pair.id_a, &pair.id_b, &pair.distance.to_string()])?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io {
        path: Default::default(),
        source: e.into_error(),
    })?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}

pub fn clusters_to_jsonl(set: &NearDupClusterSet) -> Result<String> {
    let mut out = String::new();
    for cluster in &set.clusters {
        out.push_str(&serde_json::to_string(cluster)?);
        out.push('\n');
    }
    Ok(out)
}
