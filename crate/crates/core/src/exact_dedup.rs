//! Exact duplicate grouping under a raw or normalized comparison key.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalize::{comparison_key, NormalizationConfig};
use crate::record::{Corpus, Record};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeyMode {
    /// Raw text, byte for byte.
    Raw,
    /// [`comparison_key`] of the text.
    #[default]
    Normalized,
}

impl KeyMode {
    pub fn key(self, text: &str, config: &NormalizationConfig) -> String {
        match self {
            KeyMode::Raw => text.to_string(),
            KeyMode::Normalized => comparison_key(text, config),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            KeyMode::Raw => "raw",
            KeyMode::Normalized => "normalized",
        }
    }
}

impl fmt::Display for KeyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KeyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(KeyMode::Raw),
            "normalized" => Ok(KeyMode::Normalized),
            other => Err(Error::Config(format!("unknown key mode `{other}`"))),
        }
    }
}

/// Records sharing one comparison key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DuplicateCluster {
    pub key: String,
    /// Corpus order.
    pub member_ids: Vec<String>,
    /// Observed label multiset; unlabeled members are not counted.
    pub labels: BTreeMap<String, usize>,
    pub has_conflict: bool,
}

impl DuplicateCluster {
    pub fn len(&self) -> usize {
        self.member_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.member_ids.is_empty()
    }

    pub fn is_singleton(&self) -> bool {
        self.member_ids.len() == 1
    }
}

/// Computes every record's key, in corpus order.
pub fn corpus_keys(corpus: &Corpus, mode: KeyMode, config: &NormalizationConfig) -> Vec<String> {
    corpus
        .records()
        .par_iter()
        .map(|r| mode.key(&r.text, config))
        .collect()
}

/// Groups records into clusters of one key each, ordered by first member.
pub fn build_clusters(
    corpus: &Corpus,
    mode: KeyMode,
    config: &NormalizationConfig,
) -> Vec<DuplicateCluster> {
    let keys = corpus_keys(corpus, mode, config);
    group_positions(&keys)
        .into_iter()
        .map(|positions| {
            let members: Vec<&Record> = positions.iter().map(|&p| &corpus.records()[p]).collect();
            let mut labels = BTreeMap::new();
            for label in members.iter().filter_map(|r| r.label.as_ref()) {
                *labels.entry(label.clone()).or_insert(0) += 1;
            }
            DuplicateCluster {
                key: keys[positions[0]].clone(),
                member_ids: members.iter().map(|r| r.id.clone()).collect(),
                has_conflict: labels.len() >= 2,
                labels,
            }
        })
        .collect()
}

/// Positions grouped by equal key; groups ordered by first position.
pub(crate) fn group_positions(keys: &[String]) -> Vec<Vec<usize>> {
    let mut index: HashMap<&str, usize> = HashMap::with_capacity(keys.len());
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (position, key) in keys.iter().enumerate() {
        match index.get(key.as_str()) {
            Some(&g) => groups[g].push(position),
            None => {
                index.insert(key, groups.len());
                groups.push(vec![position]);
            }
        }
    }
    groups
}

/// Keeps the first record of every key; returns the kept corpus and the
/// removed records, both in corpus order.
pub fn deduplicate(
    corpus: &Corpus,
    mode: KeyMode,
    config: &NormalizationConfig,
) -> (Corpus, Vec<Record>) {
    let keys = corpus_keys(corpus, mode, config);
    let mut keep = vec![false; corpus.len()];
    for group in group_positions(&keys) {
        keep[group[0]] = true;
    }
    corpus.partition_by_keep(&keep)
}

/// One json object per line.
pub fn clusters_to_jsonl(clusters: &[DuplicateCluster]) -> Result<String> {
    let mut out = String::new();
    for cluster in clusters {
        out.push_str(&serde_json::to_string(cluster)?);
        out.push('\n');
    }
    Ok(out)
}
