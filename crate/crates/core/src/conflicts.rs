//! Label conflicts inside duplicate clusters.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exact_dedup::DuplicateCluster;
use crate::record::{Corpus, Record};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictMember {
    pub id: String,
    pub label: Option<String>,
}

/// A duplicate cluster whose members carry two or more distinct labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictReport {
    pub key: String,
    pub members: Vec<ConflictMember>,
    pub distinct_labels: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConflictPolicy {
    /// Consistent clusters keep their first member; conflicting clusters are
    /// dropped entirely.
    #[default]
    KeepOneConsistentDropConflicting,
}

/// One report per conflicting cluster, in cluster order. Member labels are
/// looked up in `corpus`.
pub fn find_conflicts(corpus: &Corpus, clusters: &[DuplicateCluster]) -> Vec<ConflictReport> {
    let labels: HashMap<&str, Option<&String>> = corpus
        .iter()
        .map(|r| (r.id.as_str(), r.label.as_ref()))
        .collect();
    clusters
        .iter()
        .filter(|c| c.has_conflict)
        .map(|c| ConflictReport {
            key: c.key.clone(),
            members: c
                .member_ids
                .iter()
                .map(|id| ConflictMember {
                    id: id.clone(),
                    label: labels.get(id.as_str()).copied().flatten().cloned(),
                })
                .collect(),
            distinct_labels: c.labels.len(),
        })
        .collect()
}

pub fn resolve_conflicts(
    corpus: &Corpus,
    clusters: &[DuplicateCluster],
    policy: ConflictPolicy,
) -> (Corpus, Vec<Record>) {
    let ConflictPolicy::KeepOneConsistentDropConflicting = policy;
    let mut dropped: HashSet<&str> = HashSet::new();
    for cluster in clusters {
        let skip = if cluster.has_conflict { 0 } else { 1 };
        dropped.extend(cluster.member_ids.iter().skip(skip).map(String::as_str));
    }
    let keep: Vec<bool> = corpus.iter().map(|r| !dropped.contains(r.id.as_str())).collect();
    corpus.partition_by_keep(&keep)
}

pub fn conflicts_to_jsonl(reports: &[ConflictReport]) -> Result<String> {
    let mut out = String::new();
    for report in reports {
        out.push_str(&serde_json::to_string(report)?);
        out.push('\n');
    }
    Ok(out)
}

/// Markdown table: key, member ids with labels, distinct label count.
pub fn conflicts_to_markdown(reports: &[ConflictReport]) -> String {
    let mut out = String::from("| Key | Members (label) | Distinct labels |\n|---|---|---:|\n");
    for report in reports {
        let members: Vec<String> = report
            .members
            .iter()
            .map(|m| format!("{} ({})", m.id, m.label.as_deref().unwrap_or("-")))
            .collect();
        out.push_str(&format!(
            "| {} | {} | {} |\n",
            escape_cell(&report.key),
            escape_cell(&members.join(", ")),
            report.distinct_labels
        ));
    }
    out
}

pub(crate) fn escape_cell(s: &str) -> String {
    s.replace('|', "\\|").replace('\n', " ")
}
