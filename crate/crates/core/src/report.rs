//! Stage-by-stage audit counts, ranking comparison and report rendering.
//!
//! Ratios are percentages of `n_posts`, rounded half-up to one decimal with
//! integer arithmetic (16,851 / 16,909 renders as `99.7%`). An empty corpus
//! reports every ratio as `0.0`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::conflicts::escape_cell;
use crate::error::{Error, Result};
use crate::exact_dedup::{corpus_keys, group_positions, DuplicateCluster, KeyMode};
use crate::near_dup::{scan_keys, NearDupConfig};
use crate::normalize::{token_count, NormalizationConfig};
use crate::record::{Corpus, Language};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
            ReportFormat::Markdown => "md",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::Config(format!("unknown report format `{other}`"))),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
            ReportFormat::Markdown => "markdown",
        })
    }
}

/// `100 * count / total` in tenths of a percent, rounded half-up.
pub fn ratio_tenths(count: usize, total: usize) -> u64 {
    if total == 0 {
        return 0;
    }
    let (c, t) = (count as u128, total as u128);
    ((2000 * c + t) / (2 * t)) as u64
}

/// Percentage with exactly one decimal digit, without the `%` sign.
pub fn format_ratio(count: usize, total: usize) -> String {
    let tenths = ratio_tenths(count, total);
    format!("{}.{}", tenths / 10, tenths % 10)
}

fn ratio_value(count: usize, total: usize) -> f64 {
    ratio_tenths(count, total) as f64 / 10.0
}

/// `16851` as `16,851`.
pub fn thousands(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub corpus: String,
    pub language: Language,
    pub n_posts: usize,
    pub n_distinct_raw: usize,
    pub ratio_distinct_raw: f64,
    pub n_distinct_normalized: usize,
    pub ratio_distinct_normalized: f64,
    pub n_distinct_after_neardup: usize,
    pub ratio_distinct_after_neardup: f64,
    /// Mean token count of the raw texts, rounded half-up.
    pub mean_tokens: u64,
    /// Clusters under the normalized key, singletons included.
    pub n_clusters: usize,
    pub n_conflicting_clusters: usize,
    #[serde(flatten)]
    pub normalization: NormalizationConfig,
    #[serde(flatten)]
    pub near_dup: NearDupConfig,
}

impl AuditReport {
    /// Builds a report from stage counts.
    pub fn from_counts(
        corpus: impl Into<String>,
        language: Language,
        n_posts: usize,
        n_distinct_raw: usize,
        n_distinct_normalized: usize,
        n_distinct_after_neardup: usize,
    ) -> Self {
        AuditReport {
            corpus: corpus.into(),
            language,
            n_posts,
            n_distinct_raw,
            ratio_distinct_raw: ratio_value(n_distinct_raw, n_posts),
            n_distinct_normalized,
            ratio_distinct_normalized: ratio_value(n_distinct_normalized, n_posts),
            n_distinct_after_neardup,
            ratio_distinct_after_neardup: ratio_value(n_distinct_after_neardup, n_posts),
            mean_tokens: 0,
            n_clusters: n_distinct_normalized,
            n_conflicting_clusters: 0,
            normalization: NormalizationConfig::default(),
            near_dup: NearDupConfig::default(),
        }
    }

    fn stage_cell(&self, count: usize) -> String {
        format!("{} / {}%", thousands(count), format_ratio(count, self.n_posts))
    }
}

pub fn audit(
    corpus: &Corpus,
    normalization: &NormalizationConfig,
    near_dup: &NearDupConfig,
) -> AuditReport {
    let n_posts = corpus.len();
    let raw_keys = corpus_keys(corpus, KeyMode::Raw, normalization);
    let n_distinct_raw = group_positions(&raw_keys).len();
    drop(raw_keys);

    let keys = corpus_keys(corpus, KeyMode::Normalized, normalization);
    let groups = group_positions(&keys);
    let n_distinct_normalized = groups.len();
    let n_conflicting_clusters = groups
        .iter()
        .filter(|members| {
            let mut labels = members
                .iter()
                .filter_map(|&p| corpus.records()[p].label.as_deref());
            match labels.next() {
                Some(first) => labels.any(|l| l != first),
                None => false,
            }
        })
        .count();

    // Exact duplicates are near-duplicates at distance 0, so scanning one key
    // per group gives the same clusters as scanning the whole corpus.
    let distinct_keys: Vec<String> = groups.iter().map(|g| keys[g[0]].clone()).collect();
    let scan = scan_keys(&distinct_keys, near_dup);
    let merged: usize = scan.clusters.iter().map(|c| c.len() - 1).sum();
    let n_distinct_after_neardup = n_distinct_normalized - merged;

    assert!(
        n_distinct_after_neardup <= n_distinct_normalized
            && n_distinct_normalized <= n_distinct_raw
            && n_distinct_raw <= n_posts,
        "stage counts must be monotone"
    );

    let total_tokens: usize = corpus
        .iter()
        .map(|r| token_count(&r.text, corpus.language))
        .sum();
    let mean_tokens = if n_posts == 0 {
        0
    } else {
        ((2 * total_tokens as u128 + n_posts as u128) / (2 * n_posts as u128)) as u64
    };

    AuditReport {
        mean_tokens,
        n_clusters: n_distinct_normalized,
        n_conflicting_clusters,
        normalization: normalization.clone(),
        near_dup: *near_dup,
        ..AuditReport::from_counts(
            corpus.source.clone(),
            corpus.language,
            n_posts,
            n_distinct_raw,
            n_distinct_normalized,
            n_distinct_after_neardup,
        )
    }
}

/// Conflict count straight from prebuilt clusters.
pub fn conflicting_cluster_count(clusters: &[DuplicateCluster]) -> usize {
    clusters.iter().filter(|c| c.has_conflict).count()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub name: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRow {
    /// One-based.
    pub rank: usize,
    pub name_a: String,
    pub score_a: f64,
    pub name_b: String,
    pub score_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankComparison {
    pub ranking_a: Vec<RankedEntry>,
    pub ranking_b: Vec<RankedEntry>,
    pub same_order: bool,
    pub rows: Vec<RankRow>,
}

fn rank(scores: &BTreeMap<String, f64>) -> Result<Vec<RankedEntry>> {
    let mut entries: Vec<RankedEntry> = scores
        .iter()
        .map(|(name, &score)| {
            if score.is_finite() {
                Ok(RankedEntry {
                    name: name.clone(),
                    score,
                })
            } else {
                Err(Error::NonFiniteScore { name: name.clone() })
            }
        })
        .collect::<Result<_>>()?;
    entries.sort_by(|x, y| y.score.total_cmp(&x.score).then_with(|| x.name.cmp(&y.name)));
    Ok(entries)
}

/// Orders both sides by descending score (ties by name) and checks whether
/// the two orders agree.
pub fn compare_rankings(
    scores_a: &BTreeMap<String, f64>,
    scores_b: &BTreeMap<String, f64>,
) -> Result<RankComparison> {
    if scores_a.keys().ne(scores_b.keys()) {
        return Err(Error::MismatchedRankings {
            only_a: scores_a.keys().filter(|k| !scores_b.contains_key(*k)).cloned().collect(),
            only_b: scores_b.keys().filter(|k| !scores_a.contains_key(*k)).cloned().collect(),
        });
    }
    let ranking_a = rank(scores_a)?;
    let ranking_b = rank(scores_b)?;
    let same_order = ranking_a.iter().map(|e| &e.name).eq(ranking_b.iter().map(|e| &e.name));
    let rows = ranking_a
        .iter()
        .zip(&ranking_b)
        .enumerate()
        .map(|(i, (a, b))| RankRow {
            rank: i + 1,
            name_a: a.name.clone(),
            score_a: a.score,
            name_b: b.name.clone(),
            score_b: b.score,
        })
        .collect();
    Ok(RankComparison {
        ranking_a,
        ranking_b,
        same_order,
        rows,
    })
}

/// Something that renders as json, csv or markdown.
pub trait Render {
    fn render(&self, format: ReportFormat) -> Result<String>;
}

pub fn render_report<R: Render + ?Sized>(report: &R, format: ReportFormat) -> Result<String> {
    report.render(format)
}

pub const AUDIT_CSV_HEADER: [&str; 20] = [
    "corpus",
    "language",
    "mean_tokens",
    "n_posts",
    "n_distinct_raw",
    "ratio_distinct_raw",
    "n_distinct_normalized",
    "ratio_distinct_normalized",
    "n_distinct_after_neardup",
    "ratio_distinct_after_neardup",
    "n_clusters",
    "n_conflicting_clusters",
    "mention_placeholder",
    "url_placeholder",
    "lowercase_key",
    "unicode_form",
    "collapse_whitespace",
    "neardup_threshold",
    "neardup_mode",
    "neardup_ratio",
];

const AUDIT_MARKDOWN_HEADER: &str = "| Dataset | Language | Mean Tokens | # of Post | # of Distinct / Ratio% | # of Distinct after Pre-proc. / Ratio% | # of Distinct after Removing Near-Dupli. / Ratio% |\n|---|---|---:|---:|---:|---:|---:|\n";

fn csv_string(rows: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<()>) -> Result<String> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    rows(&mut writer)?;
    let bytes = writer.into_inner().map_err(|e| Error::Io {
        path: Default::default(),
        source: e.into_error(),
    })?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}

impl Render for [AuditReport] {
    fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Json => Ok(serde_json::to_string_pretty(self)? + "\n"),
            ReportFormat::Csv => csv_string(|w| {
                w.write_record(AUDIT_CSV_HEADER)?;
                for r in self {
                    w.write_record([
                        r.corpus.clone(),
                        r.language.to_string(),
                        r.mean_tokens.to_string(),
                        r.n_posts.to_string(),
                        r.n_distinct_raw.to_string(),
                        format_ratio(r.n_distinct_raw, r.n_posts),
                        r.n_distinct_normalized.to_string(),
                        format_ratio(r.n_distinct_normalized, r.n_posts),
                        r.n_distinct_after_neardup.to_string(),
                        format_ratio(r.n_distinct_after_neardup, r.n_posts),
                        r.n_clusters.to_string(),
                        r.n_conflicting_clusters.to_string(),
                        r.normalization.mention_placeholder.clone(),
                        r.normalization.url_placeholder.clone(),
                        r.normalization.lowercase_key.to_string(),
                        "composed".to_string(),
                        r.normalization.collapse_whitespace.to_string(),
                        r.near_dup.threshold.to_string(),
                        r.near_dup.mode.to_string(),
                        r.near_dup.ratio.to_string(),
                    ])?;
                }
                Ok(())
            }),
            ReportFormat::Markdown => {
                let mut out = String::from(AUDIT_MARKDOWN_HEADER);
                for r in self {
                    out.push_str(&format!(
                        "| {} | {} | {} | {} | {} | {} | {} |\n",
                        escape_cell(&r.corpus),
                        r.language,
                        r.mean_tokens,
                        thousands(r.n_posts),
                        r.stage_cell(r.n_distinct_raw),
                        r.stage_cell(r.n_distinct_normalized),
                        r.stage_cell(r.n_distinct_after_neardup),
                    ));
                }
                Ok(out)
            }
        }
    }
}

impl Render for AuditReport {
    fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Json => Ok(serde_json::to_string_pretty(self)? + "\n"),
            _ => std::slice::from_ref(self).render(format),
        }
    }
}

impl Render for RankComparison {
    fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Json => Ok(serde_json::to_string_pretty(self)? + "\n"),
            ReportFormat::Csv => csv_string(|w| {
                w.write_record(["rank", "name_a", "score_a", "name_b", "score_b", "same_order"])?;
                for row in &self.rows {
                    w.write_record([
                        row.rank.to_string(),
                        row.name_a.clone(),
                        row.score_a.to_string(),
                        row.name_b.clone(),
                        row.score_b.to_string(),
                        self.same_order.to_string(),
                    ])?;
                }
                Ok(())
            }),
            ReportFormat::Markdown => {
                let mut out = String::from("| Rank | A | Score A | B | Score B |\n|---:|---|---:|---|---:|\n");
                for row in &self.rows {
                    out.push_str(&format!(
                        "| {} | {} | {} | {} | {} |\n",
                        row.rank,
                        escape_cell(&row.name_a),
                        row.score_a,
                        escape_cell(&row.name_b),
                        row.score_b
                    ));
                }
                out.push_str(&format!(
                    "\nSame order: {}\n",
                    if self.same_order { "yes" } else { "no" }
                ));
                Ok(out)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scores(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(n, s)| (n.to_string(), *s)).collect()
    }

    #[test]
    fn table_ratios_round_half_up() {
        assert_eq!(format_ratio(16_851, 16_909), "99.7");
        assert_eq!(format_ratio(761, 818), "93.0");
        assert_eq!(format_ratio(1, 8), "12.5");
        assert_eq!(format_ratio(1, 16), "6.3");
        assert_eq!(format_ratio(5, 5), "100.0");
        assert_eq!(format_ratio(0, 0), "0.0");
    }

    #[test]
    fn thousands_separators() {
        assert_eq!(thousands(0), "0");
        assert_eq!(thousands(999), "999");
        assert_eq!(thousands(16_909), "16,909");
        assert_eq!(thousands(1_000_000), "1,000,000");
    }

    #[test]
    fn distinct_corpus_audits_to_full_ratios() {
        let corpus = Corpus::from_texts(["alpha beta gamma delta epsilon zeta eta theta", "completely different sentence with other words inside it", "x"]);
        let report = audit(&corpus, &NormalizationConfig::default(), &NearDupConfig::absolute(3));
        assert_eq!(
            (report.n_posts, report.n_distinct_raw, report.n_distinct_normalized, report.n_distinct_after_neardup),
            (3, 3, 3, 3)
        );
        assert_eq!(report.ratio_distinct_after_neardup, 100.0);
        assert_eq!(report.mean_tokens, 6);
    }

    #[test]
    fn mismatched_names_are_rejected() {
        let a = scores(&[("E6", 80.25), ("E7", 80.11), ("E10", 80.01)]);
        let b = scores(&[("E9", 80.18), ("E10", 80.01), ("E8", 79.78)]);
        assert!(matches!(compare_rankings(&a, &b), Err(Error::MismatchedRankings { .. })));
    }

    #[test]
    fn identical_maps_have_same_order() {
        let a = scores(&[("E6", 1.0), ("E7", 2.0)]);
        assert!(compare_rankings(&a, &a).unwrap().same_order);
    }

    #[test]
    fn ties_break_by_name() {
        let a = scores(&[("E9", 90.52), ("E6", 90.52), ("E7", 90.85)]);
        let c = compare_rankings(&a, &a).unwrap();
        let names: Vec<_> = c.ranking_a.iter().map(|e| e.name.as_str()).collect();
        assert_eq!(names, ["E7", "E6", "E9"]);
    }

    #[test]
    fn non_finite_scores_are_rejected() {
        let a = scores(&[("E6", f64::NAN)]);
        assert!(matches!(compare_rankings(&a, &a), Err(Error::NonFiniteScore { .. })));
    }

    #[test]
    fn markdown_has_one_row_per_corpus() {
        let reports = vec![
            AuditReport::from_counts("WASEEM", Language::EnglishLike, 16_909, 16_851, 16_568, 13_364),
            AuditReport::from_counts("Twitter 16", Language::EnglishLike, 818, 761, 761, 740),
        ];
        let md = render_report(reports.as_slice(), ReportFormat::Markdown).unwrap();
        let lines: Vec<&str> = md.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[2].contains("| 16,909 | 16,851 / 99.7% | 16,568 / 98.0% | 13,364 / 79.0% |"), "{}", lines[2]);
        assert!(lines[3].contains("761 / 93.0%"));
    }

    #[test]
    fn json_round_trips() {
        let report = AuditReport::from_counts("w", Language::ChineseLike, 4664, 4516, 4501, 3322);
        let json = render_report(&report, ReportFormat::Json).unwrap();
        let back: AuditReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert!(json.contains("\"neardup_threshold\": 20"));
    }

    #[test]
    fn csv_header_is_fixed() {
        let report = AuditReport::from_counts("w", Language::EnglishLike, 10, 9, 8, 7);
        let csv = render_report(&report, ReportFormat::Csv).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), AUDIT_CSV_HEADER.join(","));
        assert!(lines.next().unwrap().starts_with("w,english_like,0,10,9,90.0,8,80.0,7,70.0,"));
    }
}
