//! Corpus-quality auditing for social media text datasets.
//!
//! The pipeline mirrors how a dataset is cleaned before it is annotated or
//! used for evaluation:
//!
//! 1. [`ingest`] loads a corpus from csv/tsv/jsonl and filters short posts.
//! 2. [`normalize`] unifies user mentions and URLs into placeholder tokens and
//!    derives the comparison key used by every duplicate check.
//! 3. [`exact_dedup`] groups records by key and drops exact duplicates.
//! 4. [`near_dup`] finds near-duplicates by bounded Levenshtein distance over
//!    keys, with exact length blocking.
//! 5. [`conflicts`] reports duplicate clusters with inconsistent labels and
//!    drops them.
//! 6. [`split`] builds train/test splits and scrubs train/test leakage.
//! 7. [`report`] gathers the per-stage counts into an [`AuditReport`] and
//!    compares model rankings.

pub mod conflicts;
pub mod error;
pub mod exact_dedup;
pub mod ingest;
pub mod kv;
pub mod near_dup;
pub mod normalize;
pub mod record;
pub mod report;
pub mod split;
pub mod synth;
pub mod union_find;

pub use conflicts::{find_conflicts, resolve_conflicts, ConflictPolicy, ConflictReport};
pub use error::{Error, Result};
pub use exact_dedup::{build_clusters, deduplicate, DuplicateCluster, KeyMode};
pub use ingest::{encode_corpus, filter_short, load_corpus, write_corpus, FieldMapping, FilterConfig, Format};
pub use near_dup::{
    bounded_levenshtein, candidate_pairs, find_near_duplicates, levenshtein, remove_near_duplicates,
    Distance, NearDupClusterSet, NearDupConfig, NearDupMode, NearDupPair,
};
pub use normalize::{comparison_key, normalize_text, token_count, NormalizationConfig};
pub use record::{Corpus, Language, Record};
pub use report::{audit, compare_rankings, render_report, AuditReport, RankComparison, Render, ReportFormat};
pub use split::{
    detect_leakage, leave_one_out_split, random_split, scrub_train, LeakageMode, LeakageReport,
    Split, SplitKind,
};
