use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "dupaudit",
    version,
    about = "Audit text datasets for duplicates, near-duplicates, label conflicts and split leakage"
)]
pub struct Cli {
    /// Worker threads for scanning (default: available cores).
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,

    /// Plain `key = value` file; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Overwrite existing output files.
    #[arg(long, global = true)]
    pub force: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-stage distinct counts and ratios.
    Audit(AuditArgs),
    /// Drop exact duplicates, keeping the first of each cluster.
    Dedup(DedupArgs),
    /// Drop near-duplicates by bounded edit distance.
    NearDedup(NearDedupArgs),
    /// Report duplicate clusters with conflicting labels.
    Conflicts(ConflictsArgs),
    /// Write train/test splits.
    Split(SplitArgs),
    /// Check a train/test pair for leaked records.
    LeakCheck(LeakCheckArgs),
    /// Write the normalized corpus with and without (near-)duplicates.
    Versions(VersionsArgs),
    /// Compare two `name,score` tables for rank-order stability.
    Rankcmp(RankcmpArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Audit(_) => "audit",
            Command::Dedup(_) => "dedup",
            Command::NearDedup(_) => "near-dedup",
            Command::Conflicts(_) => "conflicts",
            Command::Split(_) => "split",
            Command::LeakCheck(_) => "leak-check",
            Command::Versions(_) => "versions",
            Command::Rankcmp(_) => "rankcmp",
        }
    }
}

#[derive(Debug, Args, Default)]
pub struct ReadArgs {
    /// csv, tsv or jsonl (default: from the file extension).
    #[arg(long)]
    pub format: Option<String>,
    /// Source field holding record ids (default: row ordinals).
    #[arg(long)]
    pub id_field: Option<String>,
    /// Source field holding the text [default: text].
    #[arg(long)]
    pub text_field: Option<String>,
    #[arg(long)]
    pub label_field: Option<String>,
    #[arg(long)]
    pub group_field: Option<String>,
    /// english_like or chinese_like [default: english_like].
    #[arg(long)]
    pub language: Option<String>,
    /// Drop posts with fewer tokens before anything else.
    #[arg(long, value_name = "N")]
    pub min_tokens: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct NormArgs {
    #[arg(long)]
    pub mention_placeholder: Option<String>,
    #[arg(long)]
    pub url_placeholder: Option<String>,
    /// Case-fold comparison keys [default: true].
    #[arg(long, value_name = "BOOL")]
    pub lowercase_key: Option<bool>,
    #[arg(long, value_name = "BOOL")]
    pub collapse_whitespace: Option<bool>,
}

#[derive(Debug, Args, Default)]
pub struct NearArgs {
    /// Absolute edit-distance threshold [default: 20].
    #[arg(long)]
    pub threshold: Option<usize>,
    /// absolute or normalized_ratio [default: absolute].
    #[arg(long)]
    pub neardup_mode: Option<String>,
    /// Fraction of the longer key, for normalized_ratio [default: 0.2].
    #[arg(long)]
    pub neardup_ratio: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    #[arg(short = 'o', long, value_name = "DIR")]
    pub out_dir: PathBuf,
    /// Corpus output format (default: the input format).
    #[arg(long)]
    pub output_format: Option<String>,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(required = true, value_name = "INPUT")]
    pub inputs: Vec<PathBuf>,
    #[command(flatten)]
    pub read: ReadArgs,
    #[command(flatten)]
    pub norm: NormArgs,
    #[command(flatten)]
    pub near: NearArgs,
    #[arg(short = 'o', long, value_name = "DIR")]
    pub out_dir: PathBuf,
    /// Comma-separated: json, csv, markdown [default: json,markdown].
    #[arg(long, value_delimiter = ',')]
    pub report_format: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct DedupArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub read: ReadArgs,
    #[command(flatten)]
    pub norm: NormArgs,
    #[command(flatten)]
    pub out: OutArgs,
    /// raw or normalized [default: normalized].
    #[arg(long)]
    pub key_mode: Option<String>,
}

#[derive(Debug, Args)]
pub struct NearDedupArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub read: ReadArgs,
    #[command(flatten)]
    pub norm: NormArgs,
    #[command(flatten)]
    pub near: NearArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct ConflictsArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub read: ReadArgs,
    #[command(flatten)]
    pub norm: NormArgs,
    #[command(flatten)]
    pub out: OutArgs,
    /// Also write the corpus with one record per consistent cluster and none
    /// from conflicting clusters.
    #[arg(long)]
    pub resolve: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplitKindArg {
    Random,
    LeaveOneOut,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub read: ReadArgs,
    #[command(flatten)]
    pub out: OutArgs,
    #[arg(long, value_enum)]
    pub kind: Option<SplitKindArg>,
    /// Train fraction for random splits [default: 0.8].
    #[arg(long)]
    pub train_ratio: Option<f64>,
    /// [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct LeakCheckArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    #[command(flatten)]
    pub read: ReadArgs,
    #[command(flatten)]
    pub norm: NormArgs,
    #[command(flatten)]
    pub near: NearArgs,
    #[command(flatten)]
    pub out: OutArgs,
    /// exact or near [default: exact].
    #[arg(long)]
    pub mode: Option<String>,
    /// Also write the train side without flagged records.
    #[arg(long)]
    pub scrub: bool,
}

#[derive(Debug, Args)]
pub struct VersionsArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub read: ReadArgs,
    #[command(flatten)]
    pub norm: NormArgs,
    #[command(flatten)]
    pub near: NearArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct RankcmpArgs {
    /// csv with header `name,score`.
    pub scores_a: PathBuf,
    pub scores_b: PathBuf,
    #[arg(short = 'o', long, value_name = "DIR")]
    pub out_dir: PathBuf,
    /// Comma-separated: json, csv, markdown [default: json,markdown].
    #[arg(long, value_delimiter = ',')]
    pub report_format: Option<Vec<String>>,
}
