use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use dupaudit::kv::{self, KeyValues};
use dupaudit::{
    audit, build_clusters, compare_rankings, deduplicate, detect_leakage, filter_short, find_conflicts,
    find_near_duplicates, leave_one_out_split, load_corpus, normalize_text, random_split, render_report,
    resolve_conflicts, scrub_train, token_count, ConflictPolicy, Corpus, Error, FilterConfig, KeyMode, Record,
    Render, Split, SplitKind,
};

use crate::args::{Cli, SplitKindArg};
use crate::config::{RunConfig, RUN_CONFIG_FILE};
use crate::output::Staged;
use crate::CliError;

pub fn dispatch(cli: &Cli, cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let out_dir = match &cli.command {
        crate::args::Command::Audit(a) => &a.out_dir,
        crate::args::Command::Rankcmp(a) => &a.out_dir,
        crate::args::Command::Dedup(a) => &a.out.out_dir,
        crate::args::Command::NearDedup(a) => &a.out.out_dir,
        crate::args::Command::Conflicts(a) => &a.out.out_dir,
        crate::args::Command::Split(a) => &a.out.out_dir,
        crate::args::Command::LeakCheck(a) => &a.out.out_dir,
        crate::args::Command::Versions(a) => &a.out.out_dir,
    };
    let mut out = Staged::new(out_dir, cli.force);
    out.add(RUN_CONFIG_FILE, kv::format(&cfg.to_kv()));
    match cfg.command {
        "audit" => run_audit(cfg, &mut out)?,
        "dedup" => run_dedup(cfg, &mut out)?,
        "near-dedup" => run_near_dedup(cfg, &mut out)?,
        "conflicts" => run_conflicts(cfg, &mut out)?,
        "split" => run_split(cfg, &mut out)?,
        "leak-check" => run_leak_check(cfg, &mut out)?,
        "versions" => run_versions(cfg, &mut out)?,
        "rankcmp" => run_rankcmp(cfg, &mut out)?,
        other => return Err(CliError::Internal(format!("no handler for `{other}`"))),
    }
    out.commit()
}

fn load(cfg: &RunConfig, path: &Path) -> Result<Corpus, CliError> {
    let corpus = load_corpus(path, cfg.format, &cfg.mapping, cfg.language)?;
    match cfg.min_tokens {
        Some(n) => {
            let language = cfg.language;
            Ok(filter_short(&corpus, &FilterConfig::min_tokens(n)?, |t| token_count(t, language))?)
        }
        None => Ok(corpus),
    }
}

fn subset(corpus: &Corpus, records: Vec<Record>) -> Corpus {
    Corpus::new(records, corpus.language, corpus.source.clone()).expect("subset of a valid corpus")
}

fn add_reports<R: Render + ?Sized>(out: &mut Staged, stem: &str, report: &R, cfg: &RunConfig) -> Result<(), CliError> {
    for &format in &cfg.report_formats {
        let text = render_report(report, format).map_err(CliError::internal)?;
        out.add(format!("{stem}.{}", format.extension()), text);
    }
    Ok(())
}

fn run_audit(cfg: &RunConfig, out: &mut Staged) -> Result<(), CliError> {
    let mut reports = Vec::with_capacity(cfg.inputs.len());
    let mut conflict_jsonl = String::new();
    let mut conflict_md = String::new();
    for path in &cfg.inputs {
        let corpus = load(cfg, path)?;
        reports.push(audit(&corpus, &cfg.normalization, &cfg.near_dup));
        let clusters = build_clusters(&corpus, KeyMode::Normalized, &cfg.normalization);
        let conflicts = find_conflicts(&corpus, &clusters);
        conflict_jsonl += &dupaudit::conflicts::conflicts_to_jsonl(&conflicts).map_err(CliError::internal)?;
        conflict_md += &format!(
            "\n## Conflicting clusters: {}\n\n{}",
            corpus.source,
            dupaudit::conflicts::conflicts_to_markdown(&conflicts)
        );
    }
    for r in &reports {
        eprintln!(
            "{}: {} posts, {} distinct, {} after normalization, {} after near-dup removal",
            r.corpus, r.n_posts, r.n_distinct_raw, r.n_distinct_normalized, r.n_distinct_after_neardup
        );
    }
    for &format in &cfg.report_formats {
        let mut text = render_report(reports.as_slice(), format).map_err(CliError::internal)?;
        if format == dupaudit::ReportFormat::Markdown {
            text += &conflict_md;
        }
        out.add(format!("audit.{}", format.extension()), text);
    }
    out.add("conflicts.jsonl", conflict_jsonl);
    Ok(())
}

fn run_dedup(cfg: &RunConfig, out: &mut Staged) -> Result<(), CliError> {
    let corpus = load(cfg, &cfg.inputs[0])?;
    let (kept, removed) = deduplicate(&corpus, cfg.key_mode, &cfg.normalization);
    let clusters: Vec<_> = build_clusters(&corpus, cfg.key_mode, &cfg.normalization)
        .into_iter()
        .filter(|c| !c.is_singleton())
        .collect();
    eprintln!("kept {} of {}, removed {}", kept.len(), corpus.len(), removed.len());
    out.add_corpus("deduplicated", &kept, cfg.output_format)?;
    out.add_corpus("removed", &subset(&corpus, removed), cfg.output_format)?;
    out.add(
        "clusters.jsonl",
        dupaudit::exact_dedup::clusters_to_jsonl(&clusters).map_err(CliError::internal)?,
    );
    Ok(())
}

fn run_near_dedup(cfg: &RunConfig, out: &mut Staged) -> Result<(), CliError> {
    let corpus = load(cfg, &cfg.inputs[0])?;
    let (pairs, clusters) = find_near_duplicates(&corpus, &cfg.near_dup, &cfg.normalization);
    let dropped: HashSet<&str> = clusters
        .clusters
        .iter()
        .flat_map(|c| c.member_ids[1..].iter().map(String::as_str))
        .collect();
    let (kept, removed): (Vec<Record>, Vec<Record>) =
        corpus.iter().cloned().partition(|r| !dropped.contains(r.id.as_str()));
    eprintln!(
        "{} pairs in {} clusters; kept {} of {}",
        pairs.len(),
        clusters.len(),
        kept.len(),
        corpus.len()
    );
    out.add_corpus("near_deduplicated", &subset(&corpus, kept), cfg.output_format)?;
    out.add_corpus("near_removed", &subset(&corpus, removed), cfg.output_format)?;
    out.add("near_pairs.csv", dupaudit::near_dup::pairs_to_csv(&pairs).map_err(CliError::internal)?);
    out.add(
        "near_clusters.jsonl",
        dupaudit::near_dup::clusters_to_jsonl(&clusters).map_err(CliError::internal)?,
    );
    Ok(())
}

fn run_conflicts(cfg: &RunConfig, out: &mut Staged) -> Result<(), CliError> {
    let corpus = load(cfg, &cfg.inputs[0])?;
    let clusters = build_clusters(&corpus, KeyMode::Normalized, &cfg.normalization);
    let reports = find_conflicts(&corpus, &clusters);
    eprintln!("{} conflicting clusters", reports.len());
    out.add(
        "conflicts.jsonl",
        dupaudit::conflicts::conflicts_to_jsonl(&reports).map_err(CliError::internal)?,
    );
    out.add("conflicts.md", dupaudit::conflicts::conflicts_to_markdown(&reports));
    if cfg.resolve {
        let (kept, removed) = resolve_conflicts(&corpus, &clusters, ConflictPolicy::default());
        eprintln!("kept {} of {}", kept.len(), corpus.len());
        out.add_corpus("resolved", &kept, cfg.output_format)?;
        out.add_corpus("conflict_removed", &subset(&corpus, removed), cfg.output_format)?;
    }
    Ok(())
}

fn add_split(out: &mut Staged, prefix: &str, split: &Split, cfg: &RunConfig) -> Result<(), CliError> {
    out.add_corpus(&format!("{prefix}train"), &split.train, cfg.output_format)?;
    out.add_corpus(&format!("{prefix}test"), &split.test, cfg.output_format)?;
    out.add(format!("{prefix}split_manifest.kv"), kv::format(&split.manifest()));
    Ok(())
}

fn run_split(cfg: &RunConfig, out: &mut Staged) -> Result<(), CliError> {
    let corpus = load(cfg, &cfg.inputs[0])?;
    match cfg.split_kind {
        SplitKindArg::Random => {
            let split = random_split(&corpus, cfg.train_ratio, cfg.seed)?;
            eprintln!("train {}, test {}", split.train.len(), split.test.len());
            add_split(out, "", &split, cfg)
        }
        SplitKindArg::LeaveOneOut => {
            let folds = leave_one_out_split(&corpus)?;
            eprintln!("{} folds", folds.len());
            for (i, fold) in folds.iter().enumerate() {
                add_split(out, &format!("fold-{i}/"), fold, cfg)?;
            }
            Ok(())
        }
    }
}

fn run_leak_check(cfg: &RunConfig, out: &mut Staged) -> Result<(), CliError> {
    let train = load(cfg, &cfg.inputs[0])?;
    let test = load(cfg, &cfg.inputs[1])?;
    let split = Split {
        train,
        test,
        kind: SplitKind::External,
    };
    let report = detect_leakage(&split, cfg.leakage_mode, &cfg.near_dup, &cfg.normalization);
    eprintln!(
        "{} of {} train records leak into test ({} mode)",
        report.n_contaminated, report.n_train, report.mode
    );
    out.add(
        "leakage.json",
        serde_json::to_string_pretty(&report).map_err(CliError::internal)? + "\n",
    );
    if cfg.scrub {
        let scrubbed = scrub_train(&split, cfg.leakage_mode, &cfg.near_dup, &cfg.normalization);
        out.add_corpus("train_scrubbed", &scrubbed.train, cfg.output_format)?;
    }
    Ok(())
}

fn run_versions(cfg: &RunConfig, out: &mut Staged) -> Result<(), CliError> {
    let corpus = load(cfg, &cfg.inputs[0])?;
    let normalized_records = corpus
        .iter()
        .map(|r| Record {
            text: normalize_text(&r.text, &cfg.normalization),
            ..r.clone()
        })
        .collect();
    let normalized = subset(&corpus, normalized_records);
    let (no_dups, _) = deduplicate(&normalized, KeyMode::Normalized, &cfg.normalization);
    let (no_near, _) = dupaudit::remove_near_duplicates(&no_dups, &cfg.near_dup, &cfg.normalization);
    let mut summary = KeyValues::new();
    summary.insert("n_normalized".into(), normalized.len().to_string());
    summary.insert("n_no_duplicates".into(), no_dups.len().to_string());
    summary.insert("n_no_near_duplicates".into(), no_near.len().to_string());
    eprintln!(
        "normalized {}, without duplicates {}, without near-duplicates {}",
        normalized.len(),
        no_dups.len(),
        no_near.len()
    );
    out.add_corpus("normalized", &normalized, cfg.output_format)?;
    out.add_corpus("no_duplicates", &no_dups, cfg.output_format)?;
    out.add_corpus("no_near_duplicates", &no_near, cfg.output_format)?;
    out.add("versions.kv", kv::format(&summary));
    Ok(())
}

/// Reads `name,score` rows; names must be unique.
pub fn load_scores(path: &Path) -> Result<BTreeMap<String, f64>, Error> {
    let malformed = |row: usize, message: String| Error::MalformedRow {
        path: path.to_path_buf(),
        row,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => malformed(0, format!("{other:?}")),
        })?;
    let headers = reader.headers().map_err(|e| malformed(0, e.to_string()))?.clone();
    let column = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::MissingColumn {
            path: path.to_path_buf(),
            field: name.to_string(),
        })
    };
    let (name_col, score_col) = (column("name")?, column("score")?);
    let mut scores = BTreeMap::new();
    for (i, row) in reader.records().enumerate() {
        let row_no = i + 1;
        let row = row.map_err(|e| malformed(row_no, e.to_string()))?;
        let name = row.get(name_col).unwrap_or_default().to_string();
        let raw = row.get(score_col).unwrap_or_default();
        let score: f64 = raw
            .parse()
            .map_err(|_| malformed(row_no, format!("score `{raw}` is not a number")))?;
        if scores.insert(name.clone(), score).is_some() {
            return Err(malformed(row_no, format!("duplicate name `{name}`")));
        }
    }
    Ok(scores)
}

fn run_rankcmp(cfg: &RunConfig, out: &mut Staged) -> Result<(), CliError> {
    let a = load_scores(&cfg.inputs[0])?;
    let b = load_scores(&cfg.inputs[1])?;
    let comparison = compare_rankings(&a, &b)?;
    eprintln!("same_order = {}", comparison.same_order);
    add_reports(out, "rankcmp", &comparison, cfg)
}
