//! Resolved run configuration.
//!
//! Defaults, then the `--config` file, then flags. The result is echoed into
//! every output directory as `run_config.kv`, and that file can be passed
//! back through `--config` to repeat a run. Input paths and the subcommand are
//! always taken from the command line; the matching keys in a config file are
//! ignored.

use std::path::{Path, PathBuf};

use dupaudit::kv::{self, KeyValues};
use dupaudit::{FieldMapping, Format, KeyMode, Language, LeakageMode, NearDupConfig, NormalizationConfig, ReportFormat};

use crate::args::{Cli, Command, NearArgs, NormArgs, ReadArgs, SplitKindArg};
use crate::CliError;

pub const RUN_CONFIG_FILE: &str = "run_config.kv";

const PATH_KEYS: [&str; 7] = ["command", "input", "inputs", "train", "test", "scores_a", "scores_b"];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: &'static str,
    pub inputs: Vec<PathBuf>,
    pub format: Format,
    pub output_format: Format,
    pub mapping: FieldMapping,
    pub language: Language,
    pub min_tokens: Option<usize>,
    pub normalization: NormalizationConfig,
    pub near_dup: NearDupConfig,
    pub key_mode: KeyMode,
    pub report_formats: Vec<ReportFormat>,
    pub split_kind: SplitKindArg,
    pub train_ratio: f64,
    pub seed: u64,
    pub leakage_mode: LeakageMode,
    pub scrub: bool,
    pub resolve: bool,
}

fn put<T: ToString>(kv: &mut KeyValues, key: &str, value: &Option<T>) {
    if let Some(v) = value {
        kv.insert(key.to_string(), v.to_string());
    }
}

fn read_flags(kv: &mut KeyValues, read: &ReadArgs) {
    put(kv, "format", &read.format);
    put(kv, "id_field", &read.id_field);
    put(kv, "text_field", &read.text_field);
    put(kv, "label_field", &read.label_field);
    put(kv, "group_field", &read.group_field);
    put(kv, "language", &read.language);
    put(kv, "min_tokens", &read.min_tokens);
}

fn norm_flags(kv: &mut KeyValues, norm: &NormArgs) {
    put(kv, "mention_placeholder", &norm.mention_placeholder);
    put(kv, "url_placeholder", &norm.url_placeholder);
    put(kv, "lowercase_key", &norm.lowercase_key);
    put(kv, "collapse_whitespace", &norm.collapse_whitespace);
}

fn near_flags(kv: &mut KeyValues, near: &NearArgs) {
    put(kv, "neardup_threshold", &near.threshold);
    put(kv, "neardup_mode", &near.neardup_mode);
    put(kv, "neardup_ratio", &near.neardup_ratio);
}

fn report_flags(kv: &mut KeyValues, formats: &Option<Vec<String>>) {
    put(kv, "report_formats", &formats.as_ref().map(|f| f.join(",")));
}

/// Flag values as config keys, plus the input paths.
fn flags_of(command: &Command) -> (KeyValues, Vec<PathBuf>) {
    let mut kv = KeyValues::new();
    let inputs = match command {
        Command::Audit(a) => {
            read_flags(&mut kv, &a.read);
            norm_flags(&mut kv, &a.norm);
            near_flags(&mut kv, &a.near);
            report_flags(&mut kv, &a.report_format);
            a.inputs.clone()
        }
        Command::Dedup(a) => {
            read_flags(&mut kv, &a.read);
            norm_flags(&mut kv, &a.norm);
            put(&mut kv, "output_format", &a.out.output_format);
            put(&mut kv, "key_mode", &a.key_mode);
            vec![a.input.clone()]
        }
        Command::NearDedup(a) => {
            read_flags(&mut kv, &a.read);
            norm_flags(&mut kv, &a.norm);
            near_flags(&mut kv, &a.near);
            put(&mut kv, "output_format", &a.out.output_format);
            vec![a.input.clone()]
        }
        Command::Conflicts(a) => {
            read_flags(&mut kv, &a.read);
            norm_flags(&mut kv, &a.norm);
            put(&mut kv, "output_format", &a.out.output_format);
            if a.resolve {
                kv.insert("resolve".into(), "true".into());
            }
            vec![a.input.clone()]
        }
        Command::Split(a) => {
            read_flags(&mut kv, &a.read);
            put(&mut kv, "output_format", &a.out.output_format);
            put(&mut kv, "split_kind", &a.kind.map(split_kind_name));
            put(&mut kv, "train_ratio", &a.train_ratio);
            put(&mut kv, "seed", &a.seed);
            vec![a.input.clone()]
        }
        Command::LeakCheck(a) => {
            read_flags(&mut kv, &a.read);
            norm_flags(&mut kv, &a.norm);
            near_flags(&mut kv, &a.near);
            put(&mut kv, "output_format", &a.out.output_format);
            put(&mut kv, "leakage_mode", &a.mode);
            if a.scrub {
                kv.insert("scrub".into(), "true".into());
            }
            vec![a.train.clone(), a.test.clone()]
        }
        Command::Versions(a) => {
            read_flags(&mut kv, &a.read);
            norm_flags(&mut kv, &a.norm);
            near_flags(&mut kv, &a.near);
            put(&mut kv, "output_format", &a.out.output_format);
            vec![a.input.clone()]
        }
        Command::Rankcmp(a) => {
            report_flags(&mut kv, &a.report_format);
            vec![a.scores_a.clone(), a.scores_b.clone()]
        }
    };
    (kv, inputs)
}

pub fn split_kind_name(kind: SplitKindArg) -> &'static str {
    match kind {
        SplitKindArg::Random => "random",
        SplitKindArg::LeaveOneOut => "leave_one_out",
    }
}

fn optional(value: &str) -> Option<String> {
    (!value.is_empty()).then(|| value.to_string())
}

fn usage(e: dupaudit::Error) -> CliError {
    CliError::Usage(e.to_string())
}

impl RunConfig {
    pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
        let mut merged = match &cli.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                kv::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
            }
            None => KeyValues::new(),
        };
        let (flags, inputs) = flags_of(&cli.command);
        merged.extend(flags);
        RunConfig::from_kv(cli.command.name(), inputs, &merged)
    }

    pub fn from_kv(command: &'static str, inputs: Vec<PathBuf>, kv: &KeyValues) -> Result<RunConfig, CliError> {
        let mut format = None;
        let mut output_format = None;
        let mut mapping = FieldMapping::default();
        let mut language = Language::default();
        let mut min_tokens = None;
        let mut key_mode = KeyMode::default();
        let mut report_formats = vec![ReportFormat::Json, ReportFormat::Markdown];
        let mut split_kind = SplitKindArg::Random;
        let mut train_ratio = dupaudit::split::DEFAULT_TRAIN_RATIO;
        let mut seed = 0;
        let mut leakage_mode = LeakageMode::default();
        let mut scrub = false;
        let mut resolve = false;

        let mut normalization = NormalizationConfig::default();
        normalization.apply_kv(kv).map_err(usage)?;
        let mut near_dup = NearDupConfig::default();
        near_dup.apply_kv(kv).map_err(usage)?;

        for (key, value) in kv {
            let value = value.as_str();
            match key.as_str() {
                "format" => format = Some(value.parse::<Format>().map_err(usage)?),
                "output_format" => output_format = Some(value.parse::<Format>().map_err(usage)?),
                "id_field" => mapping.id_field = optional(value),
                "text_field" => {
                    mapping.text_field = optional(value)
                        .ok_or_else(|| CliError::Usage("`text_field` must not be empty".into()))?
                }
                "label_field" => mapping.label_field = optional(value),
                "group_field" => mapping.group_field = optional(value),
                "language" => language = value.parse().map_err(usage)?,
                "min_tokens" => {
                    min_tokens = match value {
                        "" => None,
                        v => {
                            let n: usize = kv::parse_value("min_tokens", v).map_err(usage)?;
                            dupaudit::FilterConfig::min_tokens(n).map_err(usage)?;
                            Some(n)
                        }
                    }
                }
                "key_mode" => key_mode = value.parse().map_err(usage)?,
                "report_formats" => {
                    let mut parsed = value
                        .split(',')
                        .map(|f| f.trim().parse::<ReportFormat>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(usage)?;
                    parsed.sort_by_key(|f| *f as u8);
                    parsed.dedup();
                    if parsed.is_empty() {
                        return Err(CliError::Usage("`report_formats` is empty".into()));
                    }
                    report_formats = parsed;
                }
                "split_kind" => {
                    split_kind = match value {
                        "random" => SplitKindArg::Random,
                        "leave_one_out" | "leave-one-out" => SplitKindArg::LeaveOneOut,
                        other => return Err(CliError::Usage(format!("unknown split kind `{other}`"))),
                    }
                }
                "train_ratio" => train_ratio = kv::parse_value(key, value).map_err(usage)?,
                "seed" => seed = kv::parse_value(key, value).map_err(usage)?,
                "leakage_mode" => leakage_mode = value.parse().map_err(usage)?,
                "scrub" => scrub = kv::parse_bool(key, value).map_err(usage)?,
                "resolve" => resolve = kv::parse_bool(key, value).map_err(usage)?,
                "conflict_policy" => {
                    if value != "keep_one_consistent_drop_conflicting" {
                        return Err(CliError::Usage(format!("unknown conflict policy `{value}`")));
                    }
                }
                "mention_placeholder" | "url_placeholder" | "lowercase_key" | "unicode_form"
                | "collapse_whitespace" | "neardup_threshold" | "neardup_mode" | "neardup_ratio" => {}
                k if PATH_KEYS.contains(&k) => {}
                other => return Err(CliError::Usage(format!("unknown config key `{other}`"))),
            }
        }

        if !(train_ratio > 0.0 && train_ratio < 1.0) {
            return Err(CliError::Usage(format!("`train_ratio` must lie in (0, 1), got {train_ratio}")));
        }
        let format = match format {
            Some(f) => f,
            None if command == "rankcmp" => Format::Csv,
            None => infer_format(&inputs[0])?,
        };
        Ok(RunConfig {
            command,
            inputs,
            format,
            output_format: output_format.unwrap_or(format),
            mapping,
            language,
            min_tokens,
            normalization,
            near_dup,
            key_mode,
            report_formats,
            split_kind,
            train_ratio,
            seed,
            leakage_mode,
            scrub,
            resolve,
        })
    }

    /// Every setting the command depends on, defaults included.
    pub fn to_kv(&self) -> KeyValues {
        let mut kv = KeyValues::new();
        let mut set = |k: &str, v: String| {
            kv.insert(k.to_string(), v);
        };
        set("command", self.command.to_string());
        let paths: Vec<String> = self.inputs.iter().map(|p| p.display().to_string()).collect();
        match self.command {
            "audit" => set("inputs", paths.join(",")),
            "leak-check" => {
                set("train", paths[0].clone());
                set("test", paths[1].clone());
            }
            "rankcmp" => {
                set("scores_a", paths[0].clone());
                set("scores_b", paths[1].clone());
            }
            _ => set("input", paths[0].clone()),
        }
        let reports = self
            .report_formats
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",");
        if self.command == "rankcmp" {
            set("report_formats", reports);
            return kv;
        }

        set("format", self.format.to_string());
        set("id_field", self.mapping.id_field.clone().unwrap_or_default());
        set("text_field", self.mapping.text_field.clone());
        set("label_field", self.mapping.label_field.clone().unwrap_or_default());
        set("group_field", self.mapping.group_field.clone().unwrap_or_default());
        set("language", self.language.to_string());
        set("min_tokens", self.min_tokens.map(|n| n.to_string()).unwrap_or_default());
        if self.command != "audit" {
            set("output_format", self.output_format.to_string());
        }
        match self.command {
            "audit" => set("report_formats", reports),
            "dedup" => set("key_mode", self.key_mode.to_string()),
            "conflicts" => {
                set("resolve", self.resolve.to_string());
                set("conflict_policy", "keep_one_consistent_drop_conflicting".into());
            }
            "split" => {
                set("split_kind", split_kind_name(self.split_kind).into());
                if self.split_kind == SplitKindArg::Random {
                    set("train_ratio", self.train_ratio.to_string());
                    set("seed", self.seed.to_string());
                }
            }
            "leak-check" => {
                set("leakage_mode", self.leakage_mode.to_string());
                set("scrub", self.scrub.to_string());
            }
            _ => {}
        }
        if self.command != "split" {
            self.normalization.to_kv(&mut kv);
        }
        if matches!(self.command, "audit" | "near-dedup" | "leak-check" | "versions") {
            self.near_dup.to_kv(&mut kv);
        }
        kv
    }
}

fn infer_format(path: &Path) -> Result<Format, CliError> {
    Format::from_path(path).ok_or_else(|| {
        CliError::Usage(format!(
            "{}: cannot infer the format from the extension; pass --format",
            path.display()
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    fn resolve(args: &[&str]) -> Result<RunConfig, CliError> {
        RunConfig::resolve(&Cli::try_parse_from(args).unwrap())
    }

    #[test]
    fn defaults_are_materialized() {
        let cfg = resolve(&["dupaudit", "near-dedup", "x.jsonl", "-o", "out"]).unwrap();
        let kv = cfg.to_kv();
        assert_eq!(kv["neardup_threshold"], "20");
        assert_eq!(kv["neardup_mode"], "absolute");
        assert_eq!(kv["format"], "jsonl");
        assert_eq!(kv["output_format"], "jsonl");
        assert_eq!(kv["lowercase_key"], "true");
        assert_eq!(kv["min_tokens"], "");
    }

    #[test]
    fn echoed_config_resolves_to_itself() {
        let cfg = resolve(&[
            "dupaudit", "split", "x.csv", "-o", "out", "--seed", "9", "--train-ratio", "0.7", "--id-field", "id",
        ])
        .unwrap();
        let again = RunConfig::from_kv("split", cfg.inputs.clone(), &cfg.to_kv()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_usage_errors() {
        let mut kv = KeyValues::new();
        kv.insert("nonsense".into(), "1".into());
        assert!(matches!(RunConfig::from_kv("dedup", vec!["a.csv".into()], &kv), Err(CliError::Usage(_))));
        assert!(matches!(
            resolve(&["dupaudit", "dedup", "a.txt", "-o", "o"]),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            resolve(&["dupaudit", "dedup", "a.csv", "-o", "o", "--min-tokens", "0"]),
            Err(CliError::Usage(_))
        ));
    }
}
