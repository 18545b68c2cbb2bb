//! Corpus files: csv and tsv (header row, RFC 4180 style quoting) and jsonl
//! (one object per line). All input must be valid UTF-8.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::record::{Corpus, Language, Record};

/// Column names used when writing corpora.
pub const CANONICAL_FIELDS: [&str; 4] = ["id", "text", "label", "group"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Tsv,
    Jsonl,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Tsv => "tsv",
            Format::Jsonl => "jsonl",
        }
    }

    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Format> {
        path.extension()?.to_str()?.parse().ok()
    }

    fn delimiter(self) -> u8 {
        match self {
            Format::Tsv => b'\t',
            _ => b',',
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "tsv" | "tab" => Ok(Format::Tsv),
            "jsonl" | "ndjson" => Ok(Format::Jsonl),
            other => Err(Error::Config(format!("unknown format `{other}`"))),
        }
    }
}

/// Which source fields feed which record fields.
///
/// Without an `id_field`, ids are the zero-based row ordinals ("0", "1", ...).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldMapping {
    pub id_field: Option<String>,
    pub text_field: String,
    pub label_field: Option<String>,
    pub group_field: Option<String>,
}

impl FieldMapping {
    pub fn text_only(text_field: impl Into<String>) -> Self {
        FieldMapping {
            id_field: None,
            text_field: text_field.into(),
            label_field: None,
            group_field: None,
        }
    }

    /// The mapping that reads back files produced by [`write_corpus`].
    pub fn canonical() -> Self {
        FieldMapping {
            id_field: Some("id".into()),
            text_field: "text".into(),
            label_field: Some("label".into()),
            group_field: Some("group".into()),
        }
    }

    fn is_mapped(&self, field: &str) -> bool {
        field == self.text_field
            || self.id_field.as_deref() == Some(field)
            || self.label_field.as_deref() == Some(field)
            || self.group_field.as_deref() == Some(field)
    }
}

impl Default for FieldMapping {
    fn default() -> Self {
        FieldMapping::text_only("text")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FilterConfig {
    pub min_tokens: Option<usize>,
}

impl FilterConfig {
    pub fn min_tokens(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("min_tokens must be at least 1".into()));
        }
        Ok(FilterConfig { min_tokens: Some(n) })
    }
}

pub fn load_corpus(
    path: &Path,
    format: Format,
    mapping: &FieldMapping,
    language: Language,
) -> Result<Corpus> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let records = match format {
        Format::Csv | Format::Tsv => read_delimited(path, &bytes, format.delimiter(), mapping)?,
        Format::Jsonl => read_jsonl(path, &bytes, mapping)?,
    };
    Corpus::new(records, language, path.display().to_string())
}

struct RowBuilder<'a> {
    path: &'a Path,
    mapping: &'a FieldMapping,
    seen: HashSet<String>,
}

impl RowBuilder<'_> {
    /// `ordinal` is zero-based; reported rows are one-based.
    fn build(
        &mut self,
        ordinal: usize,
        mut fields: BTreeMap<String, String>,
        present: impl Fn(&str) -> bool,
    ) -> Result<Record> {
        let row = ordinal + 1;
        let text = match fields.remove(&self.mapping.text_field) {
            Some(t) => t,
            None => {
                return Err(Error::MissingField {
                    path: self.path.to_path_buf(),
                    row,
                    field: self.mapping.text_field.clone(),
                })
            }
        };
        let id = match &self.mapping.id_field {
            Some(field) => match fields.remove(field) {
                Some(id) if !id.is_empty() => id,
                Some(_) => {
                    return Err(Error::MalformedRow {
                        path: self.path.to_path_buf(),
                        row,
                        message: format!("empty id in field `{field}`"),
                    })
                }
                None if present(field) => {
                    return Err(Error::MalformedRow {
                        path: self.path.to_path_buf(),
                        row,
                        message: format!("null id in field `{field}`"),
                    })
                }
                None => {
                    return Err(Error::MissingField {
                        path: self.path.to_path_buf(),
                        row,
                        field: field.clone(),
                    })
                }
            },
            None => ordinal.to_string(),
        };
        if !self.seen.insert(id.clone()) {
            return Err(Error::DuplicateId { id });
        }
        let mut take_optional = |field: &Option<String>| {
            field
                .as_ref()
                .and_then(|f| fields.remove(f))
                .filter(|v| !v.is_empty())
        };
        let label = take_optional(&self.mapping.label_field);
        let group = take_optional(&self.mapping.group_field);
        Ok(Record {
            id,
            text,
            label,
            group,
            meta: fields,
        })
    }
}

fn read_delimited(
    path: &Path,
    bytes: &[u8],
    delimiter: u8,
    mapping: &FieldMapping,
) -> Result<Vec<Record>> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(false)
        .from_reader(bytes);
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::MalformedRow {
            path: path.to_path_buf(),
            row: 0,
            message: format!("unreadable header: {e}"),
        })?
        .iter()
        .map(str::to_owned)
        .collect();
    for field in std::iter::once(&mapping.text_field).chain(mapping.id_field.iter()) {
        if !headers.contains(field) {
            return Err(Error::MissingColumn {
                path: path.to_path_buf(),
                field: field.clone(),
            });
        }
    }

    let mut builder = RowBuilder {
        path,
        mapping,
        seen: HashSet::new(),
    };
    let mut records = Vec::new();
    for (ordinal, row) in reader.records().enumerate() {
        let row = row.map_err(|e| Error::MalformedRow {
            path: path.to_path_buf(),
            row: ordinal + 1,
            message: e.to_string(),
        })?;
        let fields = headers
            .iter()
            .cloned()
            .zip(row.iter().map(str::to_owned))
            .collect();
        records.push(builder.build(ordinal, fields, |_| true)?);
    }
    Ok(records)
}

fn read_jsonl(path: &Path, bytes: &[u8], mapping: &FieldMapping) -> Result<Vec<Record>> {
    let mut builder = RowBuilder {
        path,
        mapping,
        seen: HashSet::new(),
    };
    let mut records = Vec::new();
    for (line_no, line) in bytes.split(|&b| b == b'\n').enumerate() {
        let malformed = |message: String| Error::MalformedRow {
            path: path.to_path_buf(),
            row: line_no + 1,
            message,
        };
        let line = line.strip_suffix(b"\r").unwrap_or(line);
        let line = std::str::from_utf8(line).map_err(|e| malformed(format!("invalid UTF-8: {e}")))?;
        if line.trim().is_empty() {
            continue;
        }
        let object: Map<String, Value> =
            serde_json::from_str(line).map_err(|e| malformed(e.to_string()))?;
        let mut fields = BTreeMap::new();
        let mut nulls = BTreeSet::new();
        for (key, value) in object {
            match value {
                Value::Null => {
                    nulls.insert(key);
                }
                Value::String(s) => {
                    fields.insert(key, s);
                }
                Value::Number(_) | Value::Bool(_) => {
                    fields.insert(key, value.to_string());
                }
                Value::Array(_) | Value::Object(_) => {
                    if mapping.is_mapped(&key) {
                        return Err(malformed(format!("field `{key}` is not a scalar")));
                    }
                    fields.insert(key, value.to_string());
                }
            }
        }
        let ordinal = records.len();
        // Report the file line, not the record ordinal, for jsonl.
        let record = builder
            .build(ordinal, fields, |f| nulls.contains(f))
            .map_err(|e| relocate(e, line_no + 1))?;
        records.push(record);
    }
    Ok(records)
}

fn relocate(err: Error, line: usize) -> Error {
    match err {
        Error::MissingField { path, field, .. } => Error::MissingField {
            path,
            row: line,
            field,
        },
        Error::MalformedRow { path, message, .. } => Error::MalformedRow {
            path,
            row: line,
            message,
        },
        other => other,
    }
}

/// Meta keys that collide with canonical column names are written as `meta.<key>`.
fn meta_column(key: &str) -> String {
    if CANONICAL_FIELDS.contains(&key) {
        format!("meta.{key}")
    } else {
        key.to_string()
    }
}

pub fn write_corpus(corpus: &Corpus, path: &Path, format: Format) -> Result<()> {
    let bytes = encode_corpus(corpus, format)?;
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&bytes).map_err(|e| Error::io(path, e))?;
    file.sync_all().map_err(|e| Error::io(path, e))
}

/// The bytes [`write_corpus`] would write.
pub fn encode_corpus(corpus: &Corpus, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv | Format::Tsv => encode_delimited(corpus, format.delimiter()),
        Format::Jsonl => encode_jsonl(corpus),
    }
}

fn encode_delimited(corpus: &Corpus, delimiter: u8) -> Result<Vec<u8>> {
    let meta_keys: BTreeSet<&str> = corpus
        .iter()
        .flat_map(|r| r.meta.keys().map(String::as_str))
        .collect();
    let mut writer = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .terminator(csv::Terminator::Any(b'\n'))
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(Vec::new());
    let header: Vec<String> = CANONICAL_FIELDS
        .iter()
        .map(|s| s.to_string())
        .chain(meta_keys.iter().map(|k| meta_column(k)))
        .collect();
    writer.write_record(&header)?;
    for record in corpus {
        let mut row: Vec<&str> = vec![
            &record.id,
            &record.text,
            record.label.as_deref().unwrap_or(""),
            record.group.as_deref().unwrap_or(""),
        ];
        row.extend(
            meta_keys
                .iter()
                .map(|k| record.meta.get(*k).map(String::as_str).unwrap_or("")),
        );
        writer.write_record(&row)?;
    }
    writer
        .into_inner()
        .map_err(|e| Error::Io {
            path: Default::default(),
            source: e.into_error(),
        })
}

fn encode_jsonl(corpus: &Corpus) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for record in corpus {
        let mut object = Map::new();
        object.insert("id".into(), Value::String(record.id.clone()));
        object.insert("text".into(), Value::String(record.text.clone()));
        if let Some(label) = &record.label {
            object.insert("label".into(), Value::String(label.clone()));
        }
        if let Some(group) = &record.group {
            object.insert("group".into(), Value::String(group.clone()));
        }
        for (k, v) in &record.meta {
            object.insert(meta_column(k), Value::String(v.clone()));
        }
        serde_json::to_writer(&mut out, &object)?;
        out.push(b'\n');
    }
    Ok(out)
}

/// Keeps records with at least `min_tokens` tokens under `counting`.
pub fn filter_short<F>(corpus: &Corpus, config: &FilterConfig, counting: F) -> Result<Corpus>
where
    F: Fn(&str) -> usize,
{
    let min = match config.min_tokens {
        Some(n) if n >= 1 => n,
        Some(_) => return Err(Error::Config("min_tokens must be at least 1".into())),
        None => return Err(Error::Config("min_tokens is not set".into())),
    };
    let kept = corpus
        .iter()
        .filter(|r| counting(&r.text) >= min)
        .cloned()
        .collect();
    Ok(corpus.with_records(kept))
}
