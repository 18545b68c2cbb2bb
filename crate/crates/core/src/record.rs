use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One post.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    /// Verbatim text as read from the source file.
    pub text: String,
    pub label: Option<String>,
    /// Event or topic tag, used by leave-one-out splitting.
    pub group: Option<String>,
    pub meta: BTreeMap<String, String>,
}

impl Record {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Record {
            id: id.into(),
            text: text.into(),
            label: None,
            group: None,
            meta: BTreeMap::new(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn with_group(mut self, group: impl Into<String>) -> Self {
        self.group = Some(group.into());
        self
    }
}

/// Token counting rule for a corpus: words for space-delimited scripts,
/// characters for Chinese-like scripts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Language {
    #[default]
    EnglishLike,
    ChineseLike,
}

impl Language {
    pub fn as_str(self) -> &'static str {
        match self {
            Language::EnglishLike => "english_like",
            Language::ChineseLike => "chinese_like",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Language {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "english_like" | "english" | "en" => Ok(Language::EnglishLike),
            "chinese_like" | "chinese" | "zh" => Ok(Language::ChineseLike),
            other => Err(Error::Config(format!("unknown language `{other}`"))),
        }
    }
}

/// An ordered collection of records with distinct, non-empty ids.
///
/// The id invariant is checked on construction, so every `Corpus` in
/// circulation satisfies it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    records: Vec<Record>,
    pub language: Language,
    pub source: String,
}

impl Corpus {
    pub fn new(records: Vec<Record>, language: Language, source: impl Into<String>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(records.len());
        for (position, record) in records.iter().enumerate() {
            if record.id.is_empty() {
                return Err(Error::EmptyId { position });
            }
            if !seen.insert(record.id.as_str()) {
                return Err(Error::DuplicateId {
                    id: record.id.clone(),
                });
            }
        }
        Ok(Corpus {
            records,
            language,
            source: source.into(),
        })
    }

    /// Builds a corpus from records already known to satisfy the id invariant
    /// (a subsequence of a valid corpus).
    pub(crate) fn with_records(&self, records: Vec<Record>) -> Corpus {
        Corpus {
            records,
            language: self.language,
            source: self.source.clone(),
        }
    }

    /// Convenience constructor for english-like texts with ids "0".."n-1".
    pub fn from_texts<I, S>(texts: I) -> Corpus
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let records = texts
            .into_iter()
            .enumerate()
            .map(|(i, t)| Record::new(i.to_string(), t))
            .collect();
        Corpus {
            records,
            language: Language::EnglishLike,
            source: String::new(),
        }
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn into_records(self) -> Vec<Record> {
        self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Record> {
        self.records.iter()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.records.iter().map(|r| r.id.as_str())
    }

    /// Splits records by a per-position keep mask; both sides stay in corpus order.
    pub(crate) fn partition_by_keep(&self, keep: &[bool]) -> (Corpus, Vec<Record>) {
        debug_assert_eq!(keep.len(), self.records.len());
        let mut kept = Vec::new();
        let mut removed = Vec::new();
        for (record, &k) in self.records.iter().zip(keep) {
            if k {
                kept.push(record.clone());
            } else {
                removed.push(record.clone());
            }
        }
        (self.with_records(kept), removed)
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a Record;
    type IntoIter = std::slice::Iter<'a, Record>;

    fn into_iter(self) -> Self::IntoIter {
        self.records.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_ids() {
        let err = Corpus::new(
            vec![Record::new("42", "a"), Record::new("42", "b")],
            Language::EnglishLike,
            "t",
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateId { ref id } if id == "42"));
    }

    #[test]
    fn rejects_empty_ids() {
        let err = Corpus::new(vec![Record::new("", "a")], Language::EnglishLike, "t").unwrap_err();
        assert!(matches!(err, Error::EmptyId { position: 0 }));
    }

    #[test]
    fn language_parses_aliases() {
        assert_eq!("zh".parse::<Language>().unwrap(), Language::ChineseLike);
        assert_eq!("english-like".parse::<Language>().unwrap(), Language::EnglishLike);
        assert!("klingon".parse::<Language>().is_err());
    }
}
