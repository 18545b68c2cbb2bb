//! Plain `key = value` files used for run configs and split manifests.
//!
//! One pair per line; `#` starts a comment line; blank lines are ignored.
//! Keys and values are trimmed. Output is sorted by key.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::near_dup::NearDupConfig;
use crate::normalize::NormalizationConfig;

pub type KeyValues = BTreeMap<String, String>;

pub fn parse(text: &str) -> Result<KeyValues> {
    let mut out = KeyValues::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Config(format!("line {}: empty key", i + 1)));
        }
        if out.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key `{key}`", i + 1)));
        }
    }
    Ok(out)
}

pub fn format(pairs: &KeyValues) -> String {
    let mut out = String::new();
    for (k, v) in pairs {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(v);
        out.push('\n');
    }
    out
}

pub fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Config(format!("`{key}`: expected a boolean, got `{value}`"))),
    }
}

pub fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| Error::Config(format!("`{key}`: {e}")))
}

impl NormalizationConfig {
    pub fn to_kv(&self, out: &mut KeyValues) {
        out.insert("mention_placeholder".into(), self.mention_placeholder.clone());
        out.insert("url_placeholder".into(), self.url_placeholder.clone());
        out.insert("lowercase_key".into(), self.lowercase_key.to_string());
        out.insert("unicode_form".into(), "composed".into());
        out.insert("collapse_whitespace".into(), self.collapse_whitespace.to_string());
    }

    /// Reads known keys from `kv`, leaving other fields at their current values.
    pub fn apply_kv(&mut self, kv: &KeyValues) -> Result<()> {
        if let Some(v) = kv.get("mention_placeholder") {
            self.mention_placeholder = v.clone();
        }
        if let Some(v) = kv.get("url_placeholder") {
            self.url_placeholder = v.clone();
        }
        if let Some(v) = kv.get("lowercase_key") {
            self.lowercase_key = parse_bool("lowercase_key", v)?;
        }
        if let Some(v) = kv.get("unicode_form") {
            if v != "composed" {
                return Err(Error::Config(format!("`unicode_form`: unsupported `{v}`")));
            }
        }
        if let Some(v) = kv.get("collapse_whitespace") {
            self.collapse_whitespace = parse_bool("collapse_whitespace", v)?;
        }
        Ok(())
    }
}

impl NearDupConfig {
    pub fn to_kv(&self, out: &mut KeyValues) {
        out.insert("neardup_threshold".into(), self.threshold.to_string());
        out.insert("neardup_mode".into(), self.mode.to_string());
        out.insert("neardup_ratio".into(), self.ratio.to_string());
    }

    pub fn apply_kv(&mut self, kv: &KeyValues) -> Result<()> {
        if let Some(v) = kv.get("neardup_threshold") {
            self.threshold = parse_value("neardup_threshold", v)?;
        }
        if let Some(v) = kv.get("neardup_mode") {
            self.mode = v.parse()?;
        }
        if let Some(v) = kv.get("neardup_ratio") {
            self.ratio = parse_value("neardup_ratio", v)?;
        }
        self.validate()
    }
}
