//! Mention/URL unification and comparison keys.
//!
//! Patterns, applied after canonical (NFC) composition, leftmost-first:
//!
//! * URL: `http://`, `https://` or `www.` (ASCII case-insensitive) at a word
//!   boundary, followed by any run of non-whitespace.
//! * Mention: `@` followed by one or more word characters, where a word
//!   character is alphabetic, numeric, a combining mark or `_`. Trailing
//!   punctuation stays outside the mention; a lone `@` is untouched.
//!
//! Marks are word characters so that a mark following a mention is consumed
//! with it; otherwise it could compose with the placeholder's last letter on a
//! second pass and break idempotence.

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::record::Language;

static TOKEN_PATTERN: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?P<url>\b(?i:https?://|www\.)\S*)|(?P<mention>@[\p{Alphabetic}\p{N}\p{M}_]+)")
        .expect("static pattern")
});

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnicodeForm {
    /// Canonical composition (NFC).
    #[default]
    Composed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct NormalizationConfig {
    pub mention_placeholder: String,
    pub url_placeholder: String,
    /// Case-fold comparison keys. Emitted text is never case-folded.
    pub lowercase_key: bool,
    pub unicode_form: UnicodeForm,
    pub collapse_whitespace: bool,
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        NormalizationConfig {
            mention_placeholder: "@USER".to_string(),
            url_placeholder: "URL".to_string(),
            lowercase_key: true,
            unicode_form: UnicodeForm::Composed,
            collapse_whitespace: true,
        }
    }
}

/// Replaces mentions and URLs with the configured placeholders.
pub fn normalize_text(raw: &str, config: &NormalizationConfig) -> String {
    let composed: String = match config.unicode_form {
        UnicodeForm::Composed => raw.nfc().collect(),
    };

    let mut replaced = String::with_capacity(composed.len());
    let mut last = 0;
    for caps in TOKEN_PATTERN.captures_iter(&composed) {
        let (m, placeholder) = match caps.name("url") {
            Some(m) => (m, &config.url_placeholder),
            None => (caps.name("mention").expect("one arm matched"), &config.mention_placeholder),
        };
        replaced.push_str(&composed[last..m.start()]);
        replaced.push_str(placeholder);
        last = m.end();
    }
    replaced.push_str(&composed[last..]);

    if config.collapse_whitespace {
        collapse_whitespace(&replaced)
    } else {
        replaced
    }
}

fn collapse_whitespace(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for word in s.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Normalized text, case-folded when `lowercase_key` is set.
pub fn comparison_key(raw: &str, config: &NormalizationConfig) -> String {
    let normalized = normalize_text(raw, config);
    if config.lowercase_key {
        normalized.to_lowercase()
    } else {
        normalized
    }
}

/// Whitespace-separated tokens for english-like text, non-whitespace
/// characters for chinese-like text.
pub fn token_count(text: &str, language: Language) -> usize {
    match language {
        Language::EnglishLike => text.split_whitespace().count(),
        Language::ChineseLike => text.chars().filter(|c| !c.is_whitespace()).count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm(s: &str) -> String {
        normalize_text(s, &NormalizationConfig::default())
    }

    #[test]
    fn replaces_mentions_and_urls() {
        assert_eq!(norm("@john check https://t.co/abc now"), "@USER check URL now");
    }

    #[test]
    fn placeholders_are_fixed_points() {
        assert_eq!(norm("@USER URL"), "@USER URL");
    }

    #[test]
    fn trailing_punctuation_is_not_part_of_a_mention() {
        assert_eq!(norm("thanks @bob!"), "thanks @USER!");
        assert_eq!(norm("@a_b, @c"), "@USER, @USER");
    }

    #[test]
    fn lone_at_sign_is_untouched() {
        assert_eq!(norm("meet @ noon"), "meet @ noon");
        assert_eq!(norm("@"), "@");
    }

    #[test]
    fn url_consumes_trailing_non_whitespace() {
        assert_eq!(norm("RT   @a_b  www.x.com/page!!"), "RT @USER URL");
        assert_eq!(norm("see HTTP://X.Y/z."), "see URL");
    }

    #[test]
    fn www_inside_a_word_is_not_a_url() {
        assert_eq!(norm("awww.yes"), "awww.yes");
    }

    #[test]
    fn hashtags_and_emoji_untouched() {
        assert_eq!(norm("#votebluenomatterwho 😀"), "#votebluenomatterwho 😀");
    }

    #[test]
    fn whitespace_collapse_can_be_disabled() {
        let cfg = NormalizationConfig {
            collapse_whitespace: false,
            ..Default::default()
        };
        assert_eq!(normalize_text(" a  @b ", &cfg), " a  @USER ");
    }

    #[test]
    fn composes_before_matching() {
        // e + combining acute composes to é, which is a word character.
        assert_eq!(norm("cafe\u{301}"), "caf\u{e9}");
        assert_eq!(norm("@jose\u{301} hi"), "@USER hi");
    }

    #[test]
    fn mark_after_mention_does_not_recompose() {
        let once = norm("@q\u{301}x");
        assert_eq!(norm(&once), once);
    }

    #[test]
    fn keys_fold_case_only_in_normalized_mode() {
        let cfg = NormalizationConfig::default();
        assert_eq!(comparison_key("Hello @a", &cfg), comparison_key("hello @b", &cfg));
        assert_eq!(comparison_key("Hello @a", &cfg), "hello @user");
    }

    #[test]
    fn token_counts() {
        assert_eq!(token_count("a b  c", Language::EnglishLike), 3);
        assert_eq!(token_count("", Language::EnglishLike), 0);
        assert_eq!(token_count("", Language::ChineseLike), 0);
        assert_eq!(token_count("我爱 北京", Language::ChineseLike), 4);
    }
}
