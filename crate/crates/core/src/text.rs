//! Unicode normalization and tokenization shared by curation and removal.
//!
//! Every stage of the toolkit goes through [`normalize`] and [`tokenize`], so a
//! word counted during TF-IDF scoring is byte-identical to the word matched when
//! a finished list is applied to new text.
//!
//! A token is a maximal run of letters (`L*`) and combining marks (`M*`).
//! Anything else (whitespace, punctuation, symbols, digits of any script,
//! format characters) separates tokens. Devanagari matras, nukta, anusvara and
//! virama are all marks, so they stay attached to their base consonant.

use std::fmt;

use unicode_general_category::{get_general_category, GeneralCategory};
use unicode_normalization::UnicodeNormalization;
use unicode_script::{Script, UnicodeScript};

const ZWNJ: char = '\u{200C}';
const ZWJ: char = '\u{200D}';

/// A normalized word surface.
///
/// Construction goes through [`tokenize`] or [`Token::parse`], so every value
/// is NFC, lowercase for Latin, and made only of letters and combining marks.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token(String);

impl Token {
    /// Accepts `s` only if it is already a single well-formed token.
    pub fn parse(s: &str) -> Option<Token> {
        if s.is_empty() || normalize(s) != s {
            return None;
        }
        if s.chars().all(is_token_char) {
            Some(Token(s.to_owned()))
        } else {
            None
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl From<Token> for String {
    fn from(t: Token) -> String {
        t.0
    }
}

/// Characters that may appear inside a token.
pub fn is_token_char(c: char) -> bool {
    use GeneralCategory::*;
    matches!(
        get_general_category(c),
        UppercaseLetter
            | LowercaseLetter
            | TitlecaseLetter
            | ModifierLetter
            | OtherLetter
            | NonspacingMark
            | SpacingMark
            | EnclosingMark
    )
}

fn fold_latin(c: char, out: &mut String) {
    if c.is_uppercase() && c.script() == Script::Latin {
        out.extend(c.to_lowercase());
    } else {
        out.push(c);
    }
}

/// Canonicalizes raw sentence text.
///
/// Steps, in order: drop ZWJ/ZWNJ, lowercase Latin-script letters, compose to
/// NFC, collapse whitespace runs to one ASCII space and trim the ends.
pub fn normalize(text: &str) -> String {
    let mut folded = String::with_capacity(text.len());
    for c in text.chars() {
        if c == ZWJ || c == ZWNJ {
            continue;
        }
        fold_latin(c, &mut folded);
    }

    let mut out = String::with_capacity(folded.len());
    let mut pending_space = false;
    for c in folded.nfc() {
        if c.is_whitespace() {
            pending_space = !out.is_empty();
            continue;
        }
        if pending_space {
            out.push(' ');
            pending_space = false;
        }
        out.push(c);
    }
    out
}

/// True when `text` normalizes to the empty string.
pub fn is_blank(text: &str) -> bool {
    text.chars()
        .all(|c| c.is_whitespace() || c == ZWJ || c == ZWNJ)
}

/// Borrowing tokenizer; yields slices of the input.
pub fn token_spans(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !is_token_char(c))
        .filter(|s| !s.is_empty())
}

/// Splits normalized text into tokens, preserving input order.
pub fn tokenize(text: &str) -> Vec<Token> {
    token_spans(text).map(|s| Token(s.to_owned())).collect()
}

/// Convenience for raw input: `tokenize(&normalize(text))`.
pub fn tokenize_raw(text: &str) -> Vec<Token> {
    tokenize(&normalize(text))
}
