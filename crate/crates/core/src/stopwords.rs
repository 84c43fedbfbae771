//! Curated stopword lists: storage, membership and removal.
//!
//! Two on-disk formats:
//!
//! * plain: one word per line, UTF-8, LF, code-point order. Blank lines and
//!   lines starting with `#` are ignored on load.
//! * structured: a `#stopcur-stopwords v1` magic line, a `#provenance` line
//!   carrying JSON, then `word<TAB>pos_tag` rows (tag may be empty).
//!
//! Removal uses the same tokenizer as curation, so punctuation and digits are
//! dropped from the output along with the stopwords.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{normalize, token_spans, Token};

const STRUCTURED_MAGIC: &str = "#stopcur-stopwords v1";
const PROVENANCE_PREFIX: &str = "#provenance ";
pub const UNTAGGED: &str = "untagged";

#[derive(Debug, Error)]
pub enum StopwordError {
    #[error("line {line}: duplicate word {word:?} (first seen on line {first})")]
    Duplicate {
        word: String,
        line: usize,
        first: usize,
    },
    #[error("line {line}: {word:?} is not a normalized single token")]
    NotNormalized { word: String, line: usize },
    #[error("refusing to save an empty stopword list")]
    Empty,
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, StopwordError>;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corpus_checksum: Option<String>,
    #[serde(default)]
    pub config: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_at: Option<DateTime<Utc>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopwordList {
    words: BTreeSet<String>,
    pos_tags: BTreeMap<String, String>,
    pub provenance: Provenance,
}

fn checked_word(word: &str, line: usize) -> Result<String> {
    Token::parse(word)
        .map(Token::into_string)
        .ok_or_else(|| StopwordError::NotNormalized {
            word: word.to_owned(),
            line,
        })
}

impl StopwordList {
    /// Builds a list from words that must already be normalized tokens.
    /// `line` in errors is the 1-based position in the input.
    pub fn from_words<I, S>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut list = StopwordList::default();
        let mut first_seen = HashMap::new();
        for (i, w) in words.into_iter().enumerate() {
            list.insert_checked(w.as_ref(), i + 1, &mut first_seen)?;
        }
        Ok(list)
    }

    fn insert_checked(
        &mut self,
        word: &str,
        line: usize,
        first_seen: &mut HashMap<String, usize>,
    ) -> Result<String> {
        let w = checked_word(word, line)?;
        if let Some(&first) = first_seen.get(&w) {
            return Err(StopwordError::Duplicate {
                word: w,
                line,
                first,
            });
        }
        first_seen.insert(w.clone(), line);
        self.words.insert(w.clone());
        Ok(w)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    pub fn pos_tag(&self, word: &str) -> Option<&str> {
        self.pos_tags.get(word).map(String::as_str)
    }

    pub fn pos_tags(&self) -> &BTreeMap<String, String> {
        &self.pos_tags
    }

    /// Attaches tags for words that are in the list; others are ignored.
    pub fn set_pos_tags(&mut self, tags: &PosMap) {
        for w in &self.words {
            if let Some(t) = tags.get(w) {
                self.pos_tags.insert(w.clone(), t.to_owned());
            }
        }
    }

    /// Exact membership after normalizing the query.
    pub fn is_stopword(&self, term: &str) -> bool {
        self.words.contains(&normalize(term))
    }

    fn contains_normalized(&self, term: &str) -> bool {
        self.words.contains(term)
    }

    /// Normalizes and tokenizes `text`, drops list members, and joins the
    /// remaining tokens with single spaces.
    pub fn remove_stopwords(&self, text: &str) -> String {
        let norm = normalize(text);
        let mut out = String::with_capacity(norm.len());
        for tok in token_spans(&norm).filter(|t| !self.contains_normalized(t)) {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(tok);
        }
        out
    }

    pub fn write_plain<W: Write>(&self, mut w: W) -> io::Result<()> {
        for word in &self.words {
            writeln!(w, "{word}")?;
        }
        w.flush()
    }

    pub fn write_structured<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{STRUCTURED_MAGIC}")?;
        writeln!(
            w,
            "{PROVENANCE_PREFIX}{}",
            serde_json::to_string(&self.provenance).expect("provenance serializes")
        )?;
        for word in &self.words {
            let tag = self.pos_tags.get(word).map_or("", String::as_str);
            writeln!(w, "{word}\t{tag}")?;
        }
        w.flush()
    }

    pub fn save_plain(&self, path: impl AsRef<Path>) -> Result<()> {
        if self.is_empty() {
            return Err(StopwordError::Empty);
        }
        self.write_plain(BufWriter::new(File::create(path)?))?;
        Ok(())
    }

    pub fn save_structured(&self, path: impl AsRef<Path>) -> Result<()> {
        if self.is_empty() {
            return Err(StopwordError::Empty);
        }
        self.write_structured(BufWriter::new(File::create(path)?))?;
        Ok(())
    }

    /// Parses either format, detected by the magic first line.
    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut list = StopwordList::default();
        let mut first_seen = HashMap::new();
        let mut structured = false;
        for (i, line) in r.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line_no == 1 && line == STRUCTURED_MAGIC {
                structured = true;
                continue;
            }
            if structured {
                if let Some(json) = line.strip_prefix(PROVENANCE_PREFIX) {
                    list.provenance =
                        serde_json::from_str(json).map_err(|e| StopwordError::Malformed {
                            line: line_no,
                            reason: format!("bad provenance: {e}"),
                        })?;
                    continue;
                }
            }
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if structured {
                let (word, tag) =
                    line.split_once('\t')
                        .ok_or_else(|| StopwordError::Malformed {
                            line: line_no,
                            reason: "expected word<TAB>pos_tag".into(),
                        })?;
                let w = list.insert_checked(word, line_no, &mut first_seen)?;
                if !tag.is_empty() {
                    list.pos_tags.insert(w, tag.to_owned());
                }
            } else {
                list.insert_checked(line, line_no, &mut first_seen)?;
            }
        }
        Ok(list)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        StopwordList::read_from(BufReader::new(File::open(path)?))
    }
}

/// External word → POS tag table, read from `word<TAB>tag` lines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PosMap(BTreeMap<String, String>);

impl PosMap {
    pub fn get(&self, word: &str) -> Option<&str> {
        self.0.get(word).map(String::as_str)
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = |reason: &str| StopwordError::Malformed {
                line: i + 1,
                reason: reason.to_owned(),
            };
            let (word, tag) = line
                .split_once('\t')
                .ok_or_else(|| malformed("expected word<TAB>tag"))?;
            let tag = tag.trim();
            if tag.is_empty() || tag.contains('\t') {
                return Err(malformed("tag must be a single non-empty field"));
            }
            let word = normalize(word);
            if word.is_empty() {
                return Err(malformed("empty word"));
            }
            map.insert(word, tag.to_owned());
        }
        Ok(PosMap(map))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        PosMap::read_from(BufReader::new(File::open(path)?))
    }
}

impl From<BTreeMap<String, String>> for PosMap {
    fn from(m: BTreeMap<String, String>) -> Self {
        PosMap(m.into_iter().map(|(w, t)| (normalize(&w), t)).collect())
    }
}

/// Count of list words per tag; words the map does not cover count under
/// [`UNTAGGED`].
pub fn categorize(list: &StopwordList, pos: &PosMap) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for w in list.words() {
        let tag = pos.get(w).unwrap_or(UNTAGGED);
        *counts.entry(tag.to_owned()).or_insert(0) += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;
    use proptest::prelude::*;

    fn list(words: &[&str]) -> StopwordList {
        StopwordList::from_words(words).unwrap()
    }

    #[test]
    fn remove_examples() {
        let l = list(&["आणि"]);
        assert_eq!(l.remove_stopwords("अ आणि ब"), "अ ब");
        assert_eq!(l.remove_stopwords(""), "");
        assert_eq!(l.remove_stopwords("आणि  आणि"), "");
        assert_eq!(l.remove_stopwords("तो, आणि ती!"), "तो ती");
    }

    #[test]
    fn membership_normalizes_query() {
        let l = list(&["the", "\u{0915}\u{093C}"]);
        assert!(l.is_stopword("the"));
        assert!(l.is_stopword("  THE "));
        assert!(l.is_stopword("\u{0958}"));
        assert!(!l.is_stopword("cat"));
    }

    #[test]
    fn plain_load_rejects_duplicates_and_unnormalized() {
        match StopwordList::read_from(&b"a\na\n"[..]) {
            Err(StopwordError::Duplicate { line, first, .. }) => {
                assert_eq!((line, first), (2, 1));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            StopwordList::read_from(&b"ok\nNotLower\n"[..]),
            Err(StopwordError::NotNormalized { line: 2, .. })
        ));
        assert!(matches!(
            StopwordList::read_from(&b"two words\n"[..]),
            Err(StopwordError::NotNormalized { .. })
        ));
        let l = StopwordList::read_from(&b"# comment\nb\r\n\na\n"[..]).unwrap();
        assert_eq!(l.words().collect::<Vec<_>>(), ["a", "b"]);
    }

    #[test]
    fn plain_file_is_sorted_one_per_line() {
        // 20 x 20 two-consonant Devanagari words
        let consonant = |i: u32| char::from_u32(0x0915 + i).unwrap();
        let words: Vec<String> = (0..400)
            .map(|i| format!("{}{}", consonant(i % 20), consonant(i / 20)))
            .collect();
        let l = StopwordList::from_words(&words).unwrap();
        assert_eq!(l.len(), 400);
        let mut buf = Vec::new();
        l.write_plain(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 400);
        assert!(text.ends_with('\n'));
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn structured_round_trip() {
        let mut l = list(&["आणि", "तो", "the"]);
        l.pos_tags.insert("आणि".into(), "CCONJ".into());
        l.provenance = Provenance {
            session_id: Some("abc".into()),
            corpus_checksum: Some("00ff".into()),
            config: [("k".to_string(), "5000".to_string())].into(),
            created_at: Some(Utc.with_ymd_and_hms(2024, 2, 3, 4, 5, 6).unwrap()),
        };
        let mut buf = Vec::new();
        l.write_structured(&mut buf).unwrap();
        let back = StopwordList::read_from(&buf[..]).unwrap();
        assert_eq!(back, l);
    }

    #[test]
    fn save_rejects_empty() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            StopwordList::default().save_plain(dir.path().join("x")),
            Err(StopwordError::Empty)
        ));
    }

    #[test]
    fn categorize_examples() {
        let l = list(&["a", "b", "c"]);
        let all_pron = PosMap::read_from(&b"a\tPRON\nb\tPRON\nc\tPRON\n"[..]).unwrap();
        assert_eq!(categorize(&l, &all_pron), [("PRON".to_string(), 3)].into());
        assert_eq!(
            categorize(&l, &PosMap::default()),
            [(UNTAGGED.to_string(), 3)].into()
        );
        let two = PosMap::read_from(&b"a\tPRON\nb\tADP\n"[..]).unwrap();
        let c = categorize(&l, &two);
        assert_eq!(c.values().sum::<usize>(), 3);
        assert_eq!(c[UNTAGGED], 1);
        assert!(matches!(
            PosMap::read_from(&b"a PRON\n"[..]),
            Err(StopwordError::Malformed { line: 1, .. })
        ));
        assert!(PosMap::read_from(&b"a\t\n"[..]).is_err());
    }

    fn words() -> impl Strategy<Value = Vec<&'static str>> {
        prop::collection::vec(
            prop::sample::select(vec![
                "a",
                "b",
                "c",
                "d",
                "e",
                "आणि",
                "तो",
                "मी",
                "हे",
                "ते",
                "आहे",
            ]),
            0..12,
        )
    }

    fn text() -> impl Strategy<Value = String> {
        prop::collection::vec(
            prop::sample::select(vec![
                "a",
                "b",
                "c",
                "d",
                "e",
                "आणि",
                "तो",
                "मी",
                "हे",
                "ते",
                "आहे",
                ",",
                ".",
                "।",
                "१२",
                "A",
                " ",
                "  ",
                "क\u{200C}",
                "x",
            ]),
            0..30,
        )
        .prop_map(|v| v.join(" "))
    }

    fn sw(ws: &[&str]) -> StopwordList {
        let set: BTreeSet<&str> = ws.iter().copied().collect();
        StopwordList::from_words(set).unwrap()
    }

    proptest! {
        #[test]
        fn removal_is_idempotent(t in text(), ws in words()) {
            let l = sw(&ws);
            let once = l.remove_stopwords(&t);
            prop_assert_eq!(l.remove_stopwords(&once), once);
        }

        #[test]
        fn removal_is_complete_and_ordered(t in text(), ws in words()) {
            let l = sw(&ws);
            let out = l.remove_stopwords(&t);
            let kept: Vec<&str> = out.split(' ').filter(|s| !s.is_empty()).collect();
            prop_assert!(kept.iter().all(|w| !l.is_stopword(w)));
            let norm = normalize(&t);
            let expected: Vec<&str> = token_spans(&norm).filter(|w| !l.is_stopword(w)).collect();
            prop_assert_eq!(kept, expected);
        }

        #[test]
        fn bigger_list_never_keeps_more(t in text(), ws in words(), extra in words()) {
            let small = sw(&ws);
            let mut all = ws.clone();
            all.extend(extra);
            let big = sw(&all);
            let n = |s: String| token_spans(&s).count();
            prop_assert!(n(big.remove_stopwords(&t)) <= n(small.remove_stopwords(&t)));
        }

        #[test]
        fn plain_round_trip(ws in words()) {
            let l = sw(&ws);
            let mut buf = Vec::new();
            l.write_plain(&mut buf).unwrap();
            prop_assert_eq!(StopwordList::read_from(&buf[..]).unwrap(), l);
        }
    }
}
