//! Corpus ingestion, contiguous chunking and per-chunk term statistics.
//!
//! A corpus is a UTF-8 file with one sentence per line (LF or CRLF). A
//! "sentence" is a line that is non-empty after [`normalize`]; blank lines are
//! skipped and do not consume a sentence index. Each sentence is one document
//! for the purpose of document frequency.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::text::{is_blank, normalize, token_spans};

/// Byte offset of every `CHECKPOINT_STRIDE`-th sentence is recorded at ingest
/// so chunk scans can seek instead of re-reading the prefix.
const CHECKPOINT_STRIDE: u64 = 1 << 14;

const STATS_MAGIC: &str = "#stopcur-chunk-stats v1";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus file not found: {0}")]
    NotFound(PathBuf),
    #[error("invalid UTF-8 at byte offset {offset} (line {line})")]
    InvalidUtf8 { offset: u64, line: u64 },
    #[error("empty corpus: no non-empty lines")]
    Empty,
    #[error("n_chunks must be at least 1")]
    ZeroChunks,
    #[error("n_chunks ({n_chunks}) exceeds n_sentences ({n_sentences})")]
    TooManyChunks { n_chunks: u64, n_sentences: u64 },
    #[error("chunk {index} covers sentences {first}..={last} but corpus has {n_sentences}")]
    ForeignChunk {
        index: usize,
        first: u64,
        last: u64,
        n_sentences: u64,
    },
    #[error("corpus file changed since ingest (expected {expected} bytes, found {found})")]
    Changed { expected: u64, found: u64 },
    #[error("I/O error at line {line}: {source}")]
    Read { line: u64, source: io::Error },
    #[error("malformed chunk stats file at line {line}: {reason}")]
    MalformedStats { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = CorpusError> = std::result::Result<T, E>;

/// Summary of an ingested corpus file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusHandle {
    pub path: PathBuf,
    pub n_sentences: u64,
    pub byte_len: u64,
    /// Lowercase hex SHA-256 of the raw file bytes.
    pub checksum: String,
    /// 1-based physical line numbers of skipped blank lines (first 1000 only).
    pub blank_lines: Vec<u64>,
    pub n_blank_lines: u64,
    /// (sentence index, byte offset) pairs, one per stride.
    checkpoints: Vec<(u64, u64)>,
}

const MAX_REPORTED_BLANKS: usize = 1000;

impl CorpusHandle {
    fn seek_point(&self, sentence: u64) -> (u64, u64) {
        let i = self
            .checkpoints
            .partition_point(|&(idx, _)| idx <= sentence)
            .saturating_sub(1);
        self.checkpoints.get(i).copied().unwrap_or((0, 0))
    }

    /// Streams the sentences with index in `first..=last`, calling `f` with
    /// the sentence index and the raw line (line terminator stripped).
    pub fn for_each_sentence<F>(&self, first: u64, last: u64, mut f: F) -> Result<()>
    where
        F: FnMut(u64, &str),
    {
        let mut file = File::open(&self.path).map_err(|e| open_error(&self.path, e))?;
        let found = file.metadata()?.len();
        if found != self.byte_len {
            return Err(CorpusError::Changed {
                expected: self.byte_len,
                found,
            });
        }
        let (mut sentence, offset) = self.seek_point(first);
        file.seek(SeekFrom::Start(offset))?;
        let mut lines = LineReader::new(BufReader::with_capacity(1 << 16, file), offset);
        while sentence <= last {
            let Some(line) = lines.next_line()? else {
                break;
            };
            if is_blank(line.text) {
                continue;
            }
            if sentence >= first {
                f(sentence, line.text);
            }
            sentence += 1;
        }
        Ok(())
    }

    /// Streams every sentence of the corpus.
    pub fn for_each(&self, f: impl FnMut(u64, &str)) -> Result<()> {
        if self.n_sentences == 0 {
            return Ok(());
        }
        self.for_each_sentence(0, self.n_sentences - 1, f)
    }
}

fn open_error(path: &Path, e: io::Error) -> CorpusError {
    if e.kind() == io::ErrorKind::NotFound {
        CorpusError::NotFound(path.to_path_buf())
    } else {
        CorpusError::Io(e)
    }
}

struct Line<'a> {
    text: &'a str,
    offset: u64,
}

/// Reads LF-terminated lines, validating UTF-8 and tracking byte offsets.
struct LineReader<R> {
    inner: R,
    buf: Vec<u8>,
    offset: u64,
    line_no: u64,
}

impl<R: BufRead> LineReader<R> {
    fn new(inner: R, offset: u64) -> Self {
        LineReader {
            inner,
            buf: Vec::new(),
            offset,
            line_no: 0,
        }
    }

    fn next_line(&mut self) -> Result<Option<Line<'_>>> {
        self.buf.clear();
        let start = self.offset;
        let n = self
            .inner
            .read_until(b'\n', &mut self.buf)
            .map_err(|source| CorpusError::Read {
                line: self.line_no + 1,
                source,
            })?;
        if n == 0 {
            return Ok(None);
        }
        self.offset += n as u64;
        self.line_no += 1;
        let mut end = self.buf.len();
        if self.buf[..end].ends_with(b"\n") {
            end -= 1;
        }
        if self.buf[..end].ends_with(b"\r") {
            end -= 1;
        }
        let text = std::str::from_utf8(&self.buf[..end]).map_err(|e| CorpusError::InvalidUtf8 {
            offset: start + e.valid_up_to() as u64,
            line: self.line_no,
        })?;
        Ok(Some(Line {
            text,
            offset: start,
        }))
    }
}

/// Validates `path` and counts its sentences in one streaming pass.
pub fn ingest(path: impl AsRef<Path>) -> Result<CorpusHandle> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| open_error(path, e))?;
    let mut reader = LineReader::new(BufReader::with_capacity(1 << 16, file), 0);
    let mut hasher = Sha256::new();
    let mut n_sentences = 0u64;
    let mut blank_lines = Vec::new();
    let mut n_blank_lines = 0u64;
    let mut checkpoints = Vec::new();

    loop {
        let line_no = reader.line_no + 1;
        let Some(line) = reader.next_line()? else {
            break;
        };
        if is_blank(line.text) {
            n_blank_lines += 1;
            if blank_lines.len() < MAX_REPORTED_BLANKS {
                blank_lines.push(line_no);
            }
        } else {
            if n_sentences.is_multiple_of(CHECKPOINT_STRIDE) {
                checkpoints.push((n_sentences, line.offset));
            }
            n_sentences += 1;
        }
        hasher.update(&reader.buf);
    }

    if n_sentences == 0 {
        return Err(CorpusError::Empty);
    }
    Ok(CorpusHandle {
        path: path.to_path_buf(),
        n_sentences,
        byte_len: reader.offset,
        checksum: hex(&hasher.finalize()),
        blank_lines,
        n_blank_lines,
        checkpoints,
    })
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        let _ = write!(s, "{b:02x}");
    }
    s
}

/// A contiguous run of sentences, `first_line..=last_line` (sentence indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChunkDescriptor {
    pub index: usize,
    pub first_line: u64,
    pub last_line: u64,
    pub n_sentences: u64,
}

/// Splits `n_sentences` into `n_chunks` contiguous chunks whose sizes differ
/// by at most one; the first `n_sentences % n_chunks` chunks get the extra
/// sentence.
pub fn chunk_ranges(n_sentences: u64, n_chunks: u64) -> Result<Vec<ChunkDescriptor>> {
    if n_chunks == 0 {
        return Err(CorpusError::ZeroChunks);
    }
    if n_chunks > n_sentences {
        return Err(CorpusError::TooManyChunks {
            n_chunks,
            n_sentences,
        });
    }
    let base = n_sentences / n_chunks;
    let extra = n_sentences % n_chunks;
    let mut next = 0u64;
    Ok((0..n_chunks)
        .map(|i| {
            let size = base + u64::from(i < extra);
            let d = ChunkDescriptor {
                index: i as usize,
                first_line: next,
                last_line: next + size - 1,
                n_sentences: size,
            };
            next += size;
            d
        })
        .collect())
}

pub fn chunk(corpus: &CorpusHandle, n_chunks: u64) -> Result<Vec<ChunkDescriptor>> {
    chunk_ranges(corpus.n_sentences, n_chunks)
}

/// Occurrence and document counts for one term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TermCounts {
    pub count: u64,
    pub doc_freq: u64,
}

/// Exact term statistics for one chunk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkStats {
    pub chunk: ChunkDescriptor,
    pub terms: HashMap<String, TermCounts>,
    pub total_tokens: u64,
    pub n_docs: u64,
}

impl ChunkStats {
    pub fn new(chunk: ChunkDescriptor) -> Self {
        ChunkStats {
            chunk,
            terms: HashMap::new(),
            total_tokens: 0,
            n_docs: 0,
        }
    }

    /// Counts one sentence. Text is normalized and tokenized here.
    pub fn add_sentence(&mut self, raw: &str) {
        let text = normalize(raw);
        self.n_docs += 1;
        let mut toks: Vec<&str> = token_spans(&text).collect();
        self.total_tokens += toks.len() as u64;
        for &tok in &toks {
            match self.terms.get_mut(tok) {
                Some(c) => c.count += 1,
                None => {
                    self.terms.insert(
                        tok.to_owned(),
                        TermCounts {
                            count: 1,
                            doc_freq: 0,
                        },
                    );
                }
            }
        }
        toks.sort_unstable();
        toks.dedup();
        for tok in toks {
            if let Some(c) = self.terms.get_mut(tok) {
                c.doc_freq += 1;
            }
        }
    }

    pub fn term_count(&self, term: &str) -> u64 {
        self.terms.get(term).map_or(0, |c| c.count)
    }

    pub fn doc_freq(&self, term: &str) -> u64 {
        self.terms.get(term).map_or(0, |c| c.doc_freq)
    }

    pub fn vocabulary_size(&self) -> usize {
        self.terms.len()
    }

    /// Terms in code-point order.
    pub fn sorted_terms(&self) -> Vec<(&str, TermCounts)> {
        let mut v: Vec<_> = self.terms.iter().map(|(t, c)| (t.as_str(), *c)).collect();
        v.sort_unstable_by(|a, b| a.0.cmp(b.0));
        v
    }

    /// Field-wise sum with another chunk's counts. The descriptor is widened
    /// to cover both ranges.
    pub fn merge(&mut self, other: &ChunkStats) {
        for (t, c) in &other.terms {
            let e = self.terms.entry(t.clone()).or_default();
            e.count += c.count;
            e.doc_freq += c.doc_freq;
        }
        self.total_tokens += other.total_tokens;
        self.n_docs += other.n_docs;
        self.chunk.first_line = self.chunk.first_line.min(other.chunk.first_line);
        self.chunk.last_line = self.chunk.last_line.max(other.chunk.last_line);
        self.chunk.n_sentences += other.chunk.n_sentences;
    }

    /// Writes the stats as tab-separated `term count doc_freq` rows after a
    /// header recording the chunk and totals.
    pub fn write_to<W: Write>(&self, mut w: W, corpus_checksum: &str) -> io::Result<()> {
        writeln!(w, "{STATS_MAGIC}")?;
        writeln!(
            w,
            "#chunk={} first_line={} last_line={} n_sentences={} n_docs={} total_tokens={} corpus_sha256={}",
            self.chunk.index,
            self.chunk.first_line,
            self.chunk.last_line,
            self.chunk.n_sentences,
            self.n_docs,
            self.total_tokens,
            corpus_checksum
        )?;
        for (t, c) in self.sorted_terms() {
            writeln!(w, "{t}\t{}\t{}", c.count, c.doc_freq)?;
        }
        w.flush()
    }

    pub fn save(&self, path: impl AsRef<Path>, corpus_checksum: &str) -> io::Result<()> {
        let f = BufWriter::new(File::create(path)?);
        self.write_to(f, corpus_checksum)
    }

    /// Parses a file written by [`ChunkStats::write_to`]; returns the stats
    /// and the corpus checksum from the header.
    pub fn read_from<R: BufRead>(r: R) -> Result<(ChunkStats, String)> {
        let bad = |line: usize, reason: &str| CorpusError::MalformedStats {
            line,
            reason: reason.to_owned(),
        };
        let mut lines = r.lines().enumerate();
        let magic = match lines.next() {
            Some((_, l)) => l?,
            None => String::new(),
        };
        if magic != STATS_MAGIC {
            return Err(bad(1, "missing header"));
        }
        let header = match lines.next() {
            Some((_, l)) => l?,
            None => return Err(bad(2, "missing totals line")),
        };
        let fields: HashMap<&str, &str> = header
            .trim_start_matches('#')
            .split(' ')
            .filter_map(|kv| kv.split_once('='))
            .collect();
        let num = |k: &str| -> Result<u64> {
            fields
                .get(k)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| bad(2, &format!("missing or invalid {k}")))
        };
        let chunk = ChunkDescriptor {
            index: num("chunk")? as usize,
            first_line: num("first_line")?,
            last_line: num("last_line")?,
            n_sentences: num("n_sentences")?,
        };
        let checksum = fields
            .get("corpus_sha256")
            .ok_or_else(|| bad(2, "missing corpus_sha256"))?
            .to_string();
        let mut stats = ChunkStats::new(chunk);
        stats.n_docs = num("n_docs")?;
        stats.total_tokens = num("total_tokens")?;
        let mut sum = 0u64;
        for (i, l) in lines {
            let l = l?;
            let mut parts = l.split('\t');
            let (Some(t), Some(c), Some(d), None) =
                (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(bad(i + 1, "expected term<TAB>count<TAB>doc_freq"));
            };
            let count: u64 = c.parse().map_err(|_| bad(i + 1, "invalid count"))?;
            let doc_freq: u64 = d.parse().map_err(|_| bad(i + 1, "invalid doc_freq"))?;
            if doc_freq == 0 || doc_freq > count || doc_freq > stats.n_docs {
                return Err(bad(i + 1, "doc_freq out of range"));
            }
            sum += count;
            if stats
                .terms
                .insert(t.to_owned(), TermCounts { count, doc_freq })
                .is_some()
            {
                return Err(bad(i + 1, "duplicate term"));
            }
        }
        if sum != stats.total_tokens {
            return Err(bad(2, "term counts do not sum to total_tokens"));
        }
        Ok((stats, checksum))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<(ChunkStats, String)> {
        let path = path.as_ref();
        let f = File::open(path).map_err(|e| open_error(path, e))?;
        ChunkStats::read_from(BufReader::new(f))
    }
}

/// Collects exact statistics for one chunk in a single streaming pass.
pub fn chunk_stats(corpus: &CorpusHandle, chunk: &ChunkDescriptor) -> Result<ChunkStats> {
    if chunk.last_line >= corpus.n_sentences || chunk.first_line > chunk.last_line {
        return Err(CorpusError::ForeignChunk {
            index: chunk.index,
            first: chunk.first_line,
            last: chunk.last_line,
            n_sentences: corpus.n_sentences,
        });
    }
    let mut stats = ChunkStats::new(*chunk);
    corpus.for_each_sentence(chunk.first_line, chunk.last_line, |_, line| {
        stats.add_sentence(line)
    })?;
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn corpus_file(contents: &[u8]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents).unwrap();
        f.flush().unwrap();
        f
    }

    fn stats_of(lines: &[&str]) -> ChunkStats {
        let f = corpus_file(lines.join("\n").as_bytes());
        let h = ingest(f.path()).unwrap();
        let c = chunk(&h, 1).unwrap();
        chunk_stats(&h, &c[0]).unwrap()
    }

    #[test]
    fn ingest_counts_lines() {
        let f = corpus_file(b"a\nb\nc");
        let h = ingest(f.path()).unwrap();
        assert_eq!(h.n_sentences, 3);
        assert_eq!(h.n_blank_lines, 0);
        assert_eq!(h.byte_len, 5);
    }

    #[test]
    fn ingest_skips_blank() {
        let f = corpus_file(b"a\n  \r\nc\n");
        let h = ingest(f.path()).unwrap();
        assert_eq!(h.n_sentences, 2);
        assert_eq!(h.n_blank_lines, 1);
        assert_eq!(h.blank_lines, vec![2]);
    }

    #[test]
    fn ingest_errors() {
        let f = corpus_file(b"");
        assert!(matches!(ingest(f.path()), Err(CorpusError::Empty)));
        assert!(matches!(
            ingest("/nonexistent/corpus.txt"),
            Err(CorpusError::NotFound(_))
        ));
        let f = corpus_file(b"ok\nab\xffcd\n");
        match ingest(f.path()) {
            Err(CorpusError::InvalidUtf8 { offset, line }) => {
                assert_eq!(offset, 5);
                assert_eq!(line, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn checksum_is_sha256_of_bytes() {
        let f = corpus_file(b"abc");
        let h = ingest(f.path()).unwrap();
        assert_eq!(
            h.checksum,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn chunk_sizes() {
        let sizes = |n, k| -> Vec<u64> {
            chunk_ranges(n, k)
                .unwrap()
                .iter()
                .map(|c| c.n_sentences)
                .collect()
        };
        assert_eq!(sizes(5, 2), [3, 2]);
        assert_eq!(sizes(4, 4), [1, 1, 1, 1]);
        assert_eq!(sizes(24_800_000, 20), vec![1_240_000; 20]);
        assert!(matches!(chunk_ranges(3, 0), Err(CorpusError::ZeroChunks)));
        assert!(matches!(
            chunk_ranges(3, 4),
            Err(CorpusError::TooManyChunks { .. })
        ));
    }

    #[test]
    fn stats_examples() {
        let s = stats_of(&["a b a", "b c"]);
        assert_eq!(s.term_count("a"), 2);
        assert_eq!(s.term_count("b"), 2);
        assert_eq!(s.term_count("c"), 1);
        assert_eq!(s.doc_freq("a"), 1);
        assert_eq!(s.doc_freq("b"), 2);
        assert_eq!(s.doc_freq("c"), 1);
        assert_eq!(s.total_tokens, 5);
        assert_eq!(s.n_docs, 2);

        let s = stats_of(&["x"]);
        assert_eq!((s.term_count("x"), s.doc_freq("x"), s.n_docs), (1, 1, 1));

        let s = stats_of(&["p q", "p q"]);
        assert_eq!((s.term_count("p"), s.doc_freq("p")), (2, 2));
        assert_eq!((s.term_count("q"), s.doc_freq("q")), (2, 2));
    }

    #[test]
    fn chunk_stats_seeks_past_blank_lines() {
        let f = corpus_file(b"a\n\nb b\n\n\nc\r\nd\n");
        let h = ingest(f.path()).unwrap();
        let chunks = chunk(&h, 2).unwrap();
        let s1 = chunk_stats(&h, &chunks[1]).unwrap();
        assert_eq!(s1.n_docs, 2);
        assert_eq!(s1.term_count("c"), 1);
        assert_eq!(s1.term_count("d"), 1);
        assert_eq!(s1.term_count("b"), 0);
    }

    #[test]
    fn foreign_chunk_rejected() {
        let f = corpus_file(b"a\nb\n");
        let h = ingest(f.path()).unwrap();
        let bogus = ChunkDescriptor {
            index: 0,
            first_line: 1,
            last_line: 5,
            n_sentences: 5,
        };
        assert!(matches!(
            chunk_stats(&h, &bogus),
            Err(CorpusError::ForeignChunk { .. })
        ));
    }

    #[test]
    fn changed_file_detected() {
        let mut f = corpus_file(b"a\nb\n");
        let h = ingest(f.path()).unwrap();
        f.write_all(b"more\n").unwrap();
        f.flush().unwrap();
        let c = chunk(&h, 1).unwrap();
        assert!(matches!(
            chunk_stats(&h, &c[0]),
            Err(CorpusError::Changed { .. })
        ));
    }

    #[test]
    fn stats_file_round_trip() {
        let s = stats_of(&["मी घरी जातो", "मी शाळेत जातो", "x"]);
        let mut buf = Vec::new();
        s.write_to(&mut buf, "deadbeef").unwrap();
        let (back, sum) = ChunkStats::read_from(&buf[..]).unwrap();
        assert_eq!(back, s);
        assert_eq!(sum, "deadbeef");

        let broken = String::from_utf8(buf).unwrap().replace("\t2\t2", "\t2\t9");
        assert!(ChunkStats::read_from(broken.as_bytes()).is_err());
    }

    #[test]
    fn checkpoints_used_for_large_corpus() {
        let n = (CHECKPOINT_STRIDE * 2 + 17) as usize;
        let body: String = (0..n).map(|i| format!("w{}\n", i % 7)).collect();
        let body = body.replace(|c: char| c.is_ascii_digit(), "x");
        let f = corpus_file(body.as_bytes());
        let h = ingest(f.path()).unwrap();
        assert_eq!(h.checkpoints.len(), 3);
        let chunks = chunk(&h, 3).unwrap();
        let total: u64 = chunks
            .iter()
            .map(|c| chunk_stats(&h, c).unwrap().n_docs)
            .sum();
        assert_eq!(total, n as u64);
    }

    fn small_corpus() -> impl Strategy<Value = Vec<String>> {
        let word = prop::sample::select(vec!["a", "b", "c", "d", "मी", "घरी", "आणि", ","]);
        let sentence = prop::collection::vec(word, 1..6).prop_map(|w| w.join(" "));
        prop::collection::vec(sentence, 2..30)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn merge_equals_whole(lines in small_corpus(), k in 1u64..6) {
            let f = corpus_file(lines.join("\n").as_bytes());
            let h = ingest(f.path()).unwrap();
            let k = k.min(h.n_sentences);
            let whole = chunk_stats(&h, &chunk(&h, 1).unwrap()[0]).unwrap();
            let parts = chunk(&h, k).unwrap();
            let mut merged = chunk_stats(&h, &parts[0]).unwrap();
            for p in &parts[1..] {
                merged.merge(&chunk_stats(&h, p).unwrap());
            }
            merged.chunk.index = 0;
            prop_assert_eq!(&merged, &whole);
            let again = chunk_stats(&h, &chunk(&h, 1).unwrap()[0]).unwrap();
            prop_assert_eq!(again, whole);
        }

        #[test]
        fn stats_invariants(lines in small_corpus()) {
            let f = corpus_file(lines.join("\n").as_bytes());
            let h = ingest(f.path()).unwrap();
            let s = chunk_stats(&h, &chunk(&h, 1).unwrap()[0]).unwrap();
            let mut sum = 0;
            for c in s.terms.values() {
                prop_assert!(1 <= c.doc_freq && c.doc_freq <= c.count && c.doc_freq <= s.n_docs);
                sum += c.count;
            }
            prop_assert_eq!(sum, s.total_tokens);
        }

        #[test]
        fn chunks_partition(n in 1u64..500, k in 1u64..40) {
            prop_assume!(k <= n);
            let cs = chunk_ranges(n, k).unwrap();
            prop_assert_eq!(cs.len() as u64, k);
            let mut next = 0;
            for c in &cs {
                prop_assert_eq!(c.first_line, next);
                prop_assert_eq!(c.last_line - c.first_line + 1, c.n_sentences);
                next = c.last_line + 1;
            }
            prop_assert_eq!(next, n);
            let max = cs.iter().map(|c| c.n_sentences).max().unwrap();
            let min = cs.iter().map(|c| c.n_sentences).min().unwrap();
            prop_assert!(max - min <= 1);
        }
    }
}
