//! TF, DF, IDF and the per-chunk TF·IDF ranking.
//!
//! For a chunk, each term gets one score:
//!
//! ```text
//! tf    = term_count / total_tokens        (whole chunk)
//! df    = doc_freq / n_docs                (sentence level)
//! idf   = ln(1 / df)
//! score = tf * idf
//! ```
//!
//! A term present in every sentence has `df = 1`, hence `idf = 0` and a score
//! of exactly zero. The lowest scores are stopword candidates.

use std::cmp::Ordering;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::ChunkStats;

#[derive(Debug, Error, PartialEq)]
pub enum ScoreError {
    #[error("term frequency needs at least one token in the document")]
    EmptyDocument,
    #[error("count {count} exceeds total {total}")]
    CountExceedsTotal { count: u64, total: u64 },
    #[error("document frequency needs at least one document")]
    NoDocuments,
    #[error("idf undefined for df = {0} (term absent from corpus)")]
    ZeroDf(f64),
    #[error("df = {0} is not a fraction in (0, 1]")]
    InvalidDf(f64),
    #[error("chunk statistics are empty")]
    EmptyStats,
    #[error("invalid scoring config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, ScoreError>;

/// Occurrences over tokens.
pub fn tf(count: u64, total: u64) -> Result<f64> {
    if total == 0 {
        return Err(ScoreError::EmptyDocument);
    }
    if count > total {
        return Err(ScoreError::CountExceedsTotal { count, total });
    }
    Ok(count as f64 / total as f64)
}

/// Containing documents over all documents.
pub fn df(docs_containing: u64, n_docs: u64) -> Result<f64> {
    if n_docs == 0 {
        return Err(ScoreError::NoDocuments);
    }
    if docs_containing > n_docs {
        return Err(ScoreError::CountExceedsTotal {
            count: docs_containing,
            total: n_docs,
        });
    }
    Ok(docs_containing as f64 / n_docs as f64)
}

/// `ln(1 / df)`.
pub fn idf(df_value: f64) -> Result<f64> {
    if df_value.is_nan() || df_value > 1.0 {
        return Err(ScoreError::InvalidDf(df_value));
    }
    if df_value <= 0.0 {
        return Err(ScoreError::ZeroDf(df_value));
    }
    Ok((1.0 / df_value).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoringConfig {
    /// Size of each chunk's candidate list.
    pub k: usize,
    /// Terms with `df < min_df` are not scored.
    pub min_df: f64,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        ScoringConfig {
            k: 5000,
            min_df: 0.001,
        }
    }
}

impl ScoringConfig {
    pub fn new(k: usize, min_df: f64) -> Result<Self> {
        let c = ScoringConfig { k, min_df };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(ScoreError::Config("k must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.min_df) {
            return Err(ScoreError::Config(format!(
                "min_df must be in [0, 1), got {}",
                self.min_df
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermScore {
    pub term: String,
    pub count: u64,
    pub doc_freq: u64,
    pub tf: f64,
    pub df: f64,
    pub idf: f64,
    pub score: f64,
}

/// Ascending score, then higher `doc_freq` first, then code-point order.
pub fn rank_order(a: &TermScore, b: &TermScore) -> Ordering {
    a.score
        .total_cmp(&b.score)
        .then_with(|| b.doc_freq.cmp(&a.doc_freq))
        .then_with(|| a.term.cmp(&b.term))
}

/// Scores every term of the chunk that clears `min_df` and returns them in
/// [`rank_order`].
pub fn score_terms(stats: &ChunkStats, config: &ScoringConfig) -> Result<Vec<TermScore>> {
    config.validate()?;
    if stats.terms.is_empty() || stats.total_tokens == 0 || stats.n_docs == 0 {
        return Err(ScoreError::EmptyStats);
    }
    let mut out = Vec::with_capacity(stats.terms.len());
    for (term, counts) in &stats.terms {
        let df_value = df(counts.doc_freq, stats.n_docs)?;
        if df_value < config.min_df {
            continue;
        }
        let tf_value = tf(counts.count, stats.total_tokens)?;
        let idf_value = idf(df_value)?;
        out.push(TermScore {
            term: term.clone(),
            count: counts.count,
            doc_freq: counts.doc_freq,
            tf: tf_value,
            df: df_value,
            idf: idf_value,
            score: tf_value * idf_value,
        });
    }
    out.sort_unstable_by(rank_order);
    Ok(out)
}

/// The first `min(k, len)` entries of an already ranked list.
pub fn bottom_k<'a>(scores: &'a [TermScore], config: &ScoringConfig) -> &'a [TermScore] {
    &scores[..config.k.min(scores.len())]
}

/// A chunk's bottom-k terms with their rank data, as persisted between stages.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateList {
    pub chunk: usize,
    pub terms: Vec<String>,
    /// Parallel to `terms` when known.
    pub scores: Option<Vec<f64>>,
}

impl CandidateList {
    pub fn from_scores(chunk: usize, ranked: &[TermScore]) -> Self {
        CandidateList {
            chunk,
            terms: ranked.iter().map(|s| s.term.clone()).collect(),
            scores: Some(ranked.iter().map(|s| s.score).collect()),
        }
    }

    pub fn score(&self, rank0: usize) -> Option<f64> {
        self.scores.as_ref().and_then(|s| s.get(rank0).copied())
    }

    /// One term per line after a single `#` header line.
    pub fn write_terms<W: Write>(&self, mut w: W, header: &str) -> io::Result<()> {
        writeln!(w, "# {header}")?;
        for t in &self.terms {
            writeln!(w, "{t}")?;
        }
        w.flush()
    }

    /// Score sidecar: `rank term score` rows, tab-separated. Scores use the
    /// shortest representation that round-trips.
    pub fn write_scores<W: Write>(&self, mut w: W, ranked: &[TermScore]) -> io::Result<()> {
        writeln!(w, "rank\tterm\tcount\tdoc_freq\ttf\tdf\tidf\tscore")?;
        for (i, s) in ranked.iter().enumerate() {
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{:?}\t{:?}\t{:?}\t{:?}",
                i + 1,
                s.term,
                s.count,
                s.doc_freq,
                s.tf,
                s.df,
                s.idf,
                s.score
            )?;
        }
        w.flush()
    }

    /// Reads a term file; `#` lines and blank lines are skipped.
    pub fn read_terms<R: BufRead>(chunk: usize, r: R) -> io::Result<Self> {
        let mut terms = Vec::new();
        for line in r.lines() {
            let line = line?;
            let t = line.trim_end_matches('\r');
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            terms.push(t.to_owned());
        }
        Ok(CandidateList {
            chunk,
            terms,
            scores: None,
        })
    }

    /// Attaches scores from a sidecar written by [`CandidateList::write_scores`].
    /// Rows must match `terms` in order.
    pub fn attach_scores<R: BufRead>(&mut self, r: R) -> io::Result<()> {
        let invalid = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
        let mut scores = Vec::with_capacity(self.terms.len());
        for (i, line) in r.lines().skip(1).enumerate() {
            let line = line?;
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 8 {
                return Err(invalid(format!("score row {}: expected 8 columns", i + 2)));
            }
            if i >= self.terms.len() {
                break;
            }
            if cols[1] != self.terms[i] {
                return Err(invalid(format!(
                    "score row {}: term {:?} does not match candidate {:?}",
                    i + 2,
                    cols[1],
                    self.terms[i]
                )));
            }
            scores.push(
                cols[7]
                    .parse()
                    .map_err(|_| invalid(format!("score row {}: bad score", i + 2)))?,
            );
        }
        if scores.len() != self.terms.len() {
            return Err(invalid("score sidecar shorter than candidate list".into()));
        }
        self.scores = Some(scores);
        Ok(())
    }
}
