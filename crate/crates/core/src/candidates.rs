//! Cross-chunk intersection of bottom-k lists.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tfidf::CandidateList;

#[derive(Debug, Error)]
pub enum CandidateError {
    #[error("no candidate lists supplied")]
    NoLists,
    #[error("min_chunks must be in 1..={n}, got {got}")]
    MinChunks { got: usize, n: usize },
    #[error("chunk {chunk} lists {term:?} twice")]
    DuplicateTerm { chunk: usize, term: String },
    #[error("refusing to export an empty candidate set")]
    EmptySet,
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("malformed candidate file: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, CandidateError>;

/// Where a term sat in one chunk's list. `rank` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChunkRank {
    pub chunk: usize,
    pub rank: usize,
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub term: String,
    pub ranks: Vec<ChunkRank>,
}

impl Candidate {
    pub fn mean_rank(&self) -> f64 {
        self.rank_sum() as f64 / self.ranks.len() as f64
    }

    fn rank_sum(&self) -> u128 {
        self.ranks.iter().map(|r| r.rank as u128).sum()
    }

    /// Mean-rank comparison done by cross-multiplying integer sums.
    fn cmp_mean_rank(&self, other: &Candidate) -> Ordering {
        let lhs = self.rank_sum() * other.ranks.len() as u128;
        let rhs = other.rank_sum() * self.ranks.len() as u128;
        lhs.cmp(&rhs).then_with(|| self.term.cmp(&other.term))
    }
}

/// Terms found in (at least `min_chunks` of) the chunk lists, ordered by mean
/// rank ascending then code point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub n_chunks: usize,
    pub min_chunks: usize,
    pub candidates: Vec<Candidate>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.candidates.iter().map(|c| c.term.as_str())
    }

    pub fn contains(&self, term: &str) -> bool {
        self.candidates.iter().any(|c| c.term == term)
    }

    /// Builds a set from a bare term list (no rank data), keeping its order.
    pub fn from_terms<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        CandidateSet {
            n_chunks: 0,
            min_chunks: 0,
            candidates: terms
                .into_iter()
                .map(|t| Candidate {
                    term: t.into(),
                    ranks: Vec::new(),
                })
                .collect(),
        }
    }
}

/// Strict intersection: a term must appear in every list.
pub fn intersect(lists: &[CandidateList]) -> Result<CandidateSet> {
    intersect_at_least(lists, lists.len())
}

/// Keeps terms present in at least `min_chunks` lists.
pub fn intersect_at_least(lists: &[CandidateList], min_chunks: usize) -> Result<CandidateSet> {
    if lists.is_empty() {
        return Err(CandidateError::NoLists);
    }
    if min_chunks == 0 || min_chunks > lists.len() {
        return Err(CandidateError::MinChunks {
            got: min_chunks,
            n: lists.len(),
        });
    }
    for list in lists {
        let mut sorted: Vec<&String> = list.terms.iter().collect();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(CandidateError::DuplicateTerm {
                chunk: list.chunk,
                term: w[0].clone(),
            });
        }
    }
    let mut seen: HashMap<&str, Vec<ChunkRank>> = HashMap::new();
    for list in lists {
        for (i, term) in list.terms.iter().enumerate() {
            seen.entry(term.as_str()).or_default().push(ChunkRank {
                chunk: list.chunk,
                rank: i + 1,
                score: list.score(i),
            });
        }
    }
    let mut candidates: Vec<Candidate> = seen
        .into_iter()
        .filter(|(_, ranks)| ranks.len() >= min_chunks)
        .map(|(term, ranks)| Candidate {
            term: term.to_owned(),
            ranks,
        })
        .collect();
    candidates.sort_unstable_by(Candidate::cmp_mean_rank);
    Ok(CandidateSet {
        n_chunks: lists.len(),
        min_chunks,
        candidates,
    })
}

/// Path of the provenance sidecar for a candidate text file.
pub fn sidecar_path(destination: &Path) -> PathBuf {
    let mut name = destination
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".provenance.json");
    destination.with_file_name(name)
}

/// Sidecar contents: the full set plus free-form run metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateProvenance {
    #[serde(default)]
    pub meta: serde_json::Map<String, serde_json::Value>,
    pub set: CandidateSet,
}

/// Writes one term per line to `destination` and the provenance sidecar
/// next to it.
pub fn export_candidates(set: &CandidateSet, destination: &Path) -> Result<()> {
    export_candidates_with(set, destination, serde_json::Map::new())
}

pub fn export_candidates_with(
    set: &CandidateSet,
    destination: &Path,
    meta: serde_json::Map<String, serde_json::Value>,
) -> Result<()> {
    if set.is_empty() {
        return Err(CandidateError::EmptySet);
    }
    fn wrap(path: &Path) -> impl Fn(io::Error) -> CandidateError + '_ {
        move |source| CandidateError::Write {
            path: path.to_path_buf(),
            source,
        }
    }
    let mut w = BufWriter::new(File::create(destination).map_err(wrap(destination))?);
    for t in set.terms() {
        writeln!(w, "{t}").map_err(wrap(destination))?;
    }
    w.flush().map_err(wrap(destination))?;

    let side = sidecar_path(destination);
    let prov = CandidateProvenance {
        meta,
        set: set.clone(),
    };
    let mut json = serde_json::to_string_pretty(&prov).expect("candidate set serializes");
    json.push('\n');
    std::fs::write(&side, json).map_err(wrap(&side))?;
    Ok(())
}

/// Loads a candidate text file, taking rank data from the sidecar when one
/// exists. The text file's order and membership are authoritative.
pub fn load_candidates(
    path: &Path,
) -> Result<(CandidateSet, serde_json::Map<String, serde_json::Value>)> {
    let f = File::open(path)?;
    let mut terms = Vec::new();
    for line in BufReader::new(f).lines() {
        let line = line?;
        let t = line.trim_end_matches('\r');
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        terms.push(t.to_owned());
    }
    let side = sidecar_path(path);
    if !side.exists() {
        return Ok((CandidateSet::from_terms(terms), serde_json::Map::new()));
    }
    let prov: CandidateProvenance = serde_json::from_reader(BufReader::new(File::open(&side)?))
        .map_err(|e| CandidateError::Malformed(format!("{}: {e}", side.display())))?;
    let sidecar_terms: Vec<&str> = prov.set.terms().collect();
    if sidecar_terms != terms {
        return Err(CandidateError::Malformed(format!(
            "{} does not match {}",
            side.display(),
            path.display()
        )));
    }
    Ok((prov.set, prov.meta))
}
