//! Reviewer sessions over a candidate set and the majority vote that turns
//! judgments into a final list.
//!
//! Each reviewer reads a candidate in a sample sentence and answers whether
//! deleting it changes the sentence's meaning. With `r` reviewers a term is
//! `non_trivial` (kept out of the list) once `⌈(r+1)/2⌉` of them say
//! `meaning_altered`; for three reviewers that is two or more. A term is
//! `unresolved` until every reviewer has voted, and unresolved terms never
//! reach the final list.

mod session;
mod store;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use session::{create_session, Sample, Session};
pub use store::{SessionHandle, SessionStore};

#[derive(Debug, Error)]
pub enum AnnotationError {
    #[error("candidate set is empty")]
    NoCandidates,
    #[error("session needs at least one reviewer")]
    NoReviewers,
    #[error("duplicate reviewer id {0:?}")]
    DuplicateReviewer(String),
    #[error("unknown reviewer {0:?}")]
    UnknownReviewer(String),
    #[error("unknown term {0:?}")]
    UnknownTerm(String),
    #[error("invalid judgment {0:?} (expected meaning_altered or meaning_preserved)")]
    InvalidJudgment(String),
    #[error("unknown session {0:?}")]
    UnknownSession(String),
    #[error("session {0:?} already exists with different contents")]
    SessionConflict(String),
    #[error("corrupt store file {path}: {reason}")]
    Corrupt { path: String, reason: String },
    #[error(transparent)]
    Corpus(#[from] crate::corpus::CorpusError),
    #[error("store I/O: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, AnnotationError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Judgment {
    MeaningAltered,
    MeaningPreserved,
}

impl Judgment {
    pub fn as_str(self) -> &'static str {
        match self {
            Judgment::MeaningAltered => "meaning_altered",
            Judgment::MeaningPreserved => "meaning_preserved",
        }
    }
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Judgment {
    type Err = AnnotationError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "meaning_altered" => Ok(Judgment::MeaningAltered),
            "meaning_preserved" => Ok(Judgment::MeaningPreserved),
            other => Err(AnnotationError::InvalidJudgment(other.to_owned())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteRecord {
    pub term: String,
    pub reviewer: String,
    pub judgment: Judgment,
    pub recorded_at: DateTime<Utc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Stopword,
    NonTrivial,
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub term: String,
    pub outcome: Outcome,
    pub altered_count: usize,
    pub vote_total: usize,
}

/// Number of `meaning_altered` votes that makes a term non-trivial.
pub fn altered_threshold(n_reviewers: usize) -> usize {
    (n_reviewers + 2) / 2
}

/// Outcome for one term given its current judgments.
pub fn decide(n_reviewers: usize, judgments: &[Judgment]) -> Outcome {
    if judgments.len() < n_reviewers {
        return Outcome::Unresolved;
    }
    let altered = judgments
        .iter()
        .filter(|&&j| j == Judgment::MeaningAltered)
        .count();
    if altered >= altered_threshold(n_reviewers) {
        Outcome::NonTrivial
    } else {
        Outcome::Stopword
    }
}

/// Current judgment per (term, reviewer); later records replace earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VoteTable {
    votes: HashMap<String, HashMap<String, VoteRecord>>,
}

impl VoteTable {
    pub fn apply(&mut self, record: VoteRecord) {
        self.votes
            .entry(record.term.clone())
            .or_default()
            .insert(record.reviewer.clone(), record);
    }

    pub fn get(&self, term: &str, reviewer: &str) -> Option<&VoteRecord> {
        self.votes.get(term).and_then(|m| m.get(reviewer))
    }

    pub fn for_term(&self, term: &str) -> impl Iterator<Item = &VoteRecord> {
        self.votes.get(term).into_iter().flat_map(|m| m.values())
    }

    /// Number of terms this reviewer has a current judgment for.
    pub fn voted_by(&self, reviewer: &str) -> usize {
        self.votes
            .values()
            .filter(|m| m.contains_key(reviewer))
            .count()
    }

    pub fn len(&self) -> usize {
        self.votes.values().map(HashMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Verdicts in session order plus the resulting lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Aggregate {
    pub verdicts: Vec<Verdict>,
    pub stopwords: Vec<String>,
    pub non_trivial: Vec<String>,
    pub unresolved: Vec<String>,
}

pub fn aggregate(session: &Session, votes: &VoteTable) -> Aggregate {
    let n = session.reviewers.len();
    let mut out = Aggregate {
        verdicts: Vec::with_capacity(session.candidates.len()),
        stopwords: Vec::new(),
        non_trivial: Vec::new(),
        unresolved: Vec::new(),
    };
    for term in session.candidates.terms() {
        let judgments: Vec<Judgment> = votes
            .for_term(term)
            .filter(|v| session.has_reviewer(&v.reviewer))
            .map(|v| v.judgment)
            .collect();
        let outcome = decide(n, &judgments);
        let altered_count = judgments
            .iter()
            .filter(|&&j| j == Judgment::MeaningAltered)
            .count();
        match outcome {
            Outcome::Stopword => out.stopwords.push(term.to_owned()),
            Outcome::NonTrivial => out.non_trivial.push(term.to_owned()),
            Outcome::Unresolved => out.unresolved.push(term.to_owned()),
        }
        out.verdicts.push(Verdict {
            term: term.to_owned(),
            outcome,
            altered_count,
            vote_total: judgments.len(),
        });
    }
    out
}

/// Per-reviewer and overall progress.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progress {
    pub session: String,
    pub total_terms: usize,
    pub reviewers: Vec<ReviewerProgress>,
    pub resolved: usize,
    pub unresolved: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewerProgress {
    pub reviewer: String,
    pub voted: usize,
    pub remaining: usize,
}

pub fn progress(session: &Session, votes: &VoteTable) -> Progress {
    let total = session.candidates.len();
    let agg = aggregate(session, votes);
    Progress {
        session: session.id.clone(),
        total_terms: total,
        reviewers: session
            .reviewers
            .iter()
            .map(|r| {
                let voted = votes.voted_by(r);
                ReviewerProgress {
                    reviewer: r.clone(),
                    voted,
                    remaining: total.saturating_sub(voted),
                }
            })
            .collect(),
        resolved: total - agg.unresolved.len(),
        unresolved: agg.unresolved.len(),
    }
}

/// One entry of a reviewer's queue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueueItem {
    /// 0-based index in session order.
    pub position: usize,
    pub term: String,
    pub samples: Vec<Sample>,
    pub my_judgment: Option<Judgment>,
}

/// Candidates for `reviewer` in session order, starting after term `after`
/// (exclusive). Judged terms are skipped unless `include_voted`.
pub fn queue(
    session: &Session,
    votes: &VoteTable,
    reviewer: &str,
    after: Option<&str>,
    limit: usize,
    include_voted: bool,
) -> Result<Vec<QueueItem>> {
    if !session.has_reviewer(reviewer) {
        return Err(AnnotationError::UnknownReviewer(reviewer.to_owned()));
    }
    let start = match after {
        None => 0,
        Some(t) => {
            session
                .position(t)
                .ok_or_else(|| AnnotationError::UnknownTerm(t.to_owned()))?
                + 1
        }
    };
    Ok(session
        .candidates
        .terms()
        .enumerate()
        .skip(start)
        .filter_map(|(position, term)| {
            let mine = votes.get(term, reviewer).map(|v| v.judgment);
            if mine.is_some() && !include_voted {
                return None;
            }
            Some(QueueItem {
                position,
                term: term.to_owned(),
                samples: session.samples.get(term).cloned().unwrap_or_default(),
                my_judgment: mine,
            })
        })
        .take(limit)
        .collect())
}
