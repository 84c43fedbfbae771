use std::collections::{BTreeMap, HashMap, HashSet};

use chrono::{DateTime, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{AnnotationError, Result};
use crate::candidates::CandidateSet;
use crate::corpus::{hex, CorpusHandle};
use crate::text::{normalize, token_spans};

/// A corpus sentence shown to reviewers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    /// 0-based sentence index in the corpus.
    pub sentence: u64,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub candidates: CandidateSet,
    pub reviewers: Vec<String>,
    pub samples: BTreeMap<String, Vec<Sample>>,
    /// Candidates that occur in no corpus sentence.
    pub unsampled: Vec<String>,
    pub samples_per_term: usize,
    pub seed: u64,
    pub corpus_checksum: String,
    pub created_at: DateTime<Utc>,
}

impl Session {
    pub fn has_reviewer(&self, reviewer: &str) -> bool {
        self.reviewers.iter().any(|r| r == reviewer)
    }

    pub fn has_term(&self, term: &str) -> bool {
        self.samples.contains_key(term)
    }

    pub fn position(&self, term: &str) -> Option<usize> {
        self.candidates.terms().position(|t| t == term)
    }
}

/// Reservoir of up to `cap` sentences for one term, with its own RNG so a
/// term's samples do not depend on which other terms are candidates.
struct Reservoir {
    rng: ChaCha8Rng,
    seen: u64,
    picked: Vec<Sample>,
}

impl Reservoir {
    fn new(seed: u64, term: &str) -> Self {
        let digest = Sha256::digest(term.as_bytes());
        let mut b = [0u8; 8];
        b.copy_from_slice(&digest[..8]);
        Reservoir {
            rng: ChaCha8Rng::seed_from_u64(seed ^ u64::from_le_bytes(b)),
            seen: 0,
            picked: Vec::new(),
        }
    }

    fn offer(&mut self, cap: usize, sentence: u64, text: &str) {
        self.seen += 1;
        if self.picked.len() < cap {
            self.picked.push(Sample {
                sentence,
                text: text.to_owned(),
            });
            return;
        }
        let j = self.rng.random_range(0..self.seen);
        if (j as usize) < cap {
            self.picked[j as usize] = Sample {
                sentence,
                text: text.to_owned(),
            };
        }
    }
}

fn session_id(
    candidates: &CandidateSet,
    checksum: &str,
    reviewers: &[String],
    samples_per_term: usize,
    seed: u64,
) -> String {
    let mut h = Sha256::new();
    h.update(checksum.as_bytes());
    h.update(seed.to_le_bytes());
    h.update((samples_per_term as u64).to_le_bytes());
    for r in reviewers {
        h.update(r.as_bytes());
        h.update([0]);
    }
    h.update([1]);
    for t in candidates.terms() {
        h.update(t.as_bytes());
        h.update([0]);
    }
    hex(&h.finalize()[..8])
}

/// Builds a review session, drawing up to `samples_per_term` sentences per
/// candidate from one pass over the corpus. The same inputs always produce
/// the same session.
pub fn create_session(
    candidates: &CandidateSet,
    corpus: &CorpusHandle,
    reviewers: &[String],
    samples_per_term: usize,
    seed: u64,
    created_at: DateTime<Utc>,
) -> Result<Session> {
    if candidates.is_empty() {
        return Err(AnnotationError::NoCandidates);
    }
    if reviewers.is_empty() {
        return Err(AnnotationError::NoReviewers);
    }
    let mut distinct = HashSet::new();
    for r in reviewers {
        if r.is_empty() || !distinct.insert(r.as_str()) {
            return Err(AnnotationError::DuplicateReviewer(r.clone()));
        }
    }

    let mut reservoirs: HashMap<&str, Reservoir> = candidates
        .terms()
        .map(|t| (t, Reservoir::new(seed, t)))
        .collect();
    if samples_per_term > 0 {
        let mut hit: Vec<&str> = Vec::new();
        corpus.for_each(|idx, line| {
            let norm = normalize(line);
            hit.clear();
            for tok in token_spans(&norm) {
                if let Some((&key, _)) = reservoirs.get_key_value(tok) {
                    if !hit.contains(&key) {
                        hit.push(key);
                    }
                }
            }
            for key in &hit {
                if let Some(r) = reservoirs.get_mut(key) {
                    r.offer(samples_per_term, idx, line.trim());
                }
            }
        })?;
    }

    let mut samples = BTreeMap::new();
    let mut unsampled = Vec::new();
    for term in candidates.terms() {
        let mut picked = reservoirs
            .remove(term)
            .map(|r| r.picked)
            .unwrap_or_default();
        picked.sort_by_key(|s| s.sentence);
        if picked.is_empty() && samples_per_term > 0 {
            unsampled.push(term.to_owned());
        }
        samples.insert(term.to_owned(), picked);
    }

    Ok(Session {
        id: session_id(
            candidates,
            &corpus.checksum,
            reviewers,
            samples_per_term,
            seed,
        ),
        candidates: candidates.clone(),
        reviewers: reviewers.to_vec(),
        samples,
        unsampled,
        samples_per_term,
        seed,
        corpus_checksum: corpus.checksum.clone(),
        created_at,
    })
}
