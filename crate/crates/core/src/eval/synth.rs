//! Seeded generator for a small news-like labeled corpus.
//!
//! Words are pseudo-Devanagari (consonant + optional vowel sign, two or three
//! syllables), drawn from disjoint pools:
//!
//! * a stopword pool, sampled with the same Zipf-like weights in every class;
//! * a shared content pool, uniform, class-independent;
//! * one topic pool per class, except class 0, whose documents each borrow
//!   the topic pool of a random other class;
//! * a single marker token that appears in every class-0 document and
//!   nowhere else.
//!
//! So stopwords carry no class signal, while the marker is the only thing
//! that separates class 0 from the others.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Doc, LabeledDataset, Result, SplitRatios};
use crate::stopwords::StopwordList;

const CONSONANTS: std::ops::RangeInclusive<u32> = 0x0915..=0x0939;
const VOWEL_SIGNS: [&str; 10] = [
    "", "\u{093E}", "\u{093F}", "\u{0940}", "\u{0941}", "\u{0942}", "\u{0947}", "\u{0948}",
    "\u{094B}", "\u{094C}",
];

const LABELS: [&str; 6] = [
    "state",
    "sports",
    "entertainment",
    "business",
    "technology",
    "lifestyle",
];

/// Distinct word for every id.
pub fn pseudo_word(id: usize) -> String {
    let n_cons = (CONSONANTS.end() - CONSONANTS.start() + 1) as usize;
    let n_syl = n_cons * VOWEL_SIGNS.len();
    let syllable = |s: usize| {
        let c = char::from_u32(CONSONANTS.start() + (s / VOWEL_SIGNS.len()) as u32)
            .expect("consonant in range");
        format!("{c}{}", VOWEL_SIGNS[s % VOWEL_SIGNS.len()])
    };
    let mut w = syllable(id % n_syl) + &syllable((id / n_syl) % n_syl);
    let third = id / (n_syl * n_syl);
    if third > 0 {
        w += &syllable(third - 1);
    }
    w
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_docs: usize,
    pub n_classes: usize,
    pub seed: u64,
    pub min_len: usize,
    pub max_len: usize,
    /// Fraction of tokens drawn from the stopword pool.
    pub stopword_rate: f64,
    /// Fraction of non-stopword tokens drawn from the topic pool.
    pub topic_rate: f64,
    pub n_stopwords: usize,
    pub topic_vocab: usize,
    pub shared_vocab: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_docs: 2000,
            n_classes: 3,
            seed: 0,
            min_len: 15,
            max_len: 35,
            stopword_rate: 0.4,
            topic_rate: 0.25,
            n_stopwords: 30,
            topic_vocab: 80,
            shared_vocab: 400,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub dataset: LabeledDataset,
    /// The injected class-independent words.
    pub stopwords: StopwordList,
    /// Token present in every class-0 doc and no other.
    pub marker: String,
    pub config: SynthConfig,
}

pub fn generate(config: SynthConfig) -> Result<SynthCorpus> {
    assert!(config.n_classes >= 2, "need at least two classes");
    assert!(config.min_len >= 1 && config.min_len <= config.max_len);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut next_id = 0usize;
    let mut pool = |n: usize| -> Vec<String> {
        let v = (next_id..next_id + n).map(pseudo_word).collect();
        next_id += n;
        v
    };
    let stopwords = pool(config.n_stopwords);
    let shared = pool(config.shared_vocab);
    let topics: Vec<Vec<String>> = (0..config.n_classes)
        .map(|_| pool(config.topic_vocab))
        .collect();
    let marker = pool(1).remove(0);

    let zipf: Vec<f64> = (1..=stopwords.len()).map(|r| 1.0 / r as f64).collect();
    let stop_dist = WeightedIndex::new(&zipf).expect("non-empty weights");

    let label = |c: usize| {
        LABELS
            .get(c)
            .map_or_else(|| format!("class{c}"), |s| s.to_string())
    };

    let mut docs = Vec::with_capacity(config.n_docs);
    for i in 0..config.n_docs {
        let class = i % config.n_classes;
        let topic = if class == 0 {
            rng.random_range(1..config.n_classes)
        } else {
            class
        };
        let len = rng.random_range(config.min_len..=config.max_len);
        let marker_at = (class == 0).then(|| rng.random_range(0..len));
        let mut words: Vec<&str> = Vec::with_capacity(len);
        for pos in 0..len {
            if marker_at == Some(pos) {
                words.push(&marker);
                continue;
            }
            let w = if rng.random_bool(config.stopword_rate) {
                &stopwords[stop_dist.sample(&mut rng)]
            } else if rng.random_bool(config.topic_rate) {
                &topics[topic][rng.random_range(0..topics[topic].len())]
            } else {
                &shared[rng.random_range(0..shared.len())]
            };
            words.push(w);
        }
        docs.push(Doc {
            text: words.join(" "),
            label: label(class),
        });
    }
    // Class is i % n_classes, so shuffle before splitting.
    let dataset = LabeledDataset::with_random_split(docs, SplitRatios::default(), config.seed)?;
    Ok(SynthCorpus {
        dataset,
        stopwords: StopwordList::from_words(&stopwords).expect("pseudo words are tokens"),
        marker,
        config,
    })
}
