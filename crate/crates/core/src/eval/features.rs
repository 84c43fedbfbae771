use std::collections::{BTreeSet, HashMap};

use super::{EvalError, LabeledDataset, Result};
use crate::stopwords::StopwordList;
use crate::text::{normalize, token_spans};

/// Bag-of-words counts over a fixed vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Terms are kept in code-point order so indices are reproducible.
    pub fn new<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let sorted: BTreeSet<String> = terms.into_iter().map(Into::into).collect();
        let terms: Vec<String> = sorted.into_iter().collect();
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Vocabulary { terms, index }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }
}

/// Sparse row: `(term index, count)` sorted by index.
pub type SparseRow = Vec<(usize, u32)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Features {
    pub vocab: Vocabulary,
    /// One row per dataset doc, in dataset order.
    pub rows: Vec<SparseRow>,
    pub removed_stopwords: bool,
}

impl Features {
    pub fn dense(&self, doc: usize) -> Vec<u32> {
        let mut v = vec![0; self.vocab.len()];
        for &(i, c) in &self.rows[doc] {
            v[i] = c;
        }
        v
    }
}

fn doc_tokens(text: &str, list: Option<&StopwordList>) -> Vec<String> {
    let text = match list {
        Some(l) => l.remove_stopwords(text),
        None => normalize(text),
    };
    token_spans(&text).map(str::to_owned).collect()
}

/// Counts `text` against `vocab`, dropping out-of-vocabulary tokens.
pub fn count_row(text: &str, vocab: &Vocabulary, list: Option<&StopwordList>) -> SparseRow {
    let mut counts: HashMap<usize, u32> = HashMap::new();
    for tok in doc_tokens(text, list) {
        if let Some(i) = vocab.index_of(&tok) {
            *counts.entry(i).or_insert(0) += 1;
        }
    }
    let mut row: SparseRow = counts.into_iter().collect();
    row.sort_unstable();
    row
}

/// Builds the vocabulary from the training split (after stopword removal
/// when `list` is given) and counts every doc against it.
pub fn featurize(dataset: &LabeledDataset, list: Option<&StopwordList>) -> Result<Features> {
    let vocab = Vocabulary::new(dataset.train().flat_map(|d| doc_tokens(&d.text, list)));
    if vocab.is_empty() {
        return Err(EvalError::EmptyVocabulary);
    }
    let rows = dataset
        .docs()
        .iter()
        .map(|d| count_row(&d.text, &vocab, list))
        .collect();
    Ok(Features {
        vocab,
        rows,
        removed_stopwords: list.is_some(),
    })
}
