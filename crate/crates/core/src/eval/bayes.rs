//! Multinomial naive Bayes with add-one smoothing.

use std::collections::BTreeMap;

use super::features::SparseRow;
use super::{EvalError, Result};

#[derive(Debug, Clone)]
pub struct MultinomialNb {
    classes: Vec<String>,
    log_prior: Vec<f64>,
    /// `log_likelihood[c][t] = ln((count(t, c) + 1) / (total(c) + |V|))`
    log_likelihood: Vec<Vec<f64>>,
}

impl MultinomialNb {
    /// Fits on `(row, label)` pairs over a vocabulary of `vocab_len` terms.
    pub fn fit<'a, I>(examples: I, vocab_len: usize) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a SparseRow, &'a str)>,
    {
        let mut per_class: BTreeMap<&str, (u64, Vec<u64>)> = BTreeMap::new();
        let mut n_docs = 0u64;
        for (row, label) in examples {
            let (docs, counts) = per_class
                .entry(label)
                .or_insert_with(|| (0, vec![0; vocab_len]));
            *docs += 1;
            for &(i, c) in row {
                counts[i] += u64::from(c);
            }
            n_docs += 1;
        }
        if per_class.len() < 2 {
            return Err(EvalError::DegenerateTrain(per_class.len()));
        }
        let v = vocab_len as f64;
        let mut classes = Vec::with_capacity(per_class.len());
        let mut log_prior = Vec::with_capacity(per_class.len());
        let mut log_likelihood = Vec::with_capacity(per_class.len());
        for (label, (docs, counts)) in per_class {
            let total: u64 = counts.iter().sum();
            let denom = (total as f64 + v).ln();
            classes.push(label.to_owned());
            log_prior.push((docs as f64 / n_docs as f64).ln());
            log_likelihood.push(
                counts
                    .iter()
                    .map(|&c| (c as f64 + 1.0).ln() - denom)
                    .collect(),
            );
        }
        Ok(MultinomialNb {
            classes,
            log_prior,
            log_likelihood,
        })
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn joint_log_likelihood(&self, row: &SparseRow) -> Vec<f64> {
        self.log_prior
            .iter()
            .zip(&self.log_likelihood)
            .map(|(prior, ll)| prior + row.iter().map(|&(i, c)| f64::from(c) * ll[i]).sum::<f64>())
            .collect()
    }

    /// Highest joint log-likelihood; ties go to the class that sorts first.
    pub fn predict(&self, row: &SparseRow) -> &str {
        let scores = self.joint_log_likelihood(row);
        let mut best = 0;
        for (i, &s) in scores.iter().enumerate().skip(1) {
            if s > scores[best] {
                best = i;
            }
        }
        &self.classes[best]
    }
}
