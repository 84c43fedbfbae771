//! Downstream classification check: train the same classifier with and
//! without stopword removal and compare held-out accuracy.

mod bayes;
mod dataset;
mod features;
pub mod synth;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bayes::MultinomialNb;
pub use dataset::{load_csv, write_csv, Doc, LabeledDataset, SplitRatios, Splits};
pub use features::{count_row, featurize, Features, SparseRow, Vocabulary};

use crate::stopwords::StopwordList;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("invalid splits: {0}")]
    InvalidSplits(String),
    #[error("training split has {0} class(es); need at least 2")]
    DegenerateTrain(usize),
    #[error("vocabulary is empty after preprocessing")]
    EmptyVocabulary,
    #[error("test split is empty")]
    EmptyTest,
    #[error("expected CSV header `text,label`, found `{0}`")]
    CsvHeader(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = EvalError> = std::result::Result<T, E>;

/// Fits on the train split and returns accuracy on the test split.
pub fn train_eval(dataset: &LabeledDataset, features: &Features) -> Result<f64> {
    let splits = dataset.splits();
    if splits.test.is_empty() {
        return Err(EvalError::EmptyTest);
    }
    let docs = dataset.docs();
    let model = MultinomialNb::fit(
        splits
            .train
            .iter()
            .map(|&i| (&features.rows[i], docs[i].label.as_str())),
        features.vocab.len(),
    )?;
    let correct = splits
        .test
        .iter()
        .filter(|&&i| model.predict(&features.rows[i]) == docs[i].label)
        .count();
    Ok(correct as f64 / splits.test.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub acc_with_stopwords: f64,
    pub acc_without_stopwords: f64,
    /// `acc_without_stopwords - acc_with_stopwords`
    pub delta: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub vocab_with_stopwords: usize,
    pub vocab_without_stopwords: usize,
    pub n_stopwords: usize,
    pub classifier: String,
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "classifier            {}", self.classifier)?;
        writeln!(
            f,
            "train / test docs     {} / {}",
            self.n_train, self.n_test
        )?;
        writeln!(f, "stopwords             {}", self.n_stopwords)?;
        writeln!(
            f,
            "vocabulary            {} -> {}",
            self.vocab_with_stopwords, self.vocab_without_stopwords
        )?;
        writeln!(
            f,
            "accuracy (kept)       {:.2}%",
            100.0 * self.acc_with_stopwords
        )?;
        writeln!(
            f,
            "accuracy (removed)    {:.2}%",
            100.0 * self.acc_without_stopwords
        )?;
        write!(f, "delta                 {:+.2} pts", 100.0 * self.delta)
    }
}

/// Runs the classifier twice, once on raw text and once with `list` removed.
pub fn compare(dataset: &LabeledDataset, list: &StopwordList) -> Result<EvalReport> {
    let kept = featurize(dataset, None)?;
    let removed = featurize(dataset, Some(list))?;
    let acc_with = train_eval(dataset, &kept)?;
    let acc_without = train_eval(dataset, &removed)?;
    Ok(EvalReport {
        acc_with_stopwords: acc_with,
        acc_without_stopwords: acc_without,
        delta: acc_without - acc_with,
        n_train: dataset.splits().train.len(),
        n_test: dataset.splits().test.len(),
        vocab_with_stopwords: kept.vocab.len(),
        vocab_without_stopwords: removed.vocab.len(),
        n_stopwords: list.len(),
        classifier: "multinomial naive bayes, add-one smoothing".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn doc(text: impl Into<String>, label: &str) -> Doc {
        Doc {
            text: text.into(),
            label: label.into(),
        }
    }

    #[test]
    fn separable_data_is_perfect() {
        let docs: Vec<Doc> = (0..200)
            .map(|i| {
                if i % 2 == 0 {
                    doc("कमल पानी तालाब", "a")
                } else {
                    doc("गाड़ी सड़क पहिया", "b")
                }
            })
            .collect();
        let d = LabeledDataset::with_random_split(docs, SplitRatios::default(), 1).unwrap();
        let f = featurize(&d, None).unwrap();
        assert_eq!(train_eval(&d, &f).unwrap(), 1.0);
    }

    #[test]
    fn random_labels_are_chance() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let words: Vec<String> = (0..300).map(synth::pseudo_word).collect();
        let docs: Vec<Doc> = (0..4000)
            .map(|_| {
                let text: Vec<&str> = (0..20)
                    .map(|_| words[rng.random_range(0..words.len())].as_str())
                    .collect();
                let label = if rng.random_bool(0.5) { "a" } else { "b" };
                doc(text.join(" "), label)
            })
            .collect();
        let d = LabeledDataset::with_random_split(
            docs,
            SplitRatios {
                train: 0.5,
                test: 0.5,
            },
            3,
        )
        .unwrap();
        let acc = train_eval(&d, &featurize(&d, None).unwrap()).unwrap();
        assert!((acc - 0.5).abs() <= 0.05, "{acc}");
    }

    #[test]
    fn single_class_train_is_error() {
        let docs = vec![doc("x", "a"), doc("y", "a"), doc("z", "b")];
        let splits = Splits {
            train: vec![0, 1],
            test: vec![2],
            validation: vec![],
        };
        assert!(matches!(
            LabeledDataset::new(docs, splits),
            Err(EvalError::DegenerateTrain(1))
        ));
    }

    #[test]
    fn report_delta_and_rendering() {
        let c = synth::generate(synth::SynthConfig::default()).unwrap();
        let r = compare(&c.dataset, &c.stopwords).unwrap();
        assert_eq!(r.delta, r.acc_without_stopwords - r.acc_with_stopwords);
        assert!(r.vocab_without_stopwords < r.vocab_with_stopwords);
        let text = r.to_string();
        assert!(text.contains("delta"), "{text}");
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<EvalReport>(&json).unwrap(), r);
    }
}
