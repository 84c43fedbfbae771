use std::collections::BTreeSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{EvalError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Doc {
    pub text: String,
    pub label: String,
}

/// Index lists into the dataset's docs, each sorted ascending.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Splits {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub validation: Vec<usize>,
}

/// Fractions of the data assigned to train and test; validation gets the rest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    /// 80/10/10.
    fn default() -> Self {
        SplitRatios {
            train: 0.8,
            test: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDataset {
    docs: Vec<Doc>,
    splits: Splits,
}

impl LabeledDataset {
    /// Validates that the splits partition the docs and that training data
    /// has at least two classes.
    pub fn new(docs: Vec<Doc>, mut splits: Splits) -> Result<Self> {
        let mut seen = vec![false; docs.len()];
        for &i in splits
            .train
            .iter()
            .chain(&splits.test)
            .chain(&splits.validation)
        {
            match seen.get_mut(i) {
                None => return Err(EvalError::InvalidSplits(format!("index {i} out of range"))),
                Some(true) => {
                    return Err(EvalError::InvalidSplits(format!(
                        "doc {i} is in more than one split"
                    )))
                }
                Some(s) => *s = true,
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(EvalError::InvalidSplits(format!("doc {i} is in no split")));
        }
        let classes: BTreeSet<&str> = splits
            .train
            .iter()
            .map(|&i| docs[i].label.as_str())
            .collect();
        if classes.len() < 2 {
            return Err(EvalError::DegenerateTrain(classes.len()));
        }
        splits.train.sort_unstable();
        splits.test.sort_unstable();
        splits.validation.sort_unstable();
        Ok(LabeledDataset { docs, splits })
    }

    /// Shuffles indices with `seed` and cuts them by `ratios`.
    pub fn with_random_split(docs: Vec<Doc>, ratios: SplitRatios, seed: u64) -> Result<Self> {
        if !(ratios.train > 0.0 && ratios.test > 0.0 && ratios.train + ratios.test <= 1.0) {
            return Err(EvalError::InvalidSplits(format!(
                "bad ratios train={} test={}",
                ratios.train, ratios.test
            )));
        }
        let n = docs.len();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let n_train = (n as f64 * ratios.train).round() as usize;
        let n_test = ((n as f64 * ratios.test).round() as usize).min(n - n_train);
        let splits = Splits {
            train: idx[..n_train].to_vec(),
            test: idx[n_train..n_train + n_test].to_vec(),
            validation: idx[n_train + n_test..].to_vec(),
        };
        LabeledDataset::new(docs, splits)
    }

    pub fn docs(&self) -> &[Doc] {
        &self.docs
    }

    pub fn splits(&self) -> &Splits {
        &self.splits
    }

    pub fn train(&self) -> impl Iterator<Item = &Doc> {
        self.splits.train.iter().map(|&i| &self.docs[i])
    }

    pub fn test(&self) -> impl Iterator<Item = &Doc> {
        self.splits.test.iter().map(|&i| &self.docs[i])
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }
}

#[derive(Deserialize)]
struct CsvRow {
    text: String,
    label: String,
}

/// Reads a UTF-8 CSV with a `text,label` header.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Vec<Doc>> {
    let mut reader = csv::Reader::from_path(path)?;
    {
        let headers = reader.headers()?;
        if headers.iter().collect::<Vec<_>>() != ["text", "label"] {
            return Err(EvalError::CsvHeader(
                headers.iter().collect::<Vec<_>>().join(","),
            ));
        }
    }
    let mut docs = Vec::new();
    for row in reader.deserialize() {
        let row: CsvRow = row?;
        docs.push(Doc {
            text: row.text,
            label: row.label,
        });
    }
    Ok(docs)
}

pub fn write_csv(path: impl AsRef<Path>, docs: &[Doc]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["text", "label"])?;
    for d in docs {
        w.write_record([&d.text, &d.label])?;
    }
    w.flush()?;
    Ok(())
}
