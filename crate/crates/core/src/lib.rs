//! Stopword curation for low-resource languages.
//!
//! The pipeline: [`corpus`] ingests and chunks a one-sentence-per-line corpus,
//! [`tfidf`] ranks each chunk's vocabulary by TF·IDF and keeps the lowest-k,
//! [`candidates`] intersects those lists across chunks, [`annotation`] runs the
//! reviewer vote, and [`stopwords`] applies the resulting list. [`eval`]
//! measures what removal does to a downstream classifier.

pub mod annotation;
pub mod candidates;
pub mod corpus;
pub mod eval;
pub mod stopwords;
pub mod text;
pub mod tfidf;

pub use text::{normalize, tokenize, Token};
