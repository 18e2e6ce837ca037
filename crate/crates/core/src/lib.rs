//! Emoji-aware sentiment analysis for financial microblogs.
//!
//! The crate is organised as a pipeline:
//!
//! * [`corpus`] loads posts, filters them down to labeled emoji posts, balances
//!   classes and splits train/test sets.
//! * [`tokenizer`] segments post bodies into word, emoji and symbol tokens.
//! * [`vectorizer`] turns token sequences into sparse log-normalized TF-IDF
//!   vectors (or raw counts for Naive Bayes).
//! * [`classifier`] trains and evaluates logistic regression and multinomial
//!   Naive Bayes models, with bootstrap intervals, learning curves and timing
//!   harnesses.
//! * [`lexicon`] derives per-emoji and per-pair sentiment scores and emoji
//!   time-series indices.
//! * [`stats`] holds two-sample tests, chi-square / Cramér's V and entropy
//!   accounting used to compare emoji usage across corpora.
//!
//! Batch work (vectorizing, prediction, bootstrap resampling, exact test
//! enumeration) runs on rayon when the `parallel` feature is enabled and falls
//! back to plain iterators otherwise. Results never depend on the thread count.

pub mod classifier;
pub mod corpus;
mod error;
pub mod exec;
pub mod lexicon;
pub mod stats;
pub mod synthetic;
pub mod tokenizer;
pub mod vectorizer;

pub use error::{Error, ErrorKind, Result};
pub use exec::Execution;

/// Version string embedded in every serialized artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
