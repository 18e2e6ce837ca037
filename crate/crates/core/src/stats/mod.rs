//! Emoji and word frequency distributions, entropy accounting, descriptive
//! corpus statistics, and the tests used to compare two corpora.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::classifier::quantile;
use crate::corpus::{derive_variant, Corpus, DataVariant};
use crate::tokenizer::{self, TokenKind, TokenizerMode};
use crate::{Error, Execution, Result};

pub mod compare;
mod contingency;
pub mod special;
mod two_sample;

pub use compare::{compare, ComparisonReport, RankRow, RankTestInput, TaggedTest};
pub use contingency::{chi_square, cramers_v};
pub use two_sample::{
    ks_statistic, ks_two_sample, mann_whitney_u, TestResult, KS_EXACT_MAX_TOTAL,
    MWU_EXACT_MAX_PRODUCT,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// Each symbol counted at most once per post.
    Presence,
    /// Every occurrence counted.
    Occurrence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyDistribution {
    pub counts: BTreeMap<String, u64>,
    pub total: u64,
    pub basis: Basis,
}

impl FrequencyDistribution {
    pub fn new(basis: Basis) -> Self {
        FrequencyDistribution {
            counts: BTreeMap::new(),
            total: 0,
            basis,
        }
    }

    pub fn add(&mut self, symbol: &str, n: u64) {
        if n == 0 {
            return;
        }
        *self.counts.entry(symbol.to_string()).or_insert(0) += n;
        self.total += n;
    }

    pub fn get(&self, symbol: &str) -> u64 {
        self.counts.get(symbol).copied().unwrap_or(0)
    }

    pub fn unique(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn relative(&self, symbol: &str) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.get(symbol) as f64 / self.total as f64
        }
    }

    /// Symbols by count descending, ties by code point ascending.
    pub fn ranked(&self) -> Vec<(&str, u64)> {
        let mut v: Vec<(&str, u64)> = self.counts.iter().map(|(k, &c)| (k.as_str(), c)).collect();
        // BTreeMap iteration is already code-point ordered; a stable sort keeps it
        v.sort_by_key(|&(_, c)| std::cmp::Reverse(c));
        v
    }

    pub fn top(&self, k: usize) -> Vec<(&str, u64)> {
        let mut v = self.ranked();
        v.truncate(k);
        v
    }
}

/// Per-emoji number of posts containing it.
pub fn presence_frequencies(c: &Corpus, mode: TokenizerMode) -> FrequencyDistribution {
    let mut d = FrequencyDistribution::new(Basis::Presence);
    for p in &c.posts {
        for e in tokenizer::distinct_emojis(&p.body, mode) {
            d.add(e, 1);
        }
    }
    d
}

/// Per-emoji total number of occurrences.
pub fn occurrence_frequencies(c: &Corpus, mode: TokenizerMode) -> FrequencyDistribution {
    let mut d = FrequencyDistribution::new(Basis::Occurrence);
    for p in &c.posts {
        for e in tokenizer::extract_emojis(&p.body, mode) {
            d.add(e, 1);
        }
    }
    d
}

/// Occurrence counts of word tokens (emoji and punctuation excluded).
pub fn word_frequencies(c: &Corpus, mode: TokenizerMode) -> FrequencyDistribution {
    let mut d = FrequencyDistribution::new(Basis::Occurrence);
    for p in &c.posts {
        for t in tokenizer::tokenize(&p.body, mode) {
            if t.kind == TokenKind::Word {
                d.add(t.text, 1);
            }
        }
    }
    d
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub entropy_bits: f64,
    pub mass: f64,
    pub renormalized: bool,
    pub kept_symbols: usize,
    pub unique_symbols: usize,
    /// Frequency-weighted mean length, in Unicode scalar values, of the kept symbols.
    pub avg_token_length: f64,
    /// Fraction of the total covered by the kept symbols.
    pub kept_mass: f64,
    pub total: u64,
}

/// Shannon entropy (bits) of the shortest high-frequency prefix covering at
/// least `mass` of the distribution.
///
/// With `renormalize` the kept counts are rescaled to sum to one; otherwise
/// the kept symbols keep their original probabilities and the partial sum
/// `−Σ p log₂ p` over them is reported.
pub fn entropy_top_mass(
    d: &FrequencyDistribution,
    mass: f64,
    renormalize: bool,
) -> Result<EntropyReport> {
    if !(mass > 0.0 && mass <= 1.0) {
        return Err(Error::InvalidFraction(mass));
    }
    if d.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let ranked = d.ranked();
    let total = d.total as f64;
    let mut kept = 0u64;
    let mut n_kept = 0;
    for &(_, c) in &ranked {
        kept += c;
        n_kept += 1;
        if kept as f64 / total >= mass {
            break;
        }
    }
    let kept_items = &ranked[..n_kept];
    let denom = if renormalize { kept as f64 } else { total };
    let entropy_bits = kept_items
        .iter()
        .map(|&(_, c)| {
            let p = c as f64 / denom;
            -p * p.log2()
        })
        .sum::<f64>()
        .max(0.0);
    let avg_token_length = kept_items
        .iter()
        .map(|&(s, c)| s.chars().count() as f64 * c as f64)
        .sum::<f64>()
        / kept as f64;
    Ok(EntropyReport {
        entropy_bits,
        mass,
        renormalized: renormalize,
        kept_symbols: n_kept,
        unique_symbols: d.unique(),
        avg_token_length,
        kept_mass: kept as f64 / total,
        total: d.total,
    })
}

/// Percentiles reported for length distributions.
pub const PERCENTILES: [f64; 7] = [5.0, 25.0, 50.0, 75.0, 90.0, 95.0, 99.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Percentile {
    pub percentile: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthSummary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub percentiles: Vec<Percentile>,
}

impl LengthSummary {
    fn from_values(mut values: Vec<f64>) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        values.sort_by(f64::total_cmp);
        Some(LengthSummary {
            mean: values.iter().sum::<f64>() / values.len() as f64,
            min: values[0],
            max: values[values.len() - 1],
            percentiles: PERCENTILES
                .iter()
                .map(|&p| Percentile {
                    percentile: p,
                    value: quantile(&values, p / 100.0),
                })
                .collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusDescription {
    pub tokenizer_mode: TokenizerMode,
    pub n_posts: usize,
    pub n_bullish: usize,
    pub n_bearish: usize,
    pub n_unlabeled: usize,
    pub n_with_emoji: usize,
    pub unique_emojis: usize,
    pub unique_words: usize,
    /// Posts by number of emoji occurrences: index i is i emojis, last is 10+.
    pub emoji_count_histogram: Vec<u64>,
    /// Characters of the body with emojis removed.
    pub text_length: Option<LengthSummary>,
    /// Emoji occurrences per post, over posts with at least one emoji.
    pub emoji_length: Option<LengthSummary>,
}

/// Label mix, emoji coverage and length percentiles of a corpus.
pub fn describe(c: &Corpus, mode: TokenizerMode, exec: Execution) -> CorpusDescription {
    use crate::corpus::SentimentLabel::{Bearish, Bullish};
    let per_post = exec.map(&c.posts, |p| {
        let text = derive_variant(&p.body, DataVariant::TextOnly, mode);
        let n_emoji = tokenizer::extract_emojis(&p.body, mode).len();
        (text.chars().count(), n_emoji)
    });
    let mut histogram = vec![0u64; 11];
    for &(_, e) in &per_post {
        histogram[e.min(10)] += 1;
    }
    let n_with_emoji = per_post.iter().filter(|x| x.1 > 0).count();
    let unique_emojis: BTreeSet<&str> = c
        .posts
        .iter()
        .flat_map(|p| tokenizer::extract_emojis(&p.body, mode))
        .collect();
    CorpusDescription {
        tokenizer_mode: mode,
        n_posts: c.len(),
        n_bullish: c.count_label(Bullish),
        n_bearish: c.count_label(Bearish),
        n_unlabeled: c.posts.iter().filter(|p| p.label.is_none()).count(),
        n_with_emoji,
        unique_emojis: unique_emojis.len(),
        unique_words: word_frequencies(c, mode).unique(),
        emoji_count_histogram: histogram,
        text_length: LengthSummary::from_values(per_post.iter().map(|x| x.0 as f64).collect()),
        emoji_length: LengthSummary::from_values(
            per_post
                .iter()
                .filter(|x| x.1 > 0)
                .map(|x| x.1 as f64)
                .collect(),
        ),
    }
}
