//! Emoji sentiment lexicons and emoji time-series indices.
//!
//! Scores use presence semantics: a post counts once for an emoji (or pair)
//! however often it repeats. For an emoji `e`,
//! `bullish_score(e) = #bullish posts containing e / #labeled posts containing e`.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, SentimentLabel};
use crate::tokenizer::{self, TokenizerMode};
use crate::{Error, Result};

const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmojiStats {
    pub emoji: String,
    pub code_points: Vec<String>,
    pub n_posts: u64,
    pub n_bullish: u64,
    pub n_bearish: u64,
    pub bullish_score: f64,
    pub bearish_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairStats {
    /// Ordered by code point: `pair[0] < pair[1]`.
    pub pair: [String; 2],
    pub code_points: [Vec<String>; 2],
    pub n_posts: u64,
    pub n_bullish: u64,
    pub n_bearish: u64,
    pub bullish_score: f64,
    pub bearish_score: f64,
}

/// `U+1F680`-style rendering of every scalar in `s`.
pub fn code_points(s: &str) -> Vec<String> {
    s.chars().map(|c| format!("U+{:04X}", c as u32)).collect()
}

#[derive(Default, Clone, Copy)]
struct Tally {
    bullish: u64,
    bearish: u64,
}

impl Tally {
    fn add(&mut self, label: SentimentLabel) {
        if label.is_bullish() {
            self.bullish += 1;
        } else {
            self.bearish += 1;
        }
    }

    fn total(self) -> u64 {
        self.bullish + self.bearish
    }

    fn scores(self) -> (f64, f64) {
        let n = self.total() as f64;
        (self.bullish as f64 / n, self.bearish as f64 / n)
    }
}

/// Labeled posts with their distinct emojis; unlabeled posts are skipped.
fn labeled_emoji_sets(c: &Corpus, mode: TokenizerMode) -> Result<Vec<(SentimentLabel, Vec<&str>)>> {
    if c.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let sets: Vec<_> = c
        .posts
        .iter()
        .filter_map(|p| Some((p.label?, tokenizer::distinct_emojis(&p.body, mode))))
        .collect();
    if sets.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(sets)
}

/// Sort by support descending, then key ascending; keep `top_k`.
fn top_k<K: Ord + Clone>(tallies: HashMap<K, Tally>, k: usize) -> Vec<(K, Tally)> {
    let mut entries: Vec<(K, Tally)> = tallies.into_iter().collect();
    entries.sort_by(|a, b| b.1.total().cmp(&a.1.total()).then_with(|| a.0.cmp(&b.0)));
    entries.truncate(k);
    entries
}

pub fn single_scores(c: &Corpus, top_k_n: usize, mode: TokenizerMode) -> Result<Vec<EmojiStats>> {
    let mut tallies: HashMap<&str, Tally> = HashMap::new();
    for (label, emojis) in labeled_emoji_sets(c, mode)? {
        for e in emojis {
            tallies.entry(e).or_default().add(label);
        }
    }
    Ok(top_k(tallies, top_k_n)
        .into_iter()
        .map(|(e, t)| {
            let (bull, bear) = t.scores();
            EmojiStats {
                emoji: e.to_string(),
                code_points: code_points(e),
                n_posts: t.total(),
                n_bullish: t.bullish,
                n_bearish: t.bearish,
                bullish_score: bull,
                bearish_score: bear,
            }
        })
        .collect())
}

pub fn pair_scores(c: &Corpus, top_k_n: usize, mode: TokenizerMode) -> Result<Vec<PairStats>> {
    let mut tallies: HashMap<(&str, &str), Tally> = HashMap::new();
    for (label, emojis) in labeled_emoji_sets(c, mode)? {
        // `emojis` is sorted and distinct, so (a, b) with a < b is the
        // normalized key and each pair is visited once per post.
        for (i, a) in emojis.iter().enumerate() {
            for b in &emojis[i + 1..] {
                tallies.entry((a, b)).or_default().add(label);
            }
        }
    }
    Ok(top_k(tallies, top_k_n)
        .into_iter()
        .map(|((a, b), t)| {
            let (bull, bear) = t.scores();
            PairStats {
                pair: [a.to_string(), b.to_string()],
                code_points: [code_points(a), code_points(b)],
                n_posts: t.total(),
                n_bullish: t.bullish,
                n_bearish: t.bearish,
                bullish_score: bull,
                bearish_score: bear,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountBucket {
    /// `"1"` .. `"9"` or `"10+"`.
    pub unique_count: String,
    pub n_posts: u64,
    pub n_bullish: u64,
    pub n_bearish: u64,
    /// Both fractions are 0 for an empty bucket.
    pub bullish_fraction: f64,
    pub bearish_fraction: f64,
}

/// Label mix of labeled posts grouped by number of distinct emojis
/// (1, 2, ..., 9, 10 or more). Posts without emojis are ignored.
pub fn count_buckets(c: &Corpus, mode: TokenizerMode) -> Vec<CountBucket> {
    let mut tallies = [Tally::default(); 10];
    for p in &c.posts {
        let Some(label) = p.label else { continue };
        let unique = tokenizer::distinct_emojis(&p.body, mode).len();
        if unique == 0 {
            continue;
        }
        tallies[unique.min(10) - 1].add(label);
    }
    tallies
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let (bull, bear) = if t.total() == 0 {
                (0.0, 0.0)
            } else {
                t.scores()
            };
            CountBucket {
                unique_count: if i == 9 {
                    "10+".into()
                } else {
                    (i + 1).to_string()
                },
                n_posts: t.total(),
                n_bullish: t.bullish,
                n_bearish: t.bearish,
                bullish_fraction: bull,
                bearish_fraction: bear,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmojiLexicon {
    pub format_version: u32,
    pub tokenizer_mode: TokenizerMode,
    pub top_k: usize,
    pub source_size: usize,
    pub singles: Vec<EmojiStats>,
    pub pairs: Vec<PairStats>,
}

impl EmojiLexicon {
    pub fn build(c: &Corpus, top_k: usize, mode: TokenizerMode) -> Result<Self> {
        Ok(EmojiLexicon {
            format_version: FORMAT_VERSION,
            tokenizer_mode: mode,
            top_k,
            source_size: c.len(),
            singles: single_scores(c, top_k, mode)?,
            pairs: pair_scores(c, top_k, mode)?,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let lex: EmojiLexicon = serde_json::from_str(text)?;
        if lex.format_version != FORMAT_VERSION {
            return Err(Error::FormatVersion(lex.format_version));
        }
        Ok(lex)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn single(&self, emoji: &str) -> Option<&EmojiStats> {
        self.singles.iter().find(|s| s.emoji == emoji)
    }

    pub fn classify(&self, body: &str, policy: LexiconPolicy) -> LexiconVerdict {
        classify_with_lexicon(body, self, policy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LexiconPolicy {
    /// Mean bullish score over the post's distinct in-lexicon emojis.
    #[default]
    MeanScore,
    /// Like `MeanScore`, but when any lexicon pair is present the mean runs
    /// over the matching pairs instead.
    PairAware,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LexiconVerdict {
    Bullish,
    Bearish,
    Abstain,
}

/// Classify a post body by lexicon scores alone; a mean of exactly 0.5 is
/// bullish, and a post without lexicon emojis abstains.
pub fn classify_with_lexicon(
    body: &str,
    lex: &EmojiLexicon,
    policy: LexiconPolicy,
) -> LexiconVerdict {
    let emojis = tokenizer::distinct_emojis(body, lex.tokenizer_mode);
    let mean = |scores: Vec<f64>| -> Option<f64> {
        (!scores.is_empty()).then(|| scores.iter().sum::<f64>() / scores.len() as f64)
    };
    let pair_mean = if policy == LexiconPolicy::PairAware {
        let scores: Vec<f64> = lex
            .pairs
            .iter()
            .filter(|p| {
                emojis.binary_search(&p.pair[0].as_str()).is_ok()
                    && emojis.binary_search(&p.pair[1].as_str()).is_ok()
            })
            .map(|p| p.bullish_score)
            .collect();
        mean(scores)
    } else {
        None
    };
    let score = pair_mean.or_else(|| {
        mean(
            emojis
                .iter()
                .filter_map(|e| lex.single(e).map(|s| s.bullish_score))
                .collect(),
        )
    });
    match score {
        None => LexiconVerdict::Abstain,
        Some(s) if s >= 0.5 => LexiconVerdict::Bullish,
        Some(_) => LexiconVerdict::Bearish,
    }
}

/// Daily share of posts containing `emoji` (UTC calendar days). Days without
/// posts are absent; posts without a timestamp are ignored.
pub fn emoji_index(
    c: &Corpus,
    emoji: &str,
    mode: TokenizerMode,
) -> Result<BTreeMap<NaiveDate, f64>> {
    let mut days: BTreeMap<NaiveDate, (u64, u64)> = BTreeMap::new();
    for p in &c.posts {
        let Some(ts) = p.created_at else { continue };
        let entry = days.entry(ts.date_naive()).or_default();
        entry.1 += 1;
        if tokenizer::extract_emojis(&p.body, mode).contains(&emoji) {
            entry.0 += 1;
        }
    }
    if days.is_empty() {
        return Err(Error::NoTimestamps);
    }
    Ok(days
        .into_iter()
        .map(|(d, (hits, n))| (d, hits as f64 / n as f64))
        .collect())
}

/// How two dated series are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Alignment {
    /// Raw values on common dates.
    #[default]
    Levels,
    /// Differences between consecutive common dates.
    Changes,
}

/// Common-date pairs of two series, optionally differenced.
pub fn align(
    a: &BTreeMap<NaiveDate, f64>,
    b: &BTreeMap<NaiveDate, f64>,
    alignment: Alignment,
) -> Vec<(NaiveDate, f64, f64)> {
    let common: Vec<(NaiveDate, f64, f64)> = a
        .iter()
        .filter_map(|(d, x)| b.get(d).map(|y| (*d, *x, *y)))
        .collect();
    match alignment {
        Alignment::Levels => common,
        Alignment::Changes => common
            .windows(2)
            .map(|w| (w[1].0, w[1].1 - w[0].1, w[1].2 - w[0].2))
            .collect(),
    }
}

/// Sample Pearson correlation.
pub fn pearson_corr(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::TooFew {
            needed: 2,
            got: a.len(),
        });
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::DegenerateVariance);
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Read a `date,value` CSV (header row required, ISO dates).
pub fn load_series_csv(path: &Path) -> Result<BTreeMap<NaiveDate, f64>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Invalid(format!("{other:?}")),
    })?;
    let mut out = BTreeMap::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let bad = || Error::Invalid(format!("{}: bad row {}", path.display(), line + 2));
        let date = record.get(0).ok_or_else(bad)?;
        let date = NaiveDate::parse_from_str(date.trim(), "%Y-%m-%d").map_err(|_| bad())?;
        let value: f64 = record
            .get(1)
            .ok_or_else(bad)?
            .trim()
            .parse()
            .map_err(|_| bad())?;
        out.insert(date, value);
    }
    if out.is_empty() {
        return Err(Error::Invalid(format!("{}: no rows", path.display())));
    }
    Ok(out)
}
