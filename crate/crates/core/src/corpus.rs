//! Post records, loading, filtering, balancing and splitting.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::tokenizer::{self, TokenKind, TokenizerMode};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentimentLabel {
    Bullish,
    Bearish,
}

impl SentimentLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            SentimentLabel::Bullish => "bullish",
            SentimentLabel::Bearish => "bearish",
        }
    }

    pub fn flip(self) -> Self {
        match self {
            SentimentLabel::Bullish => SentimentLabel::Bearish,
            SentimentLabel::Bearish => SentimentLabel::Bullish,
        }
    }

    pub fn is_bullish(self) -> bool {
        self == SentimentLabel::Bullish
    }
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SentimentLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bullish" => Ok(SentimentLabel::Bullish),
            "bearish" => Ok(SentimentLabel::Bearish),
            other => Err(format!("unknown label {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Post {
    pub id: String,
    pub created_at: Option<DateTime<Utc>>,
    pub body: String,
    pub label: Option<SentimentLabel>,
    #[serde(default)]
    pub symbols: Vec<String>,
}

impl Post {
    pub fn new(
        id: impl Into<String>,
        body: impl Into<String>,
        label: Option<SentimentLabel>,
    ) -> Self {
        Post {
            id: id.into(),
            created_at: None,
            body: body.into(),
            label,
            symbols: Vec::new(),
        }
    }
}

/// Projection of a post used as model input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataVariant {
    TextOnly,
    EmojiOnly,
    TextAndEmoji,
}

impl DataVariant {
    pub const ALL: [DataVariant; 3] = [
        DataVariant::TextOnly,
        DataVariant::EmojiOnly,
        DataVariant::TextAndEmoji,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DataVariant::TextOnly => "text-only",
            DataVariant::EmojiOnly => "emoji-only",
            DataVariant::TextAndEmoji => "text-and-emoji",
        }
    }
}

impl fmt::Display for DataVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DataVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "text-only" | "text" => Ok(DataVariant::TextOnly),
            "emoji-only" | "emoji" => Ok(DataVariant::EmojiOnly),
            "text-and-emoji" | "text+emoji" | "both" => Ok(DataVariant::TextAndEmoji),
            other => Err(format!("unknown data variant {other:?}")),
        }
    }
}

/// Project a post body onto a data variant.
///
/// `TextOnly` drops emoji tokens and normalises whitespace, `EmojiOnly` keeps
/// the emoji tokens in order joined by single spaces.
pub fn derive_variant(body: &str, variant: DataVariant, mode: TokenizerMode) -> String {
    match variant {
        DataVariant::TextAndEmoji => body.to_string(),
        DataVariant::TextOnly => tokenizer::strip_emojis(body, mode),
        DataVariant::EmojiOnly => tokenizer::extract_emojis(body, mode).join(" "),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Jsonl,
    Csv,
}

impl InputFormat {
    /// Guess from the file extension; anything but `.csv` is JSONL.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => InputFormat::Csv,
            _ => InputFormat::Jsonl,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub posts: Vec<Post>,
    /// Source path followed by the filters applied, e.g. `in.jsonl|emoji|labeled`.
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub corpus: Corpus,
    pub skipped: usize,
}

#[derive(Debug, Deserialize)]
struct RawRecord {
    id: Option<serde_json::Value>,
    created_at: Option<String>,
    body: Option<String>,
    label: Option<String>,
    #[serde(default)]
    symbols: Option<serde_json::Value>,
}

#[derive(Debug, Serialize)]
struct OutRecord<'a> {
    id: &'a str,
    created_at: Option<String>,
    body: &'a str,
    label: Option<&'static str>,
    symbols: &'a [String],
}

fn parse_timestamp(raw: Option<&str>) -> Option<DateTime<Utc>> {
    let raw = raw?.trim();
    if raw.is_empty() {
        return None;
    }
    DateTime::parse_from_rfc3339(raw)
        .ok()
        .map(|t| t.with_timezone(&Utc))
}

fn format_timestamp(t: &DateTime<Utc>) -> String {
    t.to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn parse_label(raw: Option<&str>) -> std::result::Result<Option<SentimentLabel>, ()> {
    match raw.map(str::trim) {
        None | Some("") => Ok(None),
        Some(s) if s.eq_ignore_ascii_case("null") => Ok(None),
        Some(s) => s.parse().map(Some).map_err(|_| ()),
    }
}

fn record_to_post(raw: RawRecord) -> Option<Post> {
    let id = match raw.id? {
        serde_json::Value::String(s) => s,
        serde_json::Value::Number(n) => n.to_string(),
        _ => return None,
    };
    if id.is_empty() {
        return None;
    }
    let body = raw.body?;
    let label = parse_label(raw.label.as_deref()).ok()?;
    let symbols = match raw.symbols {
        None | Some(serde_json::Value::Null) => Vec::new(),
        Some(serde_json::Value::Array(items)) => items
            .into_iter()
            .map(|v| match v {
                serde_json::Value::String(s) => Some(s),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?,
        Some(serde_json::Value::String(s)) => split_symbols(&s),
        Some(_) => return None,
    };
    Some(Post {
        id,
        created_at: parse_timestamp(raw.created_at.as_deref()),
        body,
        label,
        symbols,
    })
}

fn split_symbols(s: &str) -> Vec<String> {
    s.split('|')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(String::from)
        .collect()
}

impl Corpus {
    pub fn new(posts: Vec<Post>, provenance: impl Into<String>) -> Self {
        Corpus {
            posts,
            provenance: provenance.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.posts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posts.is_empty()
    }

    pub fn labels(&self) -> Vec<Option<SentimentLabel>> {
        self.posts.iter().map(|p| p.label).collect()
    }

    /// Labels of a fully labeled corpus.
    pub fn require_labels(&self) -> Result<Vec<SentimentLabel>> {
        self.posts
            .iter()
            .map(|p| p.label.ok_or_else(|| Error::Unlabeled(p.id.clone())))
            .collect()
    }

    pub fn count_label(&self, label: SentimentLabel) -> usize {
        self.posts.iter().filter(|p| p.label == Some(label)).count()
    }

    fn derived(&self, posts: Vec<Post>, step: &str) -> Corpus {
        Corpus {
            posts,
            provenance: format!("{}|{}", self.provenance, step),
        }
    }

    /// Load posts from JSONL or CSV. Malformed records are skipped and counted.
    pub fn load(path: &Path, format: InputFormat) -> Result<Loaded> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut posts = Vec::new();
        let mut skipped = 0usize;
        match format {
            InputFormat::Jsonl => {
                for line in BufReader::new(file).lines() {
                    let line = line.map_err(|e| Error::io(path, e))?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    match serde_json::from_str::<RawRecord>(&line)
                        .ok()
                        .and_then(record_to_post)
                    {
                        Some(p) => posts.push(p),
                        None => skipped += 1,
                    }
                }
            }
            InputFormat::Csv => {
                let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(file);
                let headers = reader.headers()?.clone();
                let col = |name: &str| headers.iter().position(|h| h.trim() == name);
                let (id_col, ts_col, body_col, label_col, sym_col) = (
                    col("id"),
                    col("created_at"),
                    col("body"),
                    col("label"),
                    col("symbols"),
                );
                for record in reader.records() {
                    let Ok(record) = record else {
                        skipped += 1;
                        continue;
                    };
                    let get = |c: Option<usize>| c.and_then(|i| record.get(i));
                    let raw = RawRecord {
                        id: get(id_col).map(|s| serde_json::Value::String(s.to_string())),
                        created_at: get(ts_col).map(String::from),
                        body: get(body_col).map(String::from),
                        label: get(label_col).map(String::from),
                        symbols: get(sym_col).map(|s| serde_json::Value::String(s.to_string())),
                    };
                    match record_to_post(raw) {
                        Some(p) => posts.push(p),
                        None => skipped += 1,
                    }
                }
            }
        }
        if posts.is_empty() {
            return Err(Error::NoRecords {
                path: path.to_path_buf(),
            });
        }
        let mut seen = HashSet::with_capacity(posts.len());
        for p in &posts {
            if !seen.insert(p.id.as_str()) {
                return Err(Error::DuplicateId(p.id.clone()));
            }
        }
        Ok(Loaded {
            corpus: Corpus::new(posts, path.display().to_string()),
            skipped,
        })
    }

    pub fn write_jsonl(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        for p in &self.posts {
            let rec = OutRecord {
                id: &p.id,
                created_at: p.created_at.as_ref().map(format_timestamp),
                body: &p.body,
                label: p.label.map(SentimentLabel::as_str),
                symbols: &p.symbols,
            };
            serde_json::to_writer(&mut w, &rec)?;
            w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["id", "created_at", "body", "label", "symbols"])?;
        for p in &self.posts {
            w.write_record([
                p.id.as_str(),
                &p.created_at
                    .as_ref()
                    .map(format_timestamp)
                    .unwrap_or_default(),
                p.body.as_str(),
                p.label.map(SentimentLabel::as_str).unwrap_or(""),
                &p.symbols.join("|"),
            ])?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Keep posts whose body contains at least one emoji.
    pub fn filter_emoji_posts(&self, mode: TokenizerMode) -> Corpus {
        let posts = self
            .posts
            .iter()
            .filter(|p| {
                tokenizer::tokenize(&p.body, mode)
                    .iter()
                    .any(|t| t.kind == TokenKind::Emoji)
            })
            .cloned()
            .collect();
        self.derived(posts, "emoji")
    }

    pub fn filter_labeled(&self) -> Corpus {
        let posts = self
            .posts
            .iter()
            .filter(|p| p.label.is_some())
            .cloned()
            .collect();
        self.derived(posts, "labeled")
    }

    /// Undersample the majority class to the minority count.
    ///
    /// The minority class is kept whole; majority posts are drawn uniformly
    /// without replacement. File order is preserved among the kept posts.
    pub fn balance_undersample(&self, seed: u64) -> Result<Corpus> {
        let labels = self.require_labels()?;
        let bull: Vec<usize> = (0..labels.len())
            .filter(|&i| labels[i].is_bullish())
            .collect();
        let bear: Vec<usize> = (0..labels.len())
            .filter(|&i| !labels[i].is_bullish())
            .collect();
        if bull.is_empty() {
            return Err(Error::MissingClass(SentimentLabel::Bullish));
        }
        if bear.is_empty() {
            return Err(Error::MissingClass(SentimentLabel::Bearish));
        }
        let (minority, majority) = if bull.len() <= bear.len() {
            (bull, bear)
        } else {
            (bear, bull)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut keep: Vec<usize> = index::sample(&mut rng, majority.len(), minority.len())
            .into_iter()
            .map(|i| majority[i])
            .chain(minority.iter().copied())
            .collect();
        keep.sort_unstable();
        let posts = keep.into_iter().map(|i| self.posts[i].clone()).collect();
        Ok(self.derived(posts, &format!("balanced(seed={seed})")))
    }

    /// Seeded train/test split, stratified by label when every post is labeled.
    ///
    /// `|test| = round(test_fraction * |corpus|)`. Both halves keep file order.
    pub fn split(&self, test_fraction: f64, seed: u64) -> Result<(Corpus, Corpus)> {
        if !(test_fraction > 0.0 && test_fraction < 1.0) {
            return Err(Error::InvalidFraction(test_fraction));
        }
        let n = self.len();
        if n < 2 {
            return Err(Error::TooFew { needed: 2, got: n });
        }
        let n_test = ((test_fraction * n as f64).round() as usize).clamp(1, n - 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut in_test = vec![false; n];

        let stratified = self.posts.iter().all(|p| p.label.is_some());
        if stratified {
            let mut bull: Vec<usize> = Vec::new();
            let mut bear: Vec<usize> = Vec::new();
            for (i, p) in self.posts.iter().enumerate() {
                match p.label {
                    Some(SentimentLabel::Bullish) => bull.push(i),
                    _ => bear.push(i),
                }
            }
            bull.shuffle(&mut rng);
            bear.shuffle(&mut rng);
            let bull_test = ((n_test as f64 * bull.len() as f64 / n as f64).round() as usize)
                .min(bull.len())
                .max(n_test.saturating_sub(bear.len()));
            let bear_test = n_test - bull_test;
            for &i in bull[..bull_test].iter().chain(&bear[..bear_test]) {
                in_test[i] = true;
            }
        } else {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            for &i in &order[..n_test] {
                in_test[i] = true;
            }
        }

        let (mut train, mut test) = (Vec::with_capacity(n - n_test), Vec::with_capacity(n_test));
        for (p, t) in self.posts.iter().zip(in_test) {
            if t {
                test.push(p.clone());
            } else {
                train.push(p.clone());
            }
        }
        let tag = format!("split(test={test_fraction},seed={seed})");
        Ok((
            self.derived(train, &format!("{tag}:train")),
            self.derived(test, &format!("{tag}:test")),
        ))
    }

    /// Copy of the corpus with every body projected onto `variant`.
    pub fn with_variant(&self, variant: DataVariant, mode: TokenizerMode) -> Corpus {
        let posts = self
            .posts
            .iter()
            .map(|p| Post {
                body: derive_variant(&p.body, variant, mode),
                ..p.clone()
            })
            .collect();
        self.derived(posts, variant.name())
    }

    /// Seeded uniform subsample of `size` posts, file order preserved.
    pub fn subsample(&self, size: usize, seed: u64) -> Result<Corpus> {
        if size > self.len() {
            return Err(Error::SizeTooLarge {
                size,
                available: self.len(),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut keep = index::sample(&mut rng, self.len(), size).into_vec();
        keep.sort_unstable();
        let posts = keep.into_iter().map(|i| self.posts[i].clone()).collect();
        Ok(self.derived(posts, &format!("sample({size},seed={seed})")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::NamedTempFile;
    use SentimentLabel::*;

    fn labeled(n_bull: usize, n_bear: usize) -> Corpus {
        let mut posts = Vec::new();
        for i in 0..n_bull {
            posts.push(Post::new(format!("u{i}"), "up 🚀", Some(Bullish)));
        }
        for i in 0..n_bear {
            posts.push(Post::new(format!("d{i}"), "down 🩸", Some(Bearish)));
        }
        Corpus::new(posts, "mem")
    }

    fn write_temp(contents: &str, suffix: &str) -> NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(suffix).tempfile().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn jsonl_skips_malformed_lines() {
        let f = write_temp(
            concat!(
                r#"{"id":"1","created_at":"2021-02-01T10:00:00Z","body":"🚀","label":"bullish","symbols":["GME"]}"#,
                "\n{not json\n",
                r#"{"id":"2","created_at":null,"body":"meh","label":null,"symbols":[]}"#,
                "\n"
            ),
            ".jsonl",
        );
        let loaded = Corpus::load(f.path(), InputFormat::Jsonl).unwrap();
        assert_eq!(loaded.corpus.len(), 2);
        assert_eq!(loaded.skipped, 1);
        assert_eq!(loaded.corpus.posts[0].symbols, vec!["GME"]);
        assert!(loaded.corpus.posts[0].created_at.is_some());
        assert_eq!(loaded.corpus.posts[1].label, None);
    }

    #[test]
    fn bad_timestamp_keeps_post() {
        let f = write_temp(
            r#"{"id":"1","created_at":"yesterday","body":"x","label":"bearish"}"#,
            ".jsonl",
        );
        let loaded = Corpus::load(f.path(), InputFormat::Jsonl).unwrap();
        assert_eq!(loaded.corpus.posts[0].created_at, None);
        assert_eq!(loaded.corpus.posts[0].label, Some(Bearish));
    }

    #[test]
    fn load_errors() {
        let empty = write_temp("", ".jsonl");
        assert!(matches!(
            Corpus::load(empty.path(), InputFormat::Jsonl),
            Err(Error::NoRecords { .. })
        ));
        let dup = write_temp(
            "{\"id\":\"a\",\"body\":\"x\"}\n{\"id\":\"a\",\"body\":\"y\"}\n",
            ".jsonl",
        );
        assert!(matches!(
            Corpus::load(dup.path(), InputFormat::Jsonl),
            Err(Error::DuplicateId(id)) if id == "a"
        ));
        let missing = Corpus::load(Path::new("/nonexistent/posts.jsonl"), InputFormat::Jsonl);
        assert!(matches!(missing, Err(Error::Io { .. })));
    }

    #[test]
    fn csv_round_trip_preserves_order() {
        let f = write_temp(
            "id,created_at,body,label,symbols\n\
             5,2021-01-01T00:00:00Z,to the moon 🚀,bullish,GME|AMC\n\
             3,,\"sell, sell, sell 🩸\",bearish,\n\
             9,2021-01-02T12:30:00+02:00,just looking,,TSLA\n\
             1,2021-01-03T00:00:00Z,💎🙌,bullish,\n\
             7,2021-01-04T00:00:00Z,\"quoted \"\"text\"\"\",bearish,BTC\n",
            ".csv",
        );
        let loaded = Corpus::load(f.path(), InputFormat::from_path(f.path())).unwrap();
        let c = &loaded.corpus;
        let ids: Vec<&str> = c.posts.iter().map(|p| p.id.as_str()).collect();
        assert_eq!(ids, ["5", "3", "9", "1", "7"]);
        assert_eq!(c.posts[0].symbols, ["GME", "AMC"]);
        assert_eq!(c.posts[1].body, "sell, sell, sell 🩸");
        assert_eq!(c.posts[2].label, None);
        assert_eq!(
            c.posts[2].created_at.unwrap().to_rfc3339(),
            "2021-01-02T10:30:00+00:00"
        );
        assert_eq!(c.posts[4].body, "quoted \"text\"");

        let out = tempfile::Builder::new().suffix(".csv").tempfile().unwrap();
        c.write_csv(out.path()).unwrap();
        let again = Corpus::load(out.path(), InputFormat::Csv).unwrap().corpus;
        assert_eq!(again.posts, c.posts);
    }

    #[test]
    fn emoji_filter() {
        let c = Corpus::new(
            vec![
                Post::new("1", "buy AAPL", None),
                Post::new("2", "🚀", None),
                Post::new("3", "to the moon 🌙", None),
                Post::new("4", "👩\u{200D}🚀", None),
            ],
            "mem",
        );
        for mode in [TokenizerMode::PaperRegex, TokenizerMode::GraphemeEmoji] {
            let kept = c.filter_emoji_posts(mode);
            assert_eq!(kept.len(), 3);
            assert!(kept.provenance.ends_with("|emoji"));
        }
        let none = Corpus::new(vec![Post::new("1", "text", None)], "mem");
        assert!(none
            .filter_emoji_posts(TokenizerMode::PaperRegex)
            .is_empty());
    }

    #[test]
    fn labeled_filter() {
        let mut c = labeled(3, 2);
        for i in 0..3 {
            c.posts.push(Post::new(format!("n{i}"), "🙂", None));
        }
        assert_eq!(c.filter_labeled().len(), 5);
        let all = labeled(2, 2);
        assert_eq!(all.filter_labeled().posts, all.posts);
        let none = Corpus::new(vec![Post::new("x", "🙂", None)], "mem");
        assert!(none.filter_labeled().is_empty());
    }

    #[test]
    fn undersampling() {
        let c = labeled(85, 15);
        let b = c.balance_undersample(42).unwrap();
        assert_eq!(b.count_label(Bullish), 15);
        assert_eq!(b.count_label(Bearish), 15);
        assert_eq!(b.posts, c.balance_undersample(42).unwrap().posts);
        assert_ne!(b.posts, c.balance_undersample(43).unwrap().posts);

        let even = labeled(10, 10);
        assert_eq!(even.balance_undersample(1).unwrap().posts, even.posts);
        assert!(matches!(
            labeled(5, 0).balance_undersample(1),
            Err(Error::MissingClass(Bearish))
        ));
    }

    #[test]
    fn split_contract() {
        let c = labeled(50, 50);
        let (train, test) = c.split(0.2, 7).unwrap();
        assert_eq!((train.len(), test.len()), (80, 20));
        let ids: HashSet<&str> = train.posts.iter().map(|p| p.id.as_str()).collect();
        assert!(test.posts.iter().all(|p| !ids.contains(p.id.as_str())));
        assert_eq!(test.count_label(Bullish), 10);

        let (_, t1) = c.split(0.2, 1).unwrap();
        let (_, t2) = c.split(0.2, 2).unwrap();
        assert_ne!(t1.posts, t2.posts);
        assert_eq!(c.split(0.2, 1).unwrap().1.posts, t1.posts);

        assert!(matches!(c.split(0.0, 1), Err(Error::InvalidFraction(_))));
        assert!(matches!(c.split(1.0, 1), Err(Error::InvalidFraction(_))));
        assert!(matches!(
            labeled(1, 0).split(0.5, 1),
            Err(Error::TooFew { .. })
        ));
    }

    #[test]
    fn unstratified_split_on_partial_labels() {
        let mut c = labeled(10, 10);
        c.posts.push(Post::new("n", "🙂", None));
        let (train, test) = c.split(0.3, 3).unwrap();
        assert_eq!(test.len(), 6);
        assert_eq!(train.len() + test.len(), 21);
    }

    #[test]
    fn variants() {
        let m = TokenizerMode::PaperRegex;
        assert_eq!(
            derive_variant("AAPL 🚀 moon", DataVariant::TextOnly, m),
            "AAPL moon"
        );
        assert_eq!(
            derive_variant("AAPL 🚀 moon", DataVariant::EmojiOnly, m),
            "🚀"
        );
        assert_eq!(derive_variant("🚀🚀", DataVariant::TextOnly, m), "");
        assert_eq!(derive_variant("🚀🚀", DataVariant::EmojiOnly, m), "🚀 🚀");
        assert_eq!(derive_variant("pure text", DataVariant::EmojiOnly, m), "");
        assert_eq!(
            derive_variant("pure  text", DataVariant::TextOnly, m),
            "pure text"
        );
        assert_eq!(derive_variant("x 🚀", DataVariant::TextAndEmoji, m), "x 🚀");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_body() -> impl Strategy<Value = String> {
            let pieces = prop::sample::select(vec![
                "buy",
                " ",
                "$",
                "TSLA",
                "!!",
                "🚀",
                "💎",
                "🩸",
                "👩\u{200D}🚀",
                "🇺🇸",
                "\n",
                "42",
            ]);
            prop::collection::vec(pieces, 0..16).prop_map(|v| v.concat())
        }

        proptest! {
            #[test]
            fn variants_partition_tokens(body in arb_body()) {
                for mode in [TokenizerMode::PaperRegex, TokenizerMode::GraphemeEmoji] {
                    let mut all: Vec<String> = tokenizer::token_texts(&body, mode)
                        .into_iter().map(String::from).collect();
                    let text = derive_variant(&body, DataVariant::TextOnly, mode);
                    let emoji = derive_variant(&body, DataVariant::EmojiOnly, mode);
                    let mut parts: Vec<String> = tokenizer::token_texts(&text, mode)
                        .into_iter()
                        .chain(tokenizer::token_texts(&emoji, mode))
                        .map(String::from)
                        .collect();
                    all.sort();
                    parts.sort();
                    prop_assert_eq!(all, parts);
                }
            }

            #[test]
            fn balance_and_split_invariants(n_bull in 1usize..40, n_bear in 1usize..40, seed in any::<u64>()) {
                let c = labeled(n_bull, n_bear);
                let b = c.balance_undersample(seed).unwrap();
                prop_assert_eq!(b.count_label(Bullish), b.count_label(Bearish));
                prop_assert_eq!(b.count_label(Bullish), n_bull.min(n_bear));
                let (train, test) = c.split(0.25, seed).unwrap();
                let mut ids: Vec<&str> = train.posts.iter().chain(&test.posts).map(|p| p.id.as_str()).collect();
                ids.sort();
                let mut orig: Vec<&str> = c.posts.iter().map(|p| p.id.as_str()).collect();
                orig.sort();
                prop_assert_eq!(ids, orig);
                prop_assert_eq!(test.len(), ((0.25 * c.len() as f64).round() as usize).clamp(1, c.len() - 1));
            }
        }
    }
}
