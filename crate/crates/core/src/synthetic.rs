//! Seeded synthetic corpora with known structure, for tests, benchmarks and
//! demonstrations when real data is unavailable.

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Post, SentimentLabel};

const FILLER: &[&str] = &[
    "the",
    "market",
    "today",
    "shares",
    "watching",
    "chart",
    "volume",
    "price",
    "earnings",
    "week",
    "open",
    "close",
    "trade",
    "position",
    "long",
    "term",
    "news",
    "guidance",
    "sector",
    "index",
    "after",
    "hours",
    "premarket",
    "support",
    "level",
    "float",
    "options",
    "this",
    "is",
    "it",
    "going",
    "what",
    "think",
    "again",
    "still",
    "just",
    "now",
    "here",
    "call",
    "company",
    "ceo",
    "report",
    "quarter",
    "analyst",
    "target",
    "retail",
    "fund",
    "buying",
    "selling",
    "holders",
];
const BULL_WORDS: &[&str] = &[
    "moon",
    "breakout",
    "rally",
    "squeeze",
    "undervalued",
    "ripping",
];
const BEAR_WORDS: &[&str] = &[
    "dump",
    "crash",
    "overvalued",
    "puts",
    "bagholders",
    "tanking",
];
const NEUTRAL_EMOJIS: &[&str] = &["😂", "👀", "🤔", "🔥", "💰"];
const TICKERS: &[&str] = &["AAPL", "TSLA", "GME", "AMC", "BTC", "ETH", "SPY", "NVDA"];

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub n_posts: usize,
    pub seed: u64,
    /// Fraction of posts whose label is flipped after generation.
    pub label_noise: f64,
    pub bullish_emoji: String,
    pub bearish_emoji: String,
    /// Probability that a post carries a polar word.
    pub text_signal: f64,
    /// Probability that the polar word agrees with the true label.
    pub text_agreement: f64,
    /// Probability of an extra neutral emoji.
    pub neutral_emoji_rate: f64,
    pub filler_words: (usize, usize),
    pub start: DateTime<Utc>,
    pub days: u32,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            n_posts: 20_000,
            seed: 42,
            label_noise: 0.05,
            bullish_emoji: "🚀".into(),
            bearish_emoji: "🩸".into(),
            text_signal: 0.4,
            text_agreement: 0.8,
            neutral_emoji_rate: 0.3,
            filler_words: (4, 16),
            start: Utc.with_ymd_and_hms(2021, 1, 1, 0, 0, 0).unwrap(),
            days: 60,
        }
    }
}

/// Balanced bullish/bearish posts where one emoji marks each class.
///
/// Every post carries its class marker one to three times, filler text, an
/// optional weakly informative word and an optional neutral emoji. Labels are
/// then flipped with probability `label_noise`, so the marker predicts the
/// stored label with accuracy about `1 - label_noise`.
pub fn marker_corpus(cfg: &SyntheticConfig) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut posts = Vec::with_capacity(cfg.n_posts);
    for i in 0..cfg.n_posts {
        let truth = if i % 2 == 0 {
            SentimentLabel::Bullish
        } else {
            SentimentLabel::Bearish
        };
        let n_words = rng.gen_range(cfg.filler_words.0..=cfg.filler_words.1);
        let mut words: Vec<String> = (0..n_words)
            .map(|_| FILLER.choose(&mut rng).unwrap().to_string())
            .collect();
        let ticker = *TICKERS.choose(&mut rng).unwrap();
        words.insert(rng.gen_range(0..=words.len()), format!("${ticker}"));
        if rng.gen_bool(cfg.text_signal) {
            let agree = rng.gen_bool(cfg.text_agreement);
            let bullish_word = truth.is_bullish() == agree;
            let pool = if bullish_word { BULL_WORDS } else { BEAR_WORDS };
            let w = pool.choose(&mut rng).unwrap().to_string();
            words.insert(rng.gen_range(0..=words.len()), w);
        }
        let marker = if truth.is_bullish() {
            &cfg.bullish_emoji
        } else {
            &cfg.bearish_emoji
        };
        let repeats = rng.gen_range(1..=3);
        let at = rng.gen_range(0..=words.len());
        words.insert(at, marker.repeat(repeats));
        if rng.gen_bool(cfg.neutral_emoji_rate) {
            let e = NEUTRAL_EMOJIS.choose(&mut rng).unwrap().to_string();
            words.insert(rng.gen_range(0..=words.len()), e);
        }
        let label = if rng.gen_bool(cfg.label_noise) {
            truth.flip()
        } else {
            truth
        };
        let offset = Duration::days(i64::from(rng.gen_range(0..cfg.days.max(1))))
            + Duration::seconds(rng.gen_range(0..86_400));
        posts.push(Post {
            id: format!("s{i:06}"),
            created_at: Some(cfg.start + offset),
            body: words.join(" "),
            label: Some(label),
            symbols: vec![ticker.to_string()],
        });
    }
    Corpus::new(
        posts,
        format!("synthetic:marker(seed={},n={})", cfg.seed, cfg.n_posts),
    )
}

/// Unlabeled posts whose emojis follow a Zipf law over `palette`
/// (`palette[0]` most frequent), one to three emojis per post.
pub fn palette_corpus(palette: &[&str], n_posts: usize, seed: u64) -> Corpus {
    let weights: Vec<f64> = (1..=palette.len()).map(|r| 1.0 / r as f64).collect();
    let total: f64 = weights.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        let mut u = rng.gen_range(0.0..total);
        for (e, w) in palette.iter().zip(&weights) {
            if u < *w {
                return *e;
            }
            u -= w;
        }
        palette[palette.len() - 1]
    };
    let posts = (0..n_posts)
        .map(|i| {
            let k = rng.gen_range(1..=3);
            let emojis: Vec<&str> = (0..k).map(|_| draw(&mut rng)).collect();
            let filler = FILLER.choose(&mut rng).unwrap();
            Post::new(
                format!("p{i:06}"),
                format!("{filler} {}", emojis.concat()),
                None,
            )
        })
        .collect();
    Corpus::new(posts, format!("synthetic:palette(seed={seed},n={n_posts})"))
}
