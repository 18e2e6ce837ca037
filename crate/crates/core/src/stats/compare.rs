//! Side-by-side comparison of emoji usage in two corpora: a rank table,
//! chi-square with Cramér's V over the union of the top emojis, rank tests
//! and entropy reports.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    chi_square, cramers_v, entropy_top_mass, ks_two_sample, mann_whitney_u, occurrence_frequencies,
    presence_frequencies, EntropyReport, FrequencyDistribution, TestResult,
};
use crate::corpus::Corpus;
use crate::lexicon::code_points;
use crate::tokenizer::TokenizerMode;
use crate::{Error, Execution, Result};

/// What the rank tests are fed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankTestInput {
    /// One value per union emoji: its relative presence frequency in each corpus.
    FrequencyVector,
    /// One value per emoji-bearing post mention: the emoji's position in the
    /// union ordering, repeated by its presence count.
    Expanded,
}

impl RankTestInput {
    pub const ALL: [RankTestInput; 2] = [RankTestInput::FrequencyVector, RankTestInput::Expanded];

    pub fn name(self) -> &'static str {
        match self {
            RankTestInput::FrequencyVector => "frequency-vector",
            RankTestInput::Expanded => "expanded",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggedTest {
    pub input: RankTestInput,
    #[serde(flatten)]
    pub result: TestResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRow {
    pub rank: usize,
    pub emoji: String,
    pub code_points: Vec<String>,
    pub count_a: u64,
    pub rel_freq_a: f64,
    /// Position in corpus B's own ordering, if the emoji occurs there.
    pub rank_b: Option<usize>,
    pub count_b: u64,
    pub rel_freq_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub name: String,
    pub n_posts: usize,
    pub n_emoji_posts: usize,
    pub total: u64,
    pub unique: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub tokenizer_mode: TokenizerMode,
    pub top_k: usize,
    pub distributions: [DistributionSummary; 2],
    /// Top `top_k` emojis of corpus A by presence frequency.
    pub rank_table: Vec<RankRow>,
    /// Emojis forming the rows of the contingency table (union of both top-k sets).
    pub union: Vec<String>,
    pub chi_square: TestResult,
    pub cramers_v: f64,
    pub tests: Vec<TaggedTest>,
    pub entropy_reports: [EntropyReport; 2],
}

/// Compare emoji usage in `a` and `b`.
///
/// Frequencies are presence-based (an emoji counts once per post). Entropy
/// reports use occurrence counts truncated at `mass`.
pub fn compare(
    a: (&str, &Corpus),
    b: (&str, &Corpus),
    top_k: usize,
    mode: TokenizerMode,
    mass: f64,
    exec: Execution,
) -> Result<ComparisonReport> {
    if top_k == 0 {
        return Err(Error::Invalid("top_k must be positive".into()));
    }
    let da = presence_frequencies(a.1, mode);
    let db = presence_frequencies(b.1, mode);
    if da.is_empty() || db.is_empty() {
        return Err(Error::EmptyDistribution);
    }

    let ranked_b = db.ranked();
    let rank_table = da
        .top(top_k)
        .into_iter()
        .enumerate()
        .map(|(i, (e, count_a))| RankRow {
            rank: i + 1,
            emoji: e.to_string(),
            code_points: code_points(e),
            count_a,
            rel_freq_a: da.relative(e),
            rank_b: ranked_b.iter().position(|&(s, _)| s == e).map(|p| p + 1),
            count_b: db.get(e),
            rel_freq_b: db.relative(e),
        })
        .collect();

    // A's top-k in A order, then B's remaining top-k in B order.
    let mut union: Vec<String> = da
        .top(top_k)
        .into_iter()
        .map(|(e, _)| e.to_string())
        .collect();
    for (e, _) in db.top(top_k) {
        if !union.iter().any(|u| u == e) {
            union.push(e.to_string());
        }
    }

    let table: Vec<Vec<u64>> = union.iter().map(|e| vec![da.get(e), db.get(e)]).collect();
    let (chi, v) = if table.len() < 2 {
        // a single shared emoji: no association to measure
        let n = table[0][0] + table[0][1];
        let r = TestResult {
            method: "chi-square".into(),
            statistic: 0.0,
            p_value: 1.0,
            n_a: n as usize,
            n_b: 0,
            exact: false,
        };
        (r, 0.0)
    } else {
        let mut r = chi_square(&table)?;
        let n: u64 = table.iter().flatten().sum();
        let v = cramers_v(r.statistic, n, table.len(), 2)?;
        r.n_a = table.iter().map(|row| row[0]).sum::<u64>() as usize;
        r.n_b = table.iter().map(|row| row[1]).sum::<u64>() as usize;
        (r, v)
    };

    let mut tests = Vec::new();
    for input in RankTestInput::ALL {
        let (xa, xb) = rank_inputs(&da, &db, &union, input);
        if xa.is_empty() || xb.is_empty() {
            continue;
        }
        tests.push(TaggedTest {
            input,
            result: mann_whitney_u(&xa, &xb)?,
        });
        tests.push(TaggedTest {
            input,
            result: ks_two_sample(&xa, &xb, exec)?,
        });
    }

    let entropy = |c: &Corpus| entropy_top_mass(&occurrence_frequencies(c, mode), mass, true);
    let summary = |name: &str, c: &Corpus, d: &FrequencyDistribution| DistributionSummary {
        name: name.to_string(),
        n_posts: c.len(),
        n_emoji_posts: c.filter_emoji_posts(mode).len(),
        total: d.total,
        unique: d.unique(),
    };
    Ok(ComparisonReport {
        tokenizer_mode: mode,
        top_k,
        distributions: [summary(a.0, a.1, &da), summary(b.0, b.1, &db)],
        rank_table,
        union,
        chi_square: chi,
        cramers_v: v,
        tests,
        entropy_reports: [entropy(a.1)?, entropy(b.1)?],
    })
}

fn rank_inputs(
    da: &FrequencyDistribution,
    db: &FrequencyDistribution,
    union: &[String],
    input: RankTestInput,
) -> (Vec<f64>, Vec<f64>) {
    match input {
        RankTestInput::FrequencyVector => (
            union.iter().map(|e| da.relative(e)).collect(),
            union.iter().map(|e| db.relative(e)).collect(),
        ),
        RankTestInput::Expanded => {
            let expand = |d: &FrequencyDistribution| {
                union
                    .iter()
                    .enumerate()
                    .flat_map(|(i, e)| std::iter::repeat_n(i as f64, d.get(e) as usize))
                    .collect()
            };
            (expand(da), expand(db))
        }
    }
}

impl ComparisonReport {
    /// Rank table as CSV: rank, emoji, code points, and count / relative
    /// frequency / rank for each corpus.
    pub fn write_rank_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "rank",
            "emoji",
            "code_points",
            "count_a",
            "rel_freq_a",
            "rank_b",
            "count_b",
            "rel_freq_b",
        ])?;
        for r in &self.rank_table {
            w.write_record([
                r.rank.to_string(),
                r.emoji.clone(),
                r.code_points.join(" "),
                r.count_a.to_string(),
                format!("{:.6}", r.rel_freq_a),
                r.rank_b.map(|x| x.to_string()).unwrap_or_default(),
                r.count_b.to_string(),
                format!("{:.6}", r.rel_freq_b),
            ])?;
        }
        w.flush()
            .map_err(|e| Error::io(Path::new("<rank table>"), e))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Post, SentimentLabel};
    use crate::synthetic::palette_corpus;

    const MODE: TokenizerMode = TokenizerMode::GraphemeEmoji;

    fn corpus(bodies: &[&str]) -> Corpus {
        let posts = bodies
            .iter()
            .enumerate()
            .map(|(i, b)| Post::new(format!("p{i}"), *b, Some(SentimentLabel::Bearish)))
            .collect();
        Corpus::new(posts, "test")
    }

    #[test]
    fn identical_corpora() {
        let c = corpus(&["🚀 go", "🚀💎", "💎", "📈 up 🚀", "🐻"]);
        let r = compare(("a", &c), ("b", &c), 20, MODE, 0.9, Execution::Parallel).unwrap();
        assert_eq!(r.chi_square.statistic, 0.0);
        assert_eq!(r.chi_square.p_value, 1.0);
        assert_eq!(r.cramers_v, 0.0);
        assert_eq!(r.rank_table[0].emoji, "🚀");
        assert_eq!(r.rank_table[0].rank_b, Some(1));
        for t in &r.tests {
            assert!(t.result.p_value > 0.99, "{t:?}");
        }
        assert_eq!(r.tests.len(), 4);
    }

    #[test]
    fn disjoint_corpora() {
        let a = corpus(&["🚀", "🚀💎", "💎", "🚀"]);
        let b = corpus(&["🐻", "🩸🐻", "🩸"]);
        let r = compare(("a", &a), ("b", &b), 20, MODE, 0.9, Execution::Sequential).unwrap();
        assert!((r.cramers_v - 1.0).abs() < 1e-12);
        assert_eq!(r.union, vec!["🚀", "💎", "🐻", "🩸"]);
        assert_eq!(r.rank_table.len(), 2);
        assert_eq!(r.rank_table[1].rank_b, None);
        assert_eq!(r.rank_table[1].count_b, 0);
    }

    #[test]
    fn rank_table_sorted_by_a() {
        let palette = ["🚀", "💎", "📈", "🔥", "🐻", "🩸"];
        let a = palette_corpus(&palette, 400, 1);
        let b = palette_corpus(&palette, 300, 2);
        let r = compare(("a", &a), ("b", &b), 4, MODE, 0.9, Execution::Parallel).unwrap();
        assert_eq!(r.rank_table.len(), 4);
        assert!(r
            .rank_table
            .windows(2)
            .all(|w| w[0].count_a >= w[1].count_a));
        let mut buf = Vec::new();
        r.write_rank_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("rank,emoji,code_points"));
    }

    #[test]
    fn errors() {
        let a = corpus(&["no emoji here"]);
        let b = corpus(&["🚀"]);
        assert!(matches!(
            compare(("a", &a), ("b", &b), 5, MODE, 0.9, Execution::Sequential),
            Err(Error::EmptyDistribution)
        ));
        assert!(compare(("a", &b), ("b", &b), 0, MODE, 0.9, Execution::Sequential).is_err());
        // one shared emoji on both sides still produces a report
        let r = compare(("a", &b), ("b", &b), 5, MODE, 0.9, Execution::Sequential).unwrap();
        assert_eq!(r.cramers_v, 0.0);
    }
}
