use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use emosent::classifier::ModelFamily;
use emosent::corpus::DataVariant;
use emosent::tokenizer::TokenizerMode;
use serde::Serialize;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(
    name = "emosent",
    version,
    about = "Emoji-aware sentiment analysis for financial microblogs"
)]
pub struct Cli {
    /// File of `key = value` lines supplying defaults for the subcommand's
    /// long flags. Flags given on the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Run all batch work on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Filter, balance and split a raw corpus into train/test JSONL.
    Prepare(PrepareArgs),
    /// Fit a vectorizer and a classifier.
    Train(TrainArgs),
    /// Score a trained model on a labeled corpus, with bootstrap intervals.
    Eval(EvalArgs),
    /// Per-emoji and per-pair sentiment scores.
    Lexicon(LexiconArgs),
    /// Compare emoji usage in two corpora.
    Compare(CompareArgs),
    /// Accuracy against training-set size.
    Curve(CurveArgs),
    /// Training and inference wall-clock timings.
    Bench(BenchArgs),
    /// Entropy of the top-mass word and emoji distributions.
    Entropy(EntropyArgs),
    /// Daily share of posts carrying an emoji, optionally correlated with a price series.
    Index(IndexArgs),
    /// Label mix, emoji coverage and length percentiles.
    Describe(DescribeArgs),
    /// Generate a synthetic corpus.
    Synth(SynthArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Prepare(_) => "prepare",
            Command::Train(_) => "train",
            Command::Eval(_) => "eval",
            Command::Lexicon(_) => "lexicon",
            Command::Compare(_) => "compare",
            Command::Curve(_) => "curve",
            Command::Bench(_) => "bench",
            Command::Entropy(_) => "entropy",
            Command::Index(_) => "index",
            Command::Describe(_) => "describe",
            Command::Synth(_) => "synth",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Jsonl,
    Csv,
}

#[derive(Debug, Args, Serialize)]
pub struct TokenizerArgs {
    /// Tokenizer: paper-regex or grapheme-emoji.
    #[arg(long, default_value = "paper-regex")]
    pub mode: TokenizerMode,
}

#[derive(Debug, Args, Serialize)]
pub struct TrainParams {
    /// L2 penalty strength (logistic regression).
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iters: usize,
    /// Gradient-norm stopping tolerance.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Laplace smoothing (Naive Bayes).
    #[arg(long, default_value_t = 1.0)]
    pub nb_alpha: f64,
    /// Probability cut-off for predicting bullish.
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct PrepareArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Input format; guessed from the extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Undersample the majority class before splitting.
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub balance: bool,
    #[arg(long, default_value_t = 0.2)]
    pub test_fraction: f64,
    /// Project post bodies onto this variant before writing.
    #[arg(long, default_value = "text-and-emoji")]
    pub variant: DataVariant,
    #[command(flatten)]
    pub tokenizer: TokenizerArgs,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output directory for train.jsonl, test.jsonl and manifest.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct TrainArgs {
    #[arg(long)]
    pub train: PathBuf,
    /// logistic or multinomial-nb (aliases: lr, nb).
    #[arg(long, default_value = "logistic")]
    pub family: ModelFamily,
    #[arg(long, default_value = "text-and-emoji")]
    pub variant: DataVariant,
    #[command(flatten)]
    pub tokenizer: TokenizerArgs,
    #[command(flatten)]
    pub params: TrainParams,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub model_out: PathBuf,
    /// Defaults to `<model-out stem>.vectorizer.json` next to the model.
    #[arg(long)]
    pub vectorizer_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    #[arg(long)]
    pub model_in: PathBuf,
    /// Defaults to `<model-in stem>.vectorizer.json` next to the model.
    #[arg(long)]
    pub vectorizer: Option<PathBuf>,
    #[arg(long)]
    pub test: PathBuf,
    /// Override the model's stored threshold.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Number of bootstrap resamples.
    #[arg(long, default_value_t = 1000)]
    pub bootstrap: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Optional CSV of per-post predictions.
    #[arg(long)]
    pub predictions_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct LexiconArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 50)]
    pub top_k: usize,
    /// Include pair scores.
    #[arg(long)]
    pub pairs: bool,
    /// Include emoji-count buckets.
    #[arg(long)]
    pub buckets: bool,
    #[command(flatten)]
    pub tokenizer: TokenizerArgs,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write the lexicon JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write singles.csv (and pairs.csv / buckets.csv when requested) here.
    #[arg(long)]
    pub csv_dir: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, default_value = "a")]
    pub name_a: String,
    #[arg(long, default_value = "b")]
    pub name_b: String,
    #[arg(long, default_value_t = 20)]
    pub top_k: usize,
    /// Frequency mass kept for the entropy reports.
    #[arg(long, default_value_t = 0.9)]
    pub mass: f64,
    #[command(flatten)]
    pub tokenizer: TokenizerArgs,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub rank_csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CurveArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    /// Comma-separated training sizes.
    #[arg(long, default_value = "100,1000,10000")]
    pub sizes: String,
    /// Comma-separated variants.
    #[arg(long, default_value = "text-only,emoji-only,text-and-emoji")]
    pub variants: String,
    #[arg(long, default_value = "logistic")]
    pub family: ModelFamily,
    #[command(flatten)]
    pub tokenizer: TokenizerArgs,
    #[command(flatten)]
    pub params: TrainParams,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BenchArgs {
    #[arg(long)]
    pub train: PathBuf,
    /// Posts to run inference on; defaults to the training corpus.
    #[arg(long)]
    pub infer: Option<PathBuf>,
    #[arg(long, default_value = "text-only,emoji-only,text-and-emoji")]
    pub variants: String,
    #[arg(long, default_value = "logistic")]
    pub family: ModelFamily,
    #[command(flatten)]
    pub tokenizer: TokenizerArgs,
    #[command(flatten)]
    pub params: TrainParams,
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct EntropyArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.9)]
    pub mass: f64,
    /// Rescale the kept symbols to a proper distribution before measuring.
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub renormalize: bool,
    #[command(flatten)]
    pub tokenizer: TokenizerArgs,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AlignmentArg {
    Levels,
    Changes,
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct IndexArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "🚀")]
    pub emoji: String,
    /// `date,value` CSV to correlate the index with.
    #[arg(long)]
    pub prices: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "both")]
    pub alignment: AlignmentArg,
    #[command(flatten)]
    pub tokenizer: TokenizerArgs,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write the `date,ratio` series here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DescribeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub tokenizer: TokenizerArgs,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SynthKind {
    /// Labeled posts where one emoji marks each class.
    Marker,
    /// Unlabeled posts with Zipf-distributed emojis from a palette.
    Palette,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long, value_enum, default_value = "marker")]
    pub kind: SynthKind,
    #[arg(long, default_value_t = 20_000)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Label-flip probability (marker).
    #[arg(long, default_value_t = 0.05)]
    pub noise: f64,
    #[arg(long, default_value = "🚀")]
    pub bullish_emoji: String,
    #[arg(long, default_value = "🩸")]
    pub bearish_emoji: String,
    /// Comma-separated emojis, most frequent first (palette).
    #[arg(long, default_value = "🚀,💎,📈,🔥,🐻,🩸,😂,👀,🤔,💰")]
    pub palette: String,
    /// Output path; `.csv` writes CSV, anything else JSONL.
    #[arg(long)]
    pub out: PathBuf,
}
