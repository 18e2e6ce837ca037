use std::path::Path;

use emosent::classifier::{
    benchmark, bootstrap_ci, learning_curve, BenchReport, FittedPipeline, PipelineSpec, Timing,
    TrainConfig,
};
use emosent::corpus::{Corpus, DataVariant, InputFormat, SentimentLabel};
use emosent::lexicon::{
    self, align, emoji_index, load_series_csv, pearson_corr, Alignment, EmojiLexicon,
};
use emosent::stats::{self, entropy_top_mass};
use emosent::synthetic::{marker_corpus, palette_corpus, SyntheticConfig};
use emosent::vectorizer::TfIdfModel;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::manifest::RunContext;
use crate::model::{sibling_vectorizer_path, ModelFile, TrainingInfo};

fn load_corpus(ctx: &mut RunContext, path: &Path, format: Option<FormatArg>) -> CliResult<Corpus> {
    let format = match format {
        Some(FormatArg::Jsonl) => InputFormat::Jsonl,
        Some(FormatArg::Csv) => InputFormat::Csv,
        None => InputFormat::from_path(path),
    };
    let loaded = ctx.stage("load", || Corpus::load(path, format))?;
    if loaded.skipped > 0 {
        eprintln!(
            "{}: skipped {} malformed record(s)",
            path.display(),
            loaded.skipped
        );
    }
    ctx.input(path)?;
    Ok(loaded.corpus)
}

fn label_counts(c: &Corpus) -> Value {
    json!({
        "n": c.len(),
        "bullish": c.count_label(SentimentLabel::Bullish),
        "bearish": c.count_label(SentimentLabel::Bearish),
    })
}

fn create_dir(path: &Path) -> CliResult<()> {
    std::fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

fn create_parent(path: &Path) -> CliResult<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => create_dir(dir),
        _ => Ok(()),
    }
}

fn write_corpus(ctx: &mut RunContext, c: &Corpus, path: &Path) -> CliResult<()> {
    create_parent(path)?;
    if InputFormat::from_path(path) == InputFormat::Csv {
        c.write_csv(path)?;
    } else {
        c.write_jsonl(path)?;
    }
    ctx.output(path);
    Ok(())
}

fn csv_writer(ctx: &mut RunContext, path: &Path) -> CliResult<csv::Writer<std::fs::File>> {
    create_parent(path)?;
    let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    ctx.output(path);
    Ok(csv::Writer::from_writer(file))
}

fn split_list<T: std::str::FromStr<Err = String>>(s: &str, what: &str) -> CliResult<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| {
            x.parse::<T>()
                .map_err(|e| CliError::Usage(format!("{what}: {e}")))
        })
        .collect()
}

fn parse_sizes(s: &str) -> CliResult<Vec<usize>> {
    let sizes: Vec<usize> = s
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| {
            x.parse()
                .map_err(|_| CliError::Usage(format!("sizes: {x:?} is not an integer")))
        })
        .collect::<CliResult<_>>()?;
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(CliError::Usage("sizes: need positive integers".into()));
    }
    Ok(sizes)
}

// negated comparisons also reject NaN
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn train_config(p: &TrainParams, seed: u64) -> CliResult<TrainConfig> {
    if !(p.threshold > 0.0 && p.threshold < 1.0) {
        return Err(CliError::Usage(format!(
            "threshold must be in (0, 1), got {}",
            p.threshold
        )));
    }
    if !(p.lambda >= 0.0) || !(p.nb_alpha > 0.0) || !(p.tol > 0.0) {
        return Err(CliError::Usage(
            "lambda must be >= 0; nb-alpha and tol must be > 0".into(),
        ));
    }
    Ok(TrainConfig {
        l2_lambda: p.lambda,
        max_iters: p.max_iters,
        tol: p.tol,
        seed,
        nb_alpha: p.nb_alpha,
        threshold: p.threshold,
    })
}

pub fn prepare(a: &PrepareArgs, ctx: &mut RunContext) -> CliResult<Value> {
    let mode = a.tokenizer.mode;
    let raw = load_corpus(ctx, &a.input, a.format)?;
    let emoji = raw.filter_emoji_posts(mode);
    let labeled = emoji.filter_labeled();
    let pool = if a.balance {
        labeled.balance_undersample(a.seed)?
    } else {
        labeled.clone()
    };
    let (train, test) = ctx.stage("split", || pool.split(a.test_fraction, a.seed))?;
    let (train, test) = (
        train.with_variant(a.variant, mode),
        test.with_variant(a.variant, mode),
    );

    create_dir(&a.out)?;
    let train_path = a.out.join("train.jsonl");
    let test_path = a.out.join("test.jsonl");
    write_corpus(ctx, &train, &train_path)?;
    write_corpus(ctx, &test, &test_path)?;
    Ok(json!({
        "loaded": raw.len(),
        "emoji_posts": emoji.len(),
        "labeled_emoji_posts": label_counts(&labeled),
        "balanced": a.balance,
        "pool": label_counts(&pool),
        "train": label_counts(&train),
        "test": label_counts(&test),
        "variant": a.variant,
        "files": { "train": train_path, "test": test_path },
    }))
}

pub fn train(a: &TrainArgs, ctx: &mut RunContext) -> CliResult<Value> {
    let cfg = train_config(&a.params, a.seed)?;
    let corpus = load_corpus(ctx, &a.train, None)?;
    let spec = PipelineSpec {
        variant: a.variant,
        mode: a.tokenizer.mode,
        family: a.family,
    };
    let exec = ctx.exec;
    let (fitted, summary) = ctx.stage("fit", || {
        FittedPipeline::fit_with_summary(&corpus, spec, &cfg, exec)
    })?;
    if let Some(s) = &summary {
        if !s.converged {
            eprintln!(
                "warning: optimizer stopped after {} iterations with gradient norm {:.3e}",
                s.iterations, s.gradient_norm
            );
        }
    }
    let training = TrainingInfo {
        n_train: corpus.len(),
        n_bullish: corpus.count_label(SentimentLabel::Bullish),
        n_bearish: corpus.count_label(SentimentLabel::Bearish),
        seed: a.seed,
        config: cfg,
        summary,
    };
    let file = ModelFile::from_pipeline(&fitted, training)?;
    let vec_path = a
        .vectorizer_out
        .clone()
        .unwrap_or_else(|| sibling_vectorizer_path(&a.model_out));
    create_parent(&vec_path)?;
    create_parent(&a.model_out)?;
    fitted.vectorizer.save(&vec_path)?;
    ctx.output(&vec_path);
    file.save(&a.model_out)?;
    ctx.output(&a.model_out);
    Ok(json!({
        "model": a.model_out,
        "vectorizer": vec_path,
        "family": file.family,
        "variant": file.variant,
        "tokenizer_mode": file.tokenizer_mode,
        "n_features": file.n_features,
        "threshold": file.threshold,
        "vectorizer_sha256": file.vectorizer.sha256,
        "training": file.training,
    }))
}

pub fn eval(a: &EvalArgs, ctx: &mut RunContext) -> CliResult<Value> {
    let file = ModelFile::load(&a.model_in)?;
    ctx.input(&a.model_in)?;
    let vec_path = a
        .vectorizer
        .clone()
        .unwrap_or_else(|| sibling_vectorizer_path(&a.model_in));
    let vectorizer = TfIdfModel::load(&vec_path)?;
    ctx.input(&vec_path)?;
    let mut pipeline = file.bind(vectorizer)?;
    if let Some(t) = a.threshold {
        if !(t > 0.0 && t < 1.0) {
            return Err(CliError::Usage(format!(
                "threshold must be in (0, 1), got {t}"
            )));
        }
        pipeline.model.threshold = t;
    }
    let test = load_corpus(ctx, &a.test, None)?;
    let truth = test.require_labels()?;
    let exec = ctx.exec;
    let predictions = ctx.stage("predict", || pipeline.predict(&test, exec))?;
    let pred: Vec<SentimentLabel> = predictions.iter().map(|p| p.label).collect();
    let report = emosent::classifier::evaluate(&pred, &truth)?;
    let ci = if a.bootstrap > 0 {
        Some(ctx.stage("bootstrap", || {
            bootstrap_ci(&pred, &truth, a.bootstrap, a.seed, exec)
        })?)
    } else {
        None
    };
    if let Some(path) = &a.predictions_out {
        let mut w = csv_writer(ctx, path)?;
        w.write_record(["id", "label", "predicted", "probability"])?;
        for ((post, p), t) in test.posts.iter().zip(&predictions).zip(&truth) {
            w.write_record([
                post.id.as_str(),
                t.as_str(),
                p.label.as_str(),
                &format!("{:.6}", p.probability),
            ])?;
        }
        w.flush().map_err(|e| CliError::io(path, e))?;
    }
    Ok(json!({
        "model": {
            "family": pipeline.spec.family,
            "variant": pipeline.spec.variant,
            "tokenizer_mode": pipeline.spec.mode,
            "n_features": pipeline.vectorizer.dim(),
            "threshold": pipeline.model.threshold,
        },
        "report": report,
        "bootstrap": ci,
    }))
}

pub fn lexicon(a: &LexiconArgs, ctx: &mut RunContext) -> CliResult<Value> {
    let mode = a.tokenizer.mode;
    if a.top_k == 0 {
        return Err(CliError::Usage("top-k must be positive".into()));
    }
    let corpus = load_corpus(ctx, &a.input, None)?;
    let mut lex = ctx.stage("build", || EmojiLexicon::build(&corpus, a.top_k, mode))?;
    if !a.pairs {
        lex.pairs.clear();
    }
    let buckets = a.buckets.then(|| lexicon::count_buckets(&corpus, mode));

    if let Some(path) = &a.out {
        create_parent(path)?;
        lex.save(path)?;
        ctx.output(path);
    }
    if let Some(dir) = &a.csv_dir {
        create_dir(dir)?;
        let path = dir.join("singles.csv");
        let mut w = csv_writer(ctx, &path)?;
        w.write_record([
            "rank",
            "emoji",
            "code_points",
            "n_posts",
            "n_bullish",
            "n_bearish",
            "bullish_score",
            "bearish_score",
        ])?;
        for (i, s) in lex.singles.iter().enumerate() {
            w.write_record([
                (i + 1).to_string(),
                s.emoji.clone(),
                s.code_points.join(" "),
                s.n_posts.to_string(),
                s.n_bullish.to_string(),
                s.n_bearish.to_string(),
                format!("{:.6}", s.bullish_score),
                format!("{:.6}", s.bearish_score),
            ])?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))?;
        if a.pairs {
            let path = dir.join("pairs.csv");
            let mut w = csv_writer(ctx, &path)?;
            w.write_record([
                "rank",
                "emoji_a",
                "emoji_b",
                "n_posts",
                "n_bullish",
                "n_bearish",
                "bullish_score",
                "bearish_score",
            ])?;
            for (i, p) in lex.pairs.iter().enumerate() {
                w.write_record([
                    (i + 1).to_string(),
                    p.pair[0].clone(),
                    p.pair[1].clone(),
                    p.n_posts.to_string(),
                    p.n_bullish.to_string(),
                    p.n_bearish.to_string(),
                    format!("{:.6}", p.bullish_score),
                    format!("{:.6}", p.bearish_score),
                ])?;
            }
            w.flush().map_err(|e| CliError::io(&path, e))?;
        }
        if let Some(buckets) = &buckets {
            let path = dir.join("buckets.csv");
            let mut w = csv_writer(ctx, &path)?;
            w.write_record([
                "unique_emojis",
                "n_posts",
                "n_bullish",
                "n_bearish",
                "bullish_fraction",
                "bearish_fraction",
            ])?;
            for b in buckets {
                w.write_record([
                    b.unique_count.clone(),
                    b.n_posts.to_string(),
                    b.n_bullish.to_string(),
                    b.n_bearish.to_string(),
                    format!("{:.6}", b.bullish_fraction),
                    format!("{:.6}", b.bearish_fraction),
                ])?;
            }
            w.flush().map_err(|e| CliError::io(&path, e))?;
        }
    }
    Ok(json!({ "lexicon": lex, "buckets": buckets }))
}

pub fn compare(a: &CompareArgs, ctx: &mut RunContext) -> CliResult<Value> {
    let ca = load_corpus(ctx, &a.a, None)?;
    let cb = load_corpus(ctx, &a.b, None)?;
    let exec = ctx.exec;
    let report = ctx.stage("compare", || {
        stats::compare(
            (a.name_a.as_str(), &ca),
            (a.name_b.as_str(), &cb),
            a.top_k,
            a.tokenizer.mode,
            a.mass,
            exec,
        )
    })?;
    if let Some(path) = &a.rank_csv {
        create_parent(path)?;
        let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        report.write_rank_csv(file)?;
        ctx.output(path);
    }
    Ok(serde_json::to_value(report)?)
}

pub fn curve(a: &CurveArgs, ctx: &mut RunContext) -> CliResult<Value> {
    let cfg = train_config(&a.params, a.seed)?;
    let sizes = parse_sizes(&a.sizes)?;
    let variants: Vec<DataVariant> = split_list(&a.variants, "variants")?;
    let train = load_corpus(ctx, &a.train, None)?;
    let test = load_corpus(ctx, &a.test, None)?;
    let exec = ctx.exec;
    let mut rows = Vec::new();
    for variant in variants {
        let spec = PipelineSpec {
            variant,
            mode: a.tokenizer.mode,
            family: a.family,
        };
        let points = ctx.stage(variant.name(), || {
            learning_curve(&train, &test, &sizes, spec, &cfg, a.seed, exec)
        })?;
        for p in points {
            rows.push(json!({
                "variant": variant,
                "size": p.size,
                "accuracy": p.accuracy,
                "f1": p.f1,
                "n_features": p.n_features,
            }));
        }
    }
    if let Some(path) = &a.csv {
        let mut w = csv_writer(ctx, path)?;
        w.write_record(["variant", "size", "accuracy", "f1", "n_features"])?;
        for r in &rows {
            w.write_record([
                r["variant"].as_str().unwrap_or_default().to_string(),
                r["size"].to_string(),
                format!("{:.6}", r["accuracy"].as_f64().unwrap_or(f64::NAN)),
                format!("{:.6}", r["f1"].as_f64().unwrap_or(f64::NAN)),
                r["n_features"].to_string(),
            ])?;
        }
        w.flush().map_err(|e| CliError::io(path, e))?;
    }
    Ok(json!({ "family": a.family, "sizes": sizes, "n_test": test.len(), "points": rows }))
}

/// Wall-clock measurements, nested under `timings` like the manifest's.
#[derive(Serialize)]
struct BenchTimings {
    vectorize: Timing,
    train: Timing,
    infer: Timing,
    train_plus_infer: Timing,
    per_post_latency: f64,
}

#[derive(Serialize)]
struct BenchRow {
    spec: PipelineSpec,
    repeats: usize,
    n_train: usize,
    n_infer: usize,
    n_features: usize,
    timings: BenchTimings,
}

impl From<BenchReport> for BenchRow {
    fn from(r: BenchReport) -> Self {
        BenchRow {
            spec: r.spec,
            repeats: r.repeats,
            n_train: r.n_train,
            n_infer: r.n_infer,
            n_features: r.n_features,
            timings: BenchTimings {
                vectorize: r.vectorize,
                train: r.train,
                infer: r.infer,
                train_plus_infer: r.train_plus_infer,
                per_post_latency: r.per_post_latency,
            },
        }
    }
}

pub fn bench(a: &BenchArgs, ctx: &mut RunContext) -> CliResult<Value> {
    let cfg = train_config(&a.params, a.seed)?;
    let variants: Vec<DataVariant> = split_list(&a.variants, "variants")?;
    if a.repeats == 0 {
        return Err(CliError::Usage("repeats must be positive".into()));
    }
    let train = load_corpus(ctx, &a.train, None)?;
    let infer = match &a.infer {
        Some(p) => load_corpus(ctx, p, None)?,
        None => train.clone(),
    };
    let exec = ctx.exec;
    let mut rows = Vec::new();
    for variant in variants {
        let spec = PipelineSpec {
            variant,
            mode: a.tokenizer.mode,
            family: a.family,
        };
        let r = benchmark(&train, &infer, spec, &cfg, a.repeats, exec)?;
        rows.push(BenchRow::from(r));
    }
    Ok(json!({ "family": a.family, "runs": rows }))
}

pub fn entropy(a: &EntropyArgs, ctx: &mut RunContext) -> CliResult<Value> {
    let mode = a.tokenizer.mode;
    let corpus = load_corpus(ctx, &a.input, None)?;
    let words = stats::word_frequencies(&corpus, mode);
    let emojis = stats::occurrence_frequencies(&corpus, mode);
    let report = |d: &stats::FrequencyDistribution| -> CliResult<Option<stats::EntropyReport>> {
        if d.is_empty() {
            return Ok(None);
        }
        Ok(Some(entropy_top_mass(d, a.mass, a.renormalize)?))
    };
    let (w, e) = (report(&words)?, report(&emojis)?);
    if w.is_none() && e.is_none() {
        return Err(emosent::Error::EmptyDistribution.into());
    }
    Ok(json!({ "n_posts": corpus.len(), "words": w, "emojis": e }))
}

pub fn index(a: &IndexArgs, ctx: &mut RunContext) -> CliResult<Value> {
    let corpus = load_corpus(ctx, &a.input, None)?;
    let series = emoji_index(&corpus, &a.emoji, a.tokenizer.mode)?;
    if let Some(path) = &a.csv {
        let mut w = csv_writer(ctx, path)?;
        w.write_record(["date", "ratio"])?;
        for (d, r) in &series {
            w.write_record([d.to_string(), format!("{r:.6}")])?;
        }
        w.flush().map_err(|e| CliError::io(path, e))?;
    }
    let mut correlations = Vec::new();
    if let Some(prices_path) = &a.prices {
        let prices = load_series_csv(prices_path)?;
        ctx.input(prices_path)?;
        let alignments = match a.alignment {
            AlignmentArg::Levels => vec![Alignment::Levels],
            AlignmentArg::Changes => vec![Alignment::Changes],
            AlignmentArg::Both => vec![Alignment::Levels, Alignment::Changes],
        };
        for al in alignments {
            let pairs = align(&series, &prices, al);
            let (x, y): (Vec<f64>, Vec<f64>) = pairs.iter().map(|&(_, x, y)| (x, y)).unzip();
            correlations.push(json!({
                "alignment": al,
                "n": pairs.len(),
                "pearson": pearson_corr(&x, &y)?,
            }));
        }
    }
    let points: Vec<Value> = series
        .iter()
        .map(|(d, r)| json!({ "date": d, "ratio": r }))
        .collect();
    Ok(
        json!({ "emoji": a.emoji, "days": series.len(), "series": points, "correlations": correlations }),
    )
}

pub fn describe(a: &DescribeArgs, ctx: &mut RunContext) -> CliResult<Value> {
    let corpus = load_corpus(ctx, &a.input, None)?;
    let exec = ctx.exec;
    let d = ctx.stage("describe", || {
        stats::describe(&corpus, a.tokenizer.mode, exec)
    });
    Ok(serde_json::to_value(d)?)
}

pub fn synth(a: &SynthArgs, ctx: &mut RunContext) -> CliResult<Value> {
    if a.n == 0 {
        return Err(CliError::Usage("n must be positive".into()));
    }
    let corpus = match a.kind {
        SynthKind::Marker => {
            if !(0.0..=0.5).contains(&a.noise) {
                return Err(CliError::Usage(format!(
                    "noise must be in [0, 0.5], got {}",
                    a.noise
                )));
            }
            marker_corpus(&SyntheticConfig {
                n_posts: a.n,
                seed: a.seed,
                label_noise: a.noise,
                bullish_emoji: a.bullish_emoji.clone(),
                bearish_emoji: a.bearish_emoji.clone(),
                ..SyntheticConfig::default()
            })
        }
        SynthKind::Palette => {
            let palette: Vec<&str> = a
                .palette
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .collect();
            if palette.is_empty() {
                return Err(CliError::Usage("palette is empty".into()));
            }
            palette_corpus(&palette, a.n, a.seed)
        }
    };
    write_corpus(ctx, &corpus, &a.out)?;
    Ok(json!({
        "kind": a.kind,
        "out": a.out,
        "posts": label_counts(&corpus),
        "unlabeled": corpus.posts.iter().filter(|p| p.label.is_none()).count(),
    }))
}

/// Seed and resolved parameters of a parsed command, for the manifest.
pub fn describe_command(cmd: &Command) -> CliResult<(Option<u64>, Value)> {
    Ok(match cmd {
        Command::Prepare(a) => (Some(a.seed), serde_json::to_value(a)?),
        Command::Train(a) => (Some(a.seed), serde_json::to_value(a)?),
        Command::Eval(a) => (Some(a.seed), serde_json::to_value(a)?),
        Command::Lexicon(a) => (Some(a.seed), serde_json::to_value(a)?),
        Command::Compare(a) => (Some(a.seed), serde_json::to_value(a)?),
        Command::Curve(a) => (Some(a.seed), serde_json::to_value(a)?),
        Command::Bench(a) => (Some(a.seed), serde_json::to_value(a)?),
        Command::Entropy(a) => (Some(a.seed), serde_json::to_value(a)?),
        Command::Index(a) => (Some(a.seed), serde_json::to_value(a)?),
        Command::Describe(a) => (Some(a.seed), serde_json::to_value(a)?),
        Command::Synth(a) => (Some(a.seed), serde_json::to_value(a)?),
    })
}

pub fn run(cmd: &Command, ctx: &mut RunContext) -> CliResult<Value> {
    match cmd {
        Command::Prepare(a) => prepare(a, ctx),
        Command::Train(a) => train(a, ctx),
        Command::Eval(a) => eval(a, ctx),
        Command::Lexicon(a) => lexicon(a, ctx),
        Command::Compare(a) => compare(a, ctx),
        Command::Curve(a) => curve(a, ctx),
        Command::Bench(a) => bench(a, ctx),
        Command::Entropy(a) => entropy(a, ctx),
        Command::Index(a) => index(a, ctx),
        Command::Describe(a) => describe(a, ctx),
        Command::Synth(a) => synth(a, ctx),
    }
}
