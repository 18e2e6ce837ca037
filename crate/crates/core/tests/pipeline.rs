use emosent::classifier::{
    benchmark, bootstrap_ci, learning_curve, FittedPipeline, ModelFamily, PipelineSpec, TrainConfig,
};
use emosent::corpus::{Corpus, DataVariant, Post, SentimentLabel};
use emosent::lexicon::{self, EmojiLexicon, LexiconPolicy, LexiconVerdict};
use emosent::synthetic::{marker_corpus, SyntheticConfig};
use emosent::tokenizer::TokenizerMode;
use emosent::vectorizer::TfIdfModel;
use emosent::Execution;

fn small_synthetic(n: usize, seed: u64) -> Corpus {
    marker_corpus(&SyntheticConfig {
        n_posts: n,
        seed,
        ..SyntheticConfig::default()
    })
}

fn spec(variant: DataVariant, family: ModelFamily) -> PipelineSpec {
    PipelineSpec {
        variant,
        mode: TokenizerMode::PaperRegex,
        family,
    }
}

#[test]
fn emoji_marker_is_learned_by_both_families() {
    let corpus = small_synthetic(3000, 7);
    let (train, test) = corpus
        .balance_undersample(1)
        .unwrap()
        .split(0.3, 1)
        .unwrap();
    for family in [ModelFamily::Logistic, ModelFamily::MultinomialNb] {
        let fitted = FittedPipeline::fit(
            &train,
            spec(DataVariant::EmojiOnly, family),
            &TrainConfig::default(),
            Execution::Parallel,
        )
        .unwrap();
        let report = fitted.evaluate(&test, Execution::Parallel).unwrap();
        assert!(report.accuracy > 0.9, "{family:?}: {report:?}");
        assert_eq!(report.n as usize, test.len());
    }
}

#[test]
fn text_only_is_weaker_than_emoji_only() {
    let corpus = small_synthetic(4000, 8);
    let (train, test) = corpus.split(0.25, 2).unwrap();
    let acc = |variant| {
        FittedPipeline::fit(
            &train,
            spec(variant, ModelFamily::Logistic),
            &TrainConfig::default(),
            Execution::Parallel,
        )
        .unwrap()
        .evaluate(&test, Execution::Parallel)
        .unwrap()
        .accuracy
    };
    let text = acc(DataVariant::TextOnly);
    let emoji = acc(DataVariant::EmojiOnly);
    let both = acc(DataVariant::TextAndEmoji);
    assert!(text < emoji, "text {text} vs emoji {emoji}");
    assert!(both > text);
    assert!(text > 0.5);
}

#[test]
fn execution_modes_agree_end_to_end() {
    let corpus = small_synthetic(2500, 9);
    let (train, test) = corpus.split(0.2, 3).unwrap();
    let s = spec(DataVariant::TextAndEmoji, ModelFamily::Logistic);
    let cfg = TrainConfig::default();
    let seq = FittedPipeline::fit(&train, s, &cfg, Execution::Sequential).unwrap();
    let par = FittedPipeline::fit(&train, s, &cfg, Execution::Parallel).unwrap();
    assert_eq!(seq, par);
    let pa = seq.predict(&test, Execution::Sequential).unwrap();
    let pb = par.predict(&test, Execution::Parallel).unwrap();
    assert_eq!(pa, pb);

    let truth = test.require_labels().unwrap();
    let pred: Vec<SentimentLabel> = pa.iter().map(|p| p.label).collect();
    let a = bootstrap_ci(&pred, &truth, 300, 11, Execution::Sequential).unwrap();
    let b = bootstrap_ci(&pred, &truth, 300, 11, Execution::Parallel).unwrap();
    assert_eq!(a, b);
    assert!(a.accuracy.lo <= a.accuracy.point && a.accuracy.point <= a.accuracy.hi);
}

#[test]
fn vectorizer_survives_a_file_round_trip() {
    let corpus = small_synthetic(500, 10);
    let fitted = FittedPipeline::fit(
        &corpus,
        spec(DataVariant::TextAndEmoji, ModelFamily::Logistic),
        &TrainConfig::default(),
        Execution::Parallel,
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("vectorizer.json");
    fitted.vectorizer.save(&path).unwrap();
    let back = TfIdfModel::load(&path).unwrap();
    assert_eq!(back, fitted.vectorizer);
}

#[test]
fn learning_curve_points_are_reproducible() {
    let corpus = small_synthetic(3000, 12);
    let (train, test) = corpus.split(0.3, 4).unwrap();
    let sizes = [100, 500, 2000];
    let s = spec(DataVariant::EmojiOnly, ModelFamily::Logistic);
    let cfg = TrainConfig::default();
    let a = learning_curve(&train, &test, &sizes, s, &cfg, 42, Execution::Parallel).unwrap();
    let b = learning_curve(&train, &test, &sizes, s, &cfg, 42, Execution::Sequential).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.iter().map(|p| p.size).collect::<Vec<_>>(), sizes);
    assert!(a[2].accuracy >= a[0].accuracy - 0.02);
    assert!(learning_curve(
        &train,
        &test,
        &[train.len() + 1],
        s,
        &cfg,
        42,
        Execution::Parallel
    )
    .is_err());
    assert!(learning_curve(&train, &train, &[100], s, &cfg, 42, Execution::Parallel).is_err());
}

#[test]
fn benchmark_reports_sane_timings() {
    let corpus = small_synthetic(1200, 13);
    let (train, test) = corpus.split(0.25, 5).unwrap();
    let r = benchmark(
        &train,
        &test,
        spec(DataVariant::EmojiOnly, ModelFamily::MultinomialNb),
        &TrainConfig::default(),
        3,
        Execution::Parallel,
    )
    .unwrap();
    assert_eq!(r.repeats, 3);
    assert!(r.train.min <= r.train.median);
    assert!(r.per_post_latency >= 0.0);
    assert_eq!((r.n_train, r.n_infer), (train.len(), test.len()));
    let empty = Corpus::new(vec![], "empty");
    let r = benchmark(
        &train,
        &empty,
        spec(DataVariant::EmojiOnly, ModelFamily::Logistic),
        &TrainConfig::default(),
        1,
        Execution::Sequential,
    )
    .unwrap();
    assert_eq!(r.per_post_latency, 0.0);
}

#[test]
fn lexicon_scores_are_exact_count_ratios() {
    for b in 0..5u64 {
        for r in 0..5u64 {
            if b + r == 0 {
                continue;
            }
            let mut posts = Vec::new();
            for i in 0..b {
                posts.push(Post::new(
                    format!("b{i}"),
                    "🚀".repeat(1 + i as usize % 3) + " up",
                    Some(SentimentLabel::Bullish),
                ));
            }
            for i in 0..r {
                posts.push(Post::new(
                    format!("r{i}"),
                    format!("down 🚀 x {}", "🚀".repeat(i as usize)),
                    Some(SentimentLabel::Bearish),
                ));
            }
            posts.push(Post::new("other", "💎", Some(SentimentLabel::Bullish)));
            let c = Corpus::new(posts, "grid");
            let lex = EmojiLexicon::build(&c, 50, TokenizerMode::GraphemeEmoji).unwrap();
            let s = lex.single("🚀").unwrap();
            assert_eq!(s.bullish_score, b as f64 / (b + r) as f64);
            assert_eq!(s.n_posts, b + r);
        }
    }
}

#[test]
fn lexicon_classifies_marker_corpus() {
    let corpus = small_synthetic(2000, 14);
    let lex = EmojiLexicon::build(&corpus, 10, TokenizerMode::PaperRegex).unwrap();
    let (mut right, mut total) = (0, 0);
    for p in &corpus.posts {
        let verdict = lex.classify(&p.body, LexiconPolicy::MeanScore);
        let expected = match p.label.unwrap() {
            SentimentLabel::Bullish => LexiconVerdict::Bullish,
            SentimentLabel::Bearish => LexiconVerdict::Bearish,
        };
        total += 1;
        right += usize::from(verdict == expected);
    }
    assert!(right as f64 / total as f64 > 0.9);
    let buckets = lexicon::count_buckets(&corpus, TokenizerMode::PaperRegex);
    assert_eq!(
        buckets.iter().map(|b| b.n_posts as usize).sum::<usize>(),
        corpus.len()
    );
}
