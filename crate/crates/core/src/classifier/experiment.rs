//! End-to-end pipelines: variant projection, tokenization, vectorizing,
//! training and evaluation, plus learning curves and timing runs.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{
    evaluate, train_logistic, train_multinomial_nb, EvalReport, LinearModel, ModelFamily,
    Prediction, TrainConfig, TrainSummary,
};
use crate::corpus::{derive_variant, Corpus, DataVariant, SentimentLabel};
use crate::tokenizer::{self, TokenizerMode};
use crate::vectorizer::{SparseVector, TfIdfModel};
use crate::{Error, Execution, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineSpec {
    pub variant: DataVariant,
    pub mode: TokenizerMode,
    pub family: ModelFamily,
}

/// Project every post onto `variant` and tokenize it.
pub fn tokenize_corpus(
    corpus: &Corpus,
    variant: DataVariant,
    mode: TokenizerMode,
    exec: Execution,
) -> Vec<Vec<String>> {
    exec.map(&corpus.posts, |p| {
        let body = derive_variant(&p.body, variant, mode);
        tokenizer::token_texts(&body, mode)
            .into_iter()
            .map(String::from)
            .collect()
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FittedPipeline {
    pub spec: PipelineSpec,
    pub vectorizer: TfIdfModel,
    pub model: LinearModel,
}

fn features(
    vectorizer: &TfIdfModel,
    family: ModelFamily,
    docs: &[Vec<String>],
    exec: Execution,
) -> Vec<SparseVector> {
    match family {
        ModelFamily::Logistic => vectorizer.transform_batch(docs, exec),
        ModelFamily::MultinomialNb => vectorizer.count_batch(docs, exec),
    }
}

fn train_on(
    family: ModelFamily,
    xs: &[SparseVector],
    labels: &[SentimentLabel],
    cfg: &TrainConfig,
    exec: Execution,
) -> Result<(LinearModel, Option<TrainSummary>)> {
    match family {
        ModelFamily::Logistic => train_logistic(xs, labels, cfg, exec).map(|(m, s)| (m, Some(s))),
        ModelFamily::MultinomialNb => Ok((train_multinomial_nb(xs, labels, cfg)?, None)),
    }
}

impl FittedPipeline {
    /// Fit the vectorizer and the model on a labeled corpus.
    pub fn fit(
        train: &Corpus,
        spec: PipelineSpec,
        cfg: &TrainConfig,
        exec: Execution,
    ) -> Result<Self> {
        Self::fit_with_summary(train, spec, cfg, exec).map(|(p, _)| p)
    }

    /// Like [`FittedPipeline::fit`], also returning the optimizer summary
    /// (logistic regression only).
    pub fn fit_with_summary(
        train: &Corpus,
        spec: PipelineSpec,
        cfg: &TrainConfig,
        exec: Execution,
    ) -> Result<(Self, Option<TrainSummary>)> {
        let labels = train.require_labels()?;
        let docs = tokenize_corpus(train, spec.variant, spec.mode, exec);
        let vectorizer = TfIdfModel::fit(&docs)?;
        let xs = features(&vectorizer, spec.family, &docs, exec);
        let (model, summary) = train_on(spec.family, &xs, &labels, cfg, exec)?;
        let fitted = FittedPipeline {
            spec,
            vectorizer,
            model,
        };
        Ok((fitted, summary))
    }

    pub fn features(&self, corpus: &Corpus, exec: Execution) -> Vec<SparseVector> {
        let docs = tokenize_corpus(corpus, self.spec.variant, self.spec.mode, exec);
        features(&self.vectorizer, self.spec.family, &docs, exec)
    }

    pub fn predict(&self, corpus: &Corpus, exec: Execution) -> Result<Vec<Prediction>> {
        self.model.predict(&self.features(corpus, exec), exec)
    }

    pub fn evaluate(&self, test: &Corpus, exec: Execution) -> Result<EvalReport> {
        let truth = test.require_labels()?;
        let pred: Vec<SentimentLabel> = self.predict(test, exec)?.iter().map(|p| p.label).collect();
        evaluate(&pred, &truth)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub size: usize,
    pub accuracy: f64,
    pub f1: f64,
    pub n_features: usize,
}

/// Seed for the subsample of one learning-curve point.
fn point_seed(seed: u64, size: usize) -> u64 {
    // splitmix64 finalizer over the pair
    let mut z = seed ^ (size as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Accuracy on a fixed test set as a function of training-set size.
///
/// Every point refits the vectorizer on its own subsample.
pub fn learning_curve(
    train: &Corpus,
    test: &Corpus,
    sizes: &[usize],
    spec: PipelineSpec,
    cfg: &TrainConfig,
    seed: u64,
    exec: Execution,
) -> Result<Vec<CurvePoint>> {
    if let Some(&size) = sizes.iter().find(|&&s| s > train.len()) {
        return Err(Error::SizeTooLarge {
            size,
            available: train.len(),
        });
    }
    let ids: std::collections::HashSet<&str> = train.posts.iter().map(|p| p.id.as_str()).collect();
    if let Some(p) = test.posts.iter().find(|p| ids.contains(p.id.as_str())) {
        return Err(Error::Invalid(format!(
            "post {:?} is in both train and test",
            p.id
        )));
    }
    exec.map(sizes, |&size| {
        let sample = train.subsample(size, point_seed(seed, size))?;
        let fitted = FittedPipeline::fit(&sample, spec, cfg, exec)?;
        let report = fitted.evaluate(test, exec)?;
        Ok(CurvePoint {
            size,
            accuracy: report.accuracy,
            f1: report.f1,
            n_features: fitted.vectorizer.dim(),
        })
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub min: f64,
    pub median: f64,
}

impl Timing {
    fn from_samples(mut xs: Vec<f64>) -> Self {
        xs.sort_by(f64::total_cmp);
        let n = xs.len();
        let median = if n % 2 == 1 {
            xs[n / 2]
        } else {
            0.5 * (xs[n / 2 - 1] + xs[n / 2])
        };
        Timing { min: xs[0], median }
    }
}

/// Wall-clock timings in seconds over `repeats` runs.
///
/// `train` runs from raw training posts to a fitted model (tokenize, fit the
/// vectorizer, build features, fit the model); `infer` runs from raw posts to
/// predictions. `vectorize` is the tokenize-and-featurize share of both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub spec: PipelineSpec,
    pub repeats: usize,
    pub n_train: usize,
    pub n_infer: usize,
    pub n_features: usize,
    pub vectorize: Timing,
    pub train: Timing,
    pub infer: Timing,
    pub train_plus_infer: Timing,
    pub per_post_latency: f64,
}

pub fn benchmark(
    train: &Corpus,
    infer: &Corpus,
    spec: PipelineSpec,
    cfg: &TrainConfig,
    repeats: usize,
    exec: Execution,
) -> Result<BenchReport> {
    let repeats = repeats.max(1);
    let labels = train.require_labels()?;
    let mut vec_t = Vec::with_capacity(repeats);
    let mut train_t = Vec::with_capacity(repeats);
    let mut infer_t = Vec::with_capacity(repeats);
    let mut n_features = 0;
    for _ in 0..repeats {
        let start = Instant::now();
        let train_docs = tokenize_corpus(train, spec.variant, spec.mode, exec);
        let vectorizer = TfIdfModel::fit(&train_docs)?;
        let xs = features(&vectorizer, spec.family, &train_docs, exec);
        let featurized = start.elapsed().as_secs_f64();
        let (model, _) = train_on(spec.family, &xs, &labels, cfg, exec)?;
        train_t.push(start.elapsed().as_secs_f64());
        n_features = vectorizer.dim();

        if infer.is_empty() {
            infer_t.push(0.0);
            vec_t.push(featurized);
        } else {
            let start = Instant::now();
            let infer_docs = tokenize_corpus(infer, spec.variant, spec.mode, exec);
            let xs_infer = features(&vectorizer, spec.family, &infer_docs, exec);
            let featurized_infer = start.elapsed().as_secs_f64();
            let preds = model.predict(&xs_infer, exec)?;
            std::hint::black_box(&preds);
            infer_t.push(start.elapsed().as_secs_f64());
            vec_t.push(featurized + featurized_infer);
        }
    }
    let total: Vec<f64> = train_t.iter().zip(&infer_t).map(|(a, b)| a + b).collect();
    let infer_timing = Timing::from_samples(infer_t);
    let per_post_latency = if infer.is_empty() {
        0.0
    } else {
        infer_timing.median / infer.len() as f64
    };
    Ok(BenchReport {
        spec,
        repeats,
        n_train: train.len(),
        n_infer: infer.len(),
        n_features,
        vectorize: Timing::from_samples(vec_t),
        train: Timing::from_samples(train_t),
        infer: infer_timing,
        train_plus_infer: Timing::from_samples(total),
        per_post_latency,
    })
}
