//! Binary bullish/bearish linear classifiers and their evaluation protocol.
//!
//! Both families reduce to a [`LinearModel`]: a score `w·x + b` read as
//! log-odds of the bullish class. Logistic regression learns `w` directly;
//! multinomial Naive Bayes folds class-conditional log-likelihoods into a
//! per-token log ratio.

mod experiment;
mod logistic;
mod metrics;
mod naive_bayes;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::SentimentLabel;
use crate::vectorizer::SparseVector;
use crate::{Error, Execution, Result};

pub use experiment::{
    benchmark, learning_curve, tokenize_corpus, BenchReport, CurvePoint, FittedPipeline,
    PipelineSpec, Timing,
};
pub use logistic::{train_logistic, LogisticObjective, TrainSummary};
pub use metrics::{
    bootstrap_ci, evaluate, quantile, BootstrapCi, ClassMetrics, Confusion, EvalReport, Interval,
};
pub use naive_bayes::train_multinomial_nb;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelFamily {
    Logistic,
    MultinomialNb,
}

impl ModelFamily {
    pub fn name(self) -> &'static str {
        match self {
            ModelFamily::Logistic => "logistic",
            ModelFamily::MultinomialNb => "multinomial-nb",
        }
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelFamily {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "logistic" | "lr" => Ok(ModelFamily::Logistic),
            "nb" | "multinomial-nb" | "mnb" => Ok(ModelFamily::MultinomialNb),
            other => Err(format!("unknown model family {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// L2 penalty on the weights (bias is not penalized).
    pub l2_lambda: f64,
    pub max_iters: usize,
    /// Stop once the gradient norm of the mean objective falls below this.
    pub tol: f64,
    pub seed: u64,
    /// Laplace smoothing for Naive Bayes.
    pub nb_alpha: f64,
    pub threshold: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            l2_lambda: 1.0,
            max_iters: 200,
            tol: 1e-6,
            seed: 42,
            nb_alpha: 1.0,
            threshold: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: SentimentLabel,
    /// Bullish probability.
    pub probability: f64,
    /// Raw linear score (log-odds).
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub family: ModelFamily,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub threshold: f64,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl LinearModel {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn score(&self, x: &SparseVector) -> f64 {
        x.dot(&self.weights) + self.bias
    }

    fn check_dim(&self, x: &SparseVector) -> Result<()> {
        if x.dim != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim,
            });
        }
        Ok(())
    }

    /// Classify one vector. A probability exactly at the threshold is bullish.
    ///
    /// The comparison runs in log-odds space (`score >= logit(threshold)`),
    /// so with the default threshold the decision is exactly `score >= 0`.
    pub fn predict_one(&self, x: &SparseVector) -> Result<Prediction> {
        self.check_dim(x)?;
        let score = self.score(x);
        let cut = (self.threshold / (1.0 - self.threshold)).ln();
        let label = if score >= cut {
            SentimentLabel::Bullish
        } else {
            SentimentLabel::Bearish
        };
        Ok(Prediction {
            label,
            probability: sigmoid(score),
            score,
        })
    }

    pub fn predict(&self, xs: &[SparseVector], exec: Execution) -> Result<Vec<Prediction>> {
        exec.map(xs, |x| self.predict_one(x)).into_iter().collect()
    }
}
