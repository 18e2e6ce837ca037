use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::SentimentLabel;
use crate::{Error, Execution, Result};

/// 2×2 confusion counts with bullish as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl Confusion {
    pub fn from_pairs(pred: &[SentimentLabel], truth: &[SentimentLabel]) -> Result<Self> {
        if pred.len() != truth.len() {
            return Err(Error::LengthMismatch {
                left: pred.len(),
                right: truth.len(),
            });
        }
        let mut c = Confusion::default();
        for (p, t) in pred.iter().zip(truth) {
            c.add(*p, *t);
        }
        Ok(c)
    }

    fn add(&mut self, pred: SentimentLabel, truth: SentimentLabel) {
        match (pred.is_bullish(), truth.is_bullish()) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn accuracy(&self) -> f64 {
        (self.tp + self.tn) as f64 / self.total() as f64
    }

    /// Metrics for the bullish class.
    pub fn bullish(&self) -> ClassMetrics {
        ClassMetrics::from_counts(self.tp, self.fp, self.fn_)
    }

    /// Metrics for the bearish class (roles of the off-diagonal cells swap).
    pub fn bearish(&self) -> ClassMetrics {
        ClassMetrics::from_counts(self.tn, self.fn_, self.fp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl ClassMetrics {
    /// Zero-denominator convention: the affected metric is 0.
    fn from_counts(tp: u64, fp: u64, fn_: u64) -> Self {
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        ClassMetrics {
            precision,
            recall,
            f1,
            support: tp + fn_,
        }
    }
}

/// Headline precision / recall / F1 are macro averages over both classes;
/// per-class figures are kept alongside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n: u64,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub bullish: ClassMetrics,
    pub bearish: ClassMetrics,
    pub confusion: Confusion,
}

impl EvalReport {
    pub fn from_confusion(confusion: Confusion) -> Self {
        let bullish = confusion.bullish();
        let bearish = confusion.bearish();
        EvalReport {
            n: confusion.total(),
            accuracy: confusion.accuracy(),
            precision: 0.5 * (bullish.precision + bearish.precision),
            recall: 0.5 * (bullish.recall + bearish.recall),
            f1: 0.5 * (bullish.f1 + bearish.f1),
            bullish,
            bearish,
            confusion,
        }
    }
}

pub fn evaluate(pred: &[SentimentLabel], truth: &[SentimentLabel]) -> Result<EvalReport> {
    if pred.is_empty() && truth.is_empty() {
        return Err(Error::TooFew { needed: 1, got: 0 });
    }
    Ok(EvalReport::from_confusion(Confusion::from_pairs(
        pred, truth,
    )?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    /// Metric on the full test set.
    pub point: f64,
    /// Mean over resamples.
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapCi {
    pub n_resamples: usize,
    pub seed: u64,
    pub level: f64,
    pub accuracy: Interval,
    pub precision: Interval,
    pub recall: Interval,
    pub f1: Interval,
    pub bullish_precision: Interval,
    pub bullish_recall: Interval,
    pub bullish_f1: Interval,
}

/// Linear-interpolation quantile of sorted data (the common "type 7" rule).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn interval(point: f64, mut samples: Vec<f64>) -> Interval {
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    samples.sort_by(f64::total_cmp);
    Interval {
        point,
        mean,
        lo: quantile(&samples, 0.025),
        hi: quantile(&samples, 0.975),
    }
}

/// Percentile bootstrap over (prediction, truth) pairs.
///
/// Resample `i` draws from its own ChaCha stream `(seed, i)`, so intervals are
/// identical however the resamples are scheduled.
pub fn bootstrap_ci(
    pred: &[SentimentLabel],
    truth: &[SentimentLabel],
    n_resamples: usize,
    seed: u64,
    exec: Execution,
) -> Result<BootstrapCi> {
    let full = evaluate(pred, truth)?;
    let n = pred.len();
    if n < 2 {
        return Err(Error::TooFew { needed: 2, got: n });
    }
    if n_resamples == 0 {
        return Err(Error::TooFew { needed: 1, got: 0 });
    }
    let reports: Vec<EvalReport> = exec.map_range(n_resamples, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let mut c = Confusion::default();
        for _ in 0..n {
            let k = rng.gen_range(0..n);
            c.add(pred[k], truth[k]);
        }
        EvalReport::from_confusion(c)
    });
    let pick = |f: fn(&EvalReport) -> f64| interval(f(&full), reports.iter().map(f).collect());
    Ok(BootstrapCi {
        n_resamples,
        seed,
        level: 0.95,
        accuracy: pick(|r| r.accuracy),
        precision: pick(|r| r.precision),
        recall: pick(|r| r.recall),
        f1: pick(|r| r.f1),
        bullish_precision: pick(|r| r.bullish.precision),
        bullish_recall: pick(|r| r.bullish.recall),
        bullish_f1: pick(|r| r.bullish.f1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use SentimentLabel::*;

    fn labels(
        tp: usize,
        fp: usize,
        fn_: usize,
        tn: usize,
    ) -> (Vec<SentimentLabel>, Vec<SentimentLabel>) {
        let mut pred = Vec::new();
        let mut truth = Vec::new();
        for (n, p, t) in [
            (tp, Bullish, Bullish),
            (fp, Bullish, Bearish),
            (fn_, Bearish, Bullish),
            (tn, Bearish, Bearish),
        ] {
            pred.extend(std::iter::repeat_n(p, n));
            truth.extend(std::iter::repeat_n(t, n));
        }
        (pred, truth)
    }

    #[test]
    fn perfect_predictions() {
        let (p, t) = labels(10, 0, 0, 7);
        let r = evaluate(&p, &t).unwrap();
        assert_eq!(
            (r.accuracy, r.precision, r.recall, r.f1),
            (1.0, 1.0, 1.0, 1.0)
        );
        assert_eq!((r.confusion.fp, r.confusion.fn_), (0, 0));
    }

    #[test]
    fn all_bullish_predictor() {
        let truth: Vec<_> = (0..100)
            .map(|i| if i % 2 == 0 { Bullish } else { Bearish })
            .collect();
        let r = evaluate(&vec![Bullish; 100], &truth).unwrap();
        assert_eq!(r.accuracy, 0.5);
        assert_eq!(r.bullish.recall, 1.0);
        assert_eq!(r.bullish.precision, 0.5);
        assert_eq!(r.bearish.precision, 0.0);
    }

    #[test]
    fn hand_computed_confusion() {
        let (p, t) = labels(40, 10, 20, 30);
        let r = evaluate(&p, &t).unwrap();
        assert!((r.bullish.precision - 0.8).abs() < 1e-12);
        assert!((r.bullish.recall - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.bullish.f1 - 0.727).abs() < 5e-4);
        assert_eq!(r.confusion.total(), 100);
        // recompute from the emitted matrix
        let c = r.confusion;
        assert!((r.accuracy - (c.tp + c.tn) as f64 / 100.0).abs() < 1e-12);
        let bear_p = c.tn as f64 / (c.tn + c.fn_) as f64;
        let bear_r = c.tn as f64 / (c.tn + c.fp) as f64;
        assert!((r.precision - 0.5 * (0.8 + bear_p)).abs() < 1e-12);
        assert!((r.recall - 0.5 * (2.0 / 3.0 + bear_r)).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            evaluate(&[Bullish], &[]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn quantile_interpolates() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(quantile(&xs, 0.0), 0.0);
        assert_eq!(quantile(&xs, 1.0), 3.0);
        assert!((quantile(&xs, 0.5) - 1.5).abs() < 1e-15);
        assert!((quantile(&xs, 0.025) - 0.075).abs() < 1e-15);
    }

    #[test]
    fn bootstrap_degenerate_and_deterministic() {
        let (p, t) = labels(5, 0, 0, 5);
        let ci = bootstrap_ci(&p, &t, 200, 9, Execution::Parallel).unwrap();
        assert_eq!((ci.accuracy.lo, ci.accuracy.hi), (1.0, 1.0));

        let (p, t) = labels(30, 8, 12, 50);
        let a = bootstrap_ci(&p, &t, 1000, 42, Execution::Parallel).unwrap();
        let b = bootstrap_ci(&p, &t, 1000, 42, Execution::Sequential).unwrap();
        assert_eq!(a, b);
        let c = bootstrap_ci(&p, &t, 1000, 43, Execution::Parallel).unwrap();
        assert_ne!(a, c);
        for iv in [a.accuracy, a.precision, a.recall, a.f1, a.bullish_f1] {
            assert!(iv.lo <= iv.mean && iv.mean <= iv.hi, "{iv:?}");
        }
        assert_eq!(a.accuracy.point, 0.8);
    }
}
