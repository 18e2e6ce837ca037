use super::{LinearModel, ModelFamily, TrainConfig};
use crate::corpus::SentimentLabel;
use crate::vectorizer::SparseVector;
use crate::{Error, Result};

/// Multinomial Naive Bayes on raw term counts, folded into a linear model.
///
/// With Laplace-smoothed class-conditional probabilities
/// `θ_ct = (N_ct + α) / (N_c + α·V)` and empirical priors, the posterior
/// log-odds of a count vector `x` is `Σ_t x_t (ln θ_bull,t − ln θ_bear,t) +
/// ln(π_bull / π_bear)`, which is what the returned weights and bias encode.
pub fn train_multinomial_nb(
    counts: &[SparseVector],
    labels: &[SentimentLabel],
    cfg: &TrainConfig,
) -> Result<LinearModel> {
    if counts.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: counts.len(),
            right: labels.len(),
        });
    }
    let dim = counts.first().map_or(0, |x| x.dim);
    let mut per_class = [vec![0.0; dim], vec![0.0; dim]];
    let mut docs = [0usize; 2];
    for (x, label) in counts.iter().zip(labels) {
        if x.dim != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: x.dim,
            });
        }
        let c = usize::from(!label.is_bullish());
        docs[c] += 1;
        for (i, v) in x.iter() {
            if v < 0.0 {
                return Err(Error::NegativeCount);
            }
            per_class[c][i] += v;
        }
    }
    if docs[0] == 0 || docs[1] == 0 {
        return Err(Error::SingleClass);
    }
    let alpha = cfg.nb_alpha;
    let log_denominator = |c: usize| (per_class[c].iter().sum::<f64>() + alpha * dim as f64).ln();
    let (den_bull, den_bear) = (log_denominator(0), log_denominator(1));
    let weights = (0..dim)
        .map(|t| {
            ((per_class[0][t] + alpha).ln() - den_bull)
                - ((per_class[1][t] + alpha).ln() - den_bear)
        })
        .collect();
    let bias = (docs[0] as f64).ln() - (docs[1] as f64).ln();
    Ok(LinearModel {
        family: ModelFamily::MultinomialNb,
        weights,
        bias,
        threshold: cfg.threshold,
    })
}
