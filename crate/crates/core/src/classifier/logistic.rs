use serde::{Deserialize, Serialize};

use super::{sigmoid, LinearModel, ModelFamily, TrainConfig};
use crate::corpus::SentimentLabel;
use crate::vectorizer::SparseVector;
use crate::{Error, Execution, Result};

/// Rows per partial sum. Fixed so that the reduction order, and therefore
/// every bit of the result, is independent of the thread count.
const CHUNK: usize = 2048;
const ARMIJO: f64 = 1e-4;

/// `log(1 + exp(-m))` without overflow.
fn log1p_exp_neg(m: f64) -> f64 {
    if m > 0.0 {
        (-m).exp().ln_1p()
    } else {
        -m + m.exp().ln_1p()
    }
}

/// Mean L2-regularized logistic loss
///
/// ```text
/// f(w, b) = (1/n) Σ ln(1 + exp(-y_i (w·x_i + b))) + λ/(2n) ‖w‖²
/// ```
///
/// with `y = +1` for bullish. Its minimizer matches the usual
/// `C = 1/λ` summed-loss formulation.
pub struct LogisticObjective<'a> {
    xs: &'a [SparseVector],
    ys: Vec<f64>,
    dim: usize,
    lambda: f64,
    exec: Execution,
}

impl<'a> LogisticObjective<'a> {
    pub fn new(
        xs: &'a [SparseVector],
        labels: &[SentimentLabel],
        lambda: f64,
        exec: Execution,
    ) -> Result<Self> {
        if xs.len() != labels.len() {
            return Err(Error::LengthMismatch {
                left: xs.len(),
                right: labels.len(),
            });
        }
        let dim = xs.first().map_or(0, |x| x.dim);
        if let Some(bad) = xs.iter().find(|x| x.dim != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim,
            });
        }
        let ys = labels
            .iter()
            .map(|l| if l.is_bullish() { 1.0 } else { -1.0 })
            .collect();
        Ok(LogisticObjective {
            xs,
            ys,
            dim,
            lambda,
            exec,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Objective value, weight gradient and bias gradient.
    pub fn evaluate(&self, w: &[f64], b: f64) -> (f64, Vec<f64>, f64) {
        let n = self.xs.len() as f64;
        let partials = self.exec.map_chunks(self.xs, CHUNK, |start, rows| {
            let mut loss = 0.0;
            let mut gb = 0.0;
            let mut gw = vec![0.0; self.dim];
            for (k, x) in rows.iter().enumerate() {
                let y = self.ys[start + k];
                let margin = y * (x.dot(w) + b);
                loss += log1p_exp_neg(margin);
                // d/ds ln(1 + e^{-ys}) = -y σ(-ys)
                let coef = -y * sigmoid(-margin);
                gb += coef;
                for (i, v) in x.iter() {
                    gw[i] += coef * v;
                }
            }
            (loss, gw, gb)
        });
        let mut loss = 0.0;
        let mut gb = 0.0;
        let mut gw = vec![0.0; self.dim];
        for (l, g, b_part) in partials {
            loss += l;
            gb += b_part;
            for (acc, v) in gw.iter_mut().zip(g) {
                *acc += v;
            }
        }
        let reg = self.lambda / n;
        let mut norm_sq = 0.0;
        for (g, &wi) in gw.iter_mut().zip(w) {
            *g = *g / n + reg * wi;
            norm_sq += wi * wi;
        }
        (loss / n + 0.5 * reg * norm_sq, gw, gb / n)
    }

    fn value(&self, w: &[f64], b: f64) -> f64 {
        let n = self.xs.len() as f64;
        let losses = self.exec.map_chunks(self.xs, CHUNK, |start, rows| {
            rows.iter()
                .enumerate()
                .map(|(k, x)| log1p_exp_neg(self.ys[start + k] * (x.dot(w) + b)))
                .sum::<f64>()
        });
        let norm_sq: f64 = w.iter().map(|v| v * v).sum();
        losses.into_iter().sum::<f64>() / n + 0.5 * self.lambda / n * norm_sq
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSummary {
    pub iterations: usize,
    pub converged: bool,
    pub objective: f64,
    pub gradient_norm: f64,
}

fn grad_norm(gw: &[f64], gb: f64) -> f64 {
    (gw.iter().map(|g| g * g).sum::<f64>() + gb * gb).sqrt()
}

/// Fit L2-regularized logistic regression by full-batch gradient descent.
///
/// Each step tries a Barzilai-Borwein step length and backtracks until the
/// Armijo condition holds. Stops at `‖∇f‖ ≤ tol` or after `max_iters`.
pub fn train_logistic(
    xs: &[SparseVector],
    labels: &[SentimentLabel],
    cfg: &TrainConfig,
    exec: Execution,
) -> Result<(LinearModel, TrainSummary)> {
    if xs.len() < 2 {
        return Err(Error::TooFew {
            needed: 2,
            got: xs.len(),
        });
    }
    let obj = LogisticObjective::new(xs, labels, cfg.l2_lambda, exec)?;
    if labels.iter().all(|l| *l == labels[0]) {
        return Err(Error::SingleClass);
    }

    let mut w = vec![0.0; obj.dim()];
    let mut b = 0.0;
    let (mut f, mut gw, mut gb) = obj.evaluate(&w, b);
    let mut step = 1.0;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < cfg.max_iters {
        let gnorm = grad_norm(&gw, gb);
        if gnorm <= cfg.tol {
            converged = true;
            break;
        }
        iterations += 1;
        let g_sq = gnorm * gnorm;
        let mut t = step;
        // None when no step decreases f at working precision
        let step_found = loop {
            let w_try: Vec<f64> = w.iter().zip(&gw).map(|(wi, gi)| wi - t * gi).collect();
            let b_try = b - t * gb;
            let f_try = obj.value(&w_try, b_try);
            if f_try <= f - ARMIJO * t * g_sq {
                break Some((w_try, b_try));
            }
            if t < 1e-16 {
                break None;
            }
            t *= 0.5;
        };
        let Some((w_new, b_new)) = step_found else {
            break;
        };
        let (f_next, gw_next, gb_next) = obj.evaluate(&w_new, b_new);
        let mut s_dot_s = (b_new - b) * (b_new - b);
        let mut s_dot_y = (b_new - b) * (gb_next - gb);
        for i in 0..w.len() {
            let s = w_new[i] - w[i];
            s_dot_s += s * s;
            s_dot_y += s * (gw_next[i] - gw[i]);
        }
        step = if s_dot_y > 0.0 {
            (s_dot_s / s_dot_y).clamp(1e-10, 1e10)
        } else {
            (t * 2.0).min(1e10)
        };
        w = w_new;
        b = b_new;
        f = f_next;
        gw = gw_next;
        gb = gb_next;
    }
    if !converged && grad_norm(&gw, gb) <= cfg.tol {
        converged = true;
    }

    let summary = TrainSummary {
        iterations,
        converged,
        objective: f,
        gradient_norm: grad_norm(&gw, gb),
    };
    Ok((
        LinearModel {
            family: ModelFamily::Logistic,
            weights: w,
            bias: b,
            threshold: cfg.threshold,
        },
        summary,
    ))
}
