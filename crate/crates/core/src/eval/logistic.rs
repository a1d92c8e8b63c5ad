use nalgebra::{Matrix5, Vector5};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 500;
const RELATIVE_TOLERANCE: f64 = 1e-10;
const MAX_DAMPING: f64 = 1e16;

/// `Q(x) = b1 (1/2 - 1 / (1 + exp(b2 (x - b3)))) + b4 x + b5`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Logistic5 {
    pub beta: [f64; 5],
}

impl Logistic5 {
    pub fn new(beta: [f64; 5]) -> Self {
        Self { beta }
    }

    pub fn identity() -> Self {
        Self::new([0.0, 1.0, 0.0, 1.0, 0.0])
    }

    pub fn eval(&self, x: f64) -> f64 {
        eval_5pl(self, x)
    }

    /// Whether the curve is monotone (either direction) on `points`
    /// evenly spaced samples of `[lo, hi]`.
    pub fn is_monotone_on(&self, lo: f64, hi: f64, points: usize) -> bool {
        let n = points.max(2);
        let ys: Vec<f64> = (0..n)
            .map(|i| self.eval(lo + (hi - lo) * i as f64 / (n - 1) as f64))
            .collect();
        let up = ys.windows(2).all(|w| w[1] >= w[0]);
        let down = ys.windows(2).all(|w| w[1] <= w[0]);
        up || down
    }
}

fn sigmoid_term(beta: &[f64; 5], x: f64) -> f64 {
    1.0 / (1.0 + (beta[1] * (x - beta[2])).exp())
}

pub fn eval_5pl(params: &Logistic5, x: f64) -> f64 {
    let b = &params.beta;
    b[0] * (0.5 - sigmoid_term(b, x)) + b[3] * x + b[4]
}

/// Outcome of a least-squares fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub params: Logistic5,
    pub rmse: f64,
    pub iterations: usize,
    /// RMSE after each accepted step, starting with the initial guess.
    pub rmse_history: Vec<f64>,
}

fn rmse_of(beta: &[f64; 5], x: &[f64], y: &[f64]) -> f64 {
    let p = Logistic5::new(*beta);
    let sse: f64 = x.iter().zip(y).map(|(&xi, &yi)| (p.eval(xi) - yi).powi(2)).sum();
    (sse / x.len() as f64).sqrt()
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

fn range(v: &[f64]) -> f64 {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    hi - lo
}

/// Damped Gauss-Newton from `start`; only RMSE-decreasing steps are taken.
fn descend(start: [f64; 5], x: &[f64], y: &[f64]) -> FitReport {
    let mut beta = start;
    let mut rmse = rmse_of(&beta, x, y);
    let mut history = vec![rmse];
    let mut lambda = 1e-3;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut jtj = Matrix5::<f64>::zeros();
        let mut jtr = Vector5::<f64>::zeros();
        for (&xi, &yi) in x.iter().zip(y) {
            let s = sigmoid_term(&beta, xi);
            let ds = s * (1.0 - s);
            let j = Vector5::new(
                0.5 - s,
                beta[0] * ds * (xi - beta[2]),
                -beta[0] * ds * beta[1],
                xi,
                1.0,
            );
            let r = yi - Logistic5::new(beta).eval(xi);
            jtj += j * j.transpose();
            jtr += j * r;
        }
        let mut improved = false;
        while lambda < MAX_DAMPING {
            let mut a = jtj;
            for d in 0..5 {
                a[(d, d)] += lambda * jtj[(d, d)].max(1e-12);
            }
            let step = a.lu().solve(&jtr);
            if let Some(step) = step {
                let candidate: [f64; 5] = std::array::from_fn(|i| beta[i] + step[i]);
                let c = rmse_of(&candidate, x, y);
                if c.is_finite() && c < rmse {
                    let gain = (rmse - c) / rmse.max(f64::MIN_POSITIVE);
                    beta = candidate;
                    rmse = c;
                    history.push(rmse);
                    lambda = (lambda / 10.0).max(1e-12);
                    improved = gain >= RELATIVE_TOLERANCE;
                    if !improved {
                        // accepted but negligible: converged
                        return FitReport {
                            params: Logistic5::new(beta),
                            rmse,
                            iterations,
                            rmse_history: history,
                        };
                    }
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !improved || rmse == 0.0 {
            break;
        }
    }
    FitReport {
        params: Logistic5::new(beta),
        rmse,
        iterations,
        rmse_history: history,
    }
}

/// Least-squares 5PL fit from objective `x` to subjective `y`.
///
/// Starts from `b1 = range(y)`, `b2 = 10 / range(x)`, `b3 = median(x)` and
/// `b4, b5` from a least-squares line; a second start with `b1 = 0` (the
/// line itself) is also descended and the lower RMSE kept.
pub fn fit_5pl(x: &[f64], y: &[f64]) -> Result<FitReport> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let mut distinct = x.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 5 {
        return Err(Error::DegenerateData(format!(
            "need at least 5 distinct objective scores, got {}",
            distinct.len()
        )));
    }
    let (slope, intercept) = line_fit(x, y);
    let b2 = 10.0 / range(x);
    let b3 = median(x);
    let primary = descend([range(y), b2, b3, slope, intercept], x, y);
    let linear = descend([0.0, b2, b3, slope, intercept], x, y);
    Ok(if linear.rmse < primary.rmse { linear } else { primary })
}

/// RMSE of `fit` applied to `x` against `y`.
pub fn cross_apply(fit: &Logistic5, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.is_empty() {
        return Err(Error::TooFew { needed: 1, got: 0 });
    }
    Ok(rmse_of(&fit.beta, x, y))
}
