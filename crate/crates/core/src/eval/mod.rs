//! Objective-to-subjective mapping, agreement statistics and Pareto pruning.

mod dataset;
mod logistic;

use serde::{Deserialize, Serialize};

pub use dataset::{LabeledDataset, LabeledRow, Manifest, ManifestRow};
pub use logistic::{cross_apply, eval_5pl, fit_5pl, FitReport, Logistic5};

use crate::error::{Error, Result};

/// Grid used to check that a fitted curve is monotone.
pub const MONOTONE_GRID: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Correlations {
    pub pcc: f64,
    pub srocc: f64,
    pub rmse: f64,
}

fn check_lengths(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(Error::TooFew { needed: 2, got: a.len() });
    }
    Ok(())
}

/// Product-moment correlation.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    check_lengths(a, b)?;
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::DegenerateData("constant input has no correlation".into()));
    }
    Ok(sab / (saa * sbb).sqrt())
}

/// 1-based ranks; tied values share their mean rank.
pub fn average_ranks(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && v[order[j]] == v[order[i]] {
            j += 1;
        }
        let r = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = r;
        }
        i = j;
    }
    ranks
}

/// Pearson correlation of average ranks.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    check_lengths(a, b)?;
    pearson(&average_ranks(a), &average_ranks(b))
}

pub fn rmse(a: &[f64], b: &[f64]) -> Result<f64> {
    check_lengths(a, b)?;
    let sse: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    Ok((sse / a.len() as f64).sqrt())
}

pub fn correlations(pred: &[f64], subj: &[f64]) -> Result<Correlations> {
    Ok(Correlations {
        pcc: pearson(pred, subj)?,
        srocc: spearman(pred, subj)?,
        rmse: rmse(pred, subj)?,
    })
}

/// A fitted mapping plus its agreement with the subjective scores.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub fit: FitReport,
    /// PCC and RMSE after the 5PL mapping; SROCC on the raw scores.
    pub correlations: Correlations,
    /// Whether the fitted curve is monotone over the objective score range.
    pub monotone: bool,
}

pub fn evaluate(objective: &[f64], subjective: &[f64]) -> Result<Evaluation> {
    let fit = fit_5pl(objective, subjective)?;
    let mapped: Vec<f64> = objective.iter().map(|&x| fit.params.eval(x)).collect();
    let lo = objective.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = objective.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(Evaluation {
        correlations: Correlations {
            pcc: pearson(&mapped, subjective)?,
            srocc: spearman(objective, subjective)?,
            rmse: rmse(&mapped, subjective)?,
        },
        monotone: fit.params.is_monotone_on(lo, hi, MONOTONE_GRID),
        fit,
    })
}

/// A labelled (cost, performance) pair, e.g. user seconds and SROCC.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostPerfPoint {
    pub label: String,
    pub cost: f64,
    pub perf: f64,
}

impl CostPerfPoint {
    pub fn new(label: impl Into<String>, cost: f64, perf: f64) -> Result<Self> {
        if !(cost > 0.0) || !cost.is_finite() {
            return Err(Error::InvalidParameter(format!("cost must be positive, got {cost}")));
        }
        if !(-1.0..=1.0).contains(&perf) {
            return Err(Error::InvalidParameter(format!("performance must be in [-1, 1], got {perf}")));
        }
        Ok(Self {
            label: label.into(),
            cost,
            perf,
        })
    }

    /// No worse on both axes and strictly better on one.
    pub fn dominates(&self, other: &CostPerfPoint) -> bool {
        self.cost <= other.cost
            && self.perf >= other.perf
            && (self.cost < other.cost || self.perf > other.perf)
    }
}

/// Points not dominated by any other, in input order.
pub fn pareto_front(points: &[CostPerfPoint]) -> Vec<CostPerfPoint> {
    points
        .iter()
        .filter(|p| !points.iter().any(|q| q.dominates(p)))
        .cloned()
        .collect()
}
