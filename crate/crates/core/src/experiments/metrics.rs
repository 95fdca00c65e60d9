//! Error metrics: RMSE and fraction of variance unexplained `1 − ρ²`.

use crate::error::{Error, Result};
use crate::tensor::SymTensor3;

/// RMSE and `1 − ρ²` of one scalar series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesMetrics {
    pub rmse: f64,
    /// `None` when either series has zero variance.
    pub fvu: Option<f64>,
}

/// Per-component and pooled metrics for stress predictions.
#[derive(Clone, Debug, PartialEq)]
pub struct StressMetrics {
    pub components: [SeriesMetrics; 6],
    /// RMSE over all `6N` entries.
    pub pooled_rmse: f64,
    /// Mean of the defined component values.
    pub pooled_fvu: Option<f64>,
}

pub fn rmse(truth: &[f64], pred: &[f64]) -> f64 {
    let sse: f64 = truth.iter().zip(pred).map(|(t, p)| (t - p) * (t - p)).sum();
    (sse / truth.len() as f64).sqrt()
}

/// `1 − ρ²` for Pearson `ρ`, clamped into `[0, 1]`.
pub fn fraction_unexplained(truth: &[f64], pred: &[f64]) -> Option<f64> {
    let n = truth.len() as f64;
    let mt = truth.iter().sum::<f64>() / n;
    let mp = pred.iter().sum::<f64>() / n;
    let (mut stt, mut spp, mut stp) = (0.0, 0.0, 0.0);
    for (t, p) in truth.iter().zip(pred) {
        let (dt, dp) = (t - mt, p - mp);
        stt += dt * dt;
        spp += dp * dp;
        stp += dt * dp;
    }
    if stt == 0.0 || spp == 0.0 {
        return None;
    }
    Some((1.0 - stp * stp / (stt * spp)).clamp(0.0, 1.0))
}

pub fn series_metrics(truth: &[f64], pred: &[f64]) -> Result<SeriesMetrics> {
    if truth.len() != pred.len() {
        return Err(Error::Shape(format!("{} truth values vs {} predictions", truth.len(), pred.len())));
    }
    if truth.len() < 2 {
        return Err(Error::InvalidInput("metrics need at least two points".into()));
    }
    Ok(SeriesMetrics { rmse: rmse(truth, pred), fvu: fraction_unexplained(truth, pred) })
}

pub fn evaluate_metrics(truth: &[SymTensor3], pred: &[SymTensor3]) -> Result<StressMetrics> {
    if truth.len() != pred.len() {
        return Err(Error::Shape(format!("{} truth tensors vs {} predictions", truth.len(), pred.len())));
    }
    let column = |ts: &[SymTensor3], k: usize| -> Vec<f64> { ts.iter().map(|t| t.components()[k]).collect() };
    let mut components = [SeriesMetrics { rmse: 0.0, fvu: None }; 6];
    for (k, m) in components.iter_mut().enumerate() {
        *m = series_metrics(&column(truth, k), &column(pred, k))?;
    }
    let pooled_rmse = (components.iter().map(|m| m.rmse * m.rmse).sum::<f64>() / 6.0).sqrt();
    let defined: Vec<f64> = components.iter().filter_map(|m| m.fvu).collect();
    let pooled_fvu = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
    Ok(StressMetrics { components, pooled_rmse, pooled_fvu })
}

/// Pooled RMSE only; used for the rotated training set.
pub fn component_rmse(truth: &[SymTensor3], pred: &[SymTensor3]) -> ([f64; 6], f64) {
    let mut per = [0.0; 6];
    for (t, p) in truth.iter().zip(pred) {
        for (k, (a, b)) in t.components().iter().zip(p.components()).enumerate() {
            per[k] += (a - b) * (a - b);
        }
    }
    let n = truth.len() as f64;
    let pooled = (per.iter().sum::<f64>() / (6.0 * n)).sqrt();
    (per.map(|s| (s / n).sqrt()), pooled)
}

/// Linear-interpolation quantile of a sorted slice (`q` in `[0, 1]`).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    Some(sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo]))
}

/// Median and interquartile range bounds `(q1, median, q3)`.
pub fn median_iqr(values: &[f64]) -> Option<(f64, f64, f64)> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    v.sort_by(f64::total_cmp);
    Some((quantile_sorted(&v, 0.25)?, quantile_sorted(&v, 0.5)?, quantile_sorted(&v, 0.75)?))
}
