//! Per-trial rows and the per-(regressor, size) summary.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::config::RegressorKind;
use super::metrics::{median_iqr, SeriesMetrics, StressMetrics};
use crate::error::Result;
use crate::tensor::COMPONENT_NAMES;

/// Label of the row that carries pooled metrics for a trial.
pub const POOLED: &str = "pooled";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialStatus {
    Ok,
    IllConditioned,
    OptimizationFailed,
    InvalidStretch,
    Error,
}

impl TrialStatus {
    pub fn is_ok(&self) -> bool {
        *self == TrialStatus::Ok
    }
}

/// Outcome of fitting and evaluating one regressor on one training set.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialResult {
    pub regressor: RegressorKind,
    pub size: usize,
    pub trial: usize,
    /// Seed of the training set.
    pub seed: u64,
    pub status: TrialStatus,
    /// Failure description, empty on success.
    pub message: String,
    pub metrics: Option<StressMetrics>,
    /// Per-component and pooled RMSE on the randomly rotated training set.
    pub rotated_rmse: Option<([f64; 6], f64)>,
    pub potential: Option<SeriesMetrics>,
    /// `|Φ̂(3, 3, 1)|` of a potential model. Not written to the CSV.
    pub grounding_residual: Option<f64>,
    pub cond_estimate: Option<f64>,
    pub wall_ms: Option<f64>,
}

impl TrialResult {
    pub fn pooled_rmse(&self) -> Option<f64> {
        self.metrics.as_ref().map(|m| m.pooled_rmse)
    }

    pub fn pooled_fvu(&self) -> Option<f64> {
        self.metrics.as_ref().and_then(|m| m.pooled_fvu)
    }

    /// Six component rows followed by the pooled row; a failed trial is a
    /// single pooled row carrying the status.
    pub fn rows(&self) -> Vec<ResultRow> {
        let base = ResultRow {
            regressor: self.regressor,
            size: self.size,
            trial: self.trial,
            seed: self.seed,
            component: POOLED.to_owned(),
            rmse: None,
            fvu: None,
            rotated_rmse: None,
            pot_rmse: None,
            pot_fvu: None,
            cond_estimate: self.cond_estimate,
            wall_ms: self.wall_ms,
            status: self.status.clone(),
        };
        let Some(m) = &self.metrics else {
            return vec![base];
        };
        let mut rows: Vec<ResultRow> = COMPONENT_NAMES
            .iter()
            .enumerate()
            .map(|(k, name)| ResultRow {
                component: (*name).to_owned(),
                rmse: Some(m.components[k].rmse),
                fvu: m.components[k].fvu,
                rotated_rmse: self.rotated_rmse.map(|r| r.0[k]),
                ..base.clone()
            })
            .collect();
        rows.push(ResultRow {
            rmse: Some(m.pooled_rmse),
            fvu: m.pooled_fvu,
            rotated_rmse: self.rotated_rmse.map(|r| r.1),
            pot_rmse: self.potential.map(|p| p.rmse),
            pot_fvu: self.potential.and_then(|p| p.fvu),
            ..base
        });
        rows
    }
}

/// One line of `results.csv`. Empty fields mean "not applicable" or
/// "undefined" (e.g. `1 − ρ²` of a constant truth column).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub regressor: RegressorKind,
    pub size: usize,
    pub trial: usize,
    pub seed: u64,
    pub component: String,
    pub rmse: Option<f64>,
    pub fvu: Option<f64>,
    pub rotated_rmse: Option<f64>,
    pub pot_rmse: Option<f64>,
    pub pot_fvu: Option<f64>,
    pub cond_estimate: Option<f64>,
    pub wall_ms: Option<f64>,
    pub status: TrialStatus,
}

impl ResultRow {
    pub fn is_pooled(&self) -> bool {
        self.component == POOLED
    }

    pub fn key(&self) -> (RegressorKind, usize, usize) {
        (self.regressor, self.size, self.trial)
    }
}

pub fn write_rows<W: Write>(w: &mut csv::Writer<W>, rows: &[ResultRow]) -> Result<()> {
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: Read>(r: R) -> Result<Vec<ResultRow>> {
    let mut input = csv::Reader::from_reader(r);
    Ok(input.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Median and interquartile range per (regressor, size), from pooled rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub regressor: RegressorKind,
    pub size: usize,
    pub trials_ok: usize,
    pub trials_failed: usize,
    pub rmse_q1: Option<f64>,
    pub rmse_median: Option<f64>,
    pub rmse_q3: Option<f64>,
    pub fvu_q1: Option<f64>,
    pub fvu_median: Option<f64>,
    pub fvu_q3: Option<f64>,
    pub rotated_rmse_median: Option<f64>,
    pub pot_rmse_median: Option<f64>,
    pub pot_fvu_median: Option<f64>,
    pub cond_median: Option<f64>,
}

pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(RegressorKind, usize), Vec<&ResultRow>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.is_pooled()) {
        groups.entry((r.regressor, r.size)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((regressor, size), group)| {
            let ok: Vec<&&ResultRow> = group.iter().filter(|r| r.status.is_ok()).collect();
            let collect = |f: fn(&ResultRow) -> Option<f64>| -> Vec<f64> { ok.iter().filter_map(|r| f(r)).collect() };
            let rmse = median_iqr(&collect(|r| r.rmse));
            let fvu = median_iqr(&collect(|r| r.fvu));
            let median = |f: fn(&ResultRow) -> Option<f64>| median_iqr(&collect(f)).map(|q| q.1);
            SummaryRow {
                regressor,
                size,
                trials_ok: ok.len(),
                trials_failed: group.len() - ok.len(),
                rmse_q1: rmse.map(|q| q.0),
                rmse_median: rmse.map(|q| q.1),
                rmse_q3: rmse.map(|q| q.2),
                fvu_q1: fvu.map(|q| q.0),
                fvu_median: fvu.map(|q| q.1),
                fvu_q3: fvu.map(|q| q.2),
                rotated_rmse_median: median(|r| r.rotated_rmse),
                pot_rmse_median: median(|r| r.pot_rmse),
                pot_fvu_median: median(|r| r.pot_fvu),
                cond_median: {
                    let all: Vec<f64> = group.iter().filter_map(|r| r.cond_estimate).collect();
                    median_iqr(&all).map(|q| q.1)
                },
            }
        })
        .collect()
}

pub fn write_summary<W: Write>(w: W, summary: &[SummaryRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for s in summary {
        out.serialize(s)?;
    }
    out.flush()?;
    Ok(())
}
