//! Exact Gaussian process regression with a squared-exponential kernel.
//!
//! All output columns share one kernel. The posterior is
//!
//! `mean = K* (K + ε²I)⁻¹ Y`, `var = K** − K* (K + ε²I)⁻¹ K*ᵀ + ε²`
//!
//! and hyperparameters are chosen by maximizing the log marginal likelihood
//! in log-space with a multi-start box-constrained L-BFGS.

mod kernel;
mod linalg;
pub mod optimize;
mod persist;

use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

pub use kernel::{sq_dist, Kernel};
pub(crate) use kernel::{dot3, sub3};
pub use linalg::{factorize_with_jitter, Factorization, MAX_JITTER};
pub use optimize::{ConvergenceStatus, LbfgsOptions};
pub use persist::{SavedGp, FORMAT_VERSION};

use crate::error::{Error, Result};

/// Observation noise variance used throughout unless overridden.
pub const DEFAULT_NOISE: f64 = 1e-10;

/// Natural-log hyperparameter box for the optimizer.
pub const LOG_BOUNDS: (f64, f64) = (-10.0, 10.0);

/// Range of uniformly drawn natural-log starting points.
pub const LOG_INIT_RANGE: (f64, f64) = (-4.0, 4.0);

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// A fitted GP. Immutable apart from a diagnostic counter, so it can be shared
/// across threads for prediction.
#[derive(Debug)]
pub struct GpModel {
    inputs: DMatrix<f64>,
    targets: DMatrix<f64>,
    kernel: Kernel,
    noise: f64,
    factor: Factorization,
    weights: DMatrix<f64>,
    duplicate_inputs: bool,
    clamped_variances: AtomicUsize,
}

impl GpModel {
    /// Factorize `K + ε²I` (escalating jitter on failure) and precompute the
    /// weights `(K + ε²I)⁻¹ Y`.
    pub fn fit(inputs: &DMatrix<f64>, targets: &DMatrix<f64>, kernel: Kernel, noise: f64) -> Result<Self> {
        check_training_shapes(inputs, targets)?;
        let sq = pairwise_sq_dists(inputs);
        let duplicate_inputs = has_duplicates(&sq);
        if duplicate_inputs {
            log::warn!("training inputs contain duplicate rows; relying on jitter");
        }
        let factor = factorize_with_jitter(&kernel_from_sq(&kernel, &sq), noise)?;
        let weights = factor.chol.solve(targets);
        Ok(Self {
            inputs: inputs.clone(),
            targets: targets.clone(),
            kernel,
            noise,
            factor,
            weights,
            duplicate_inputs,
            clamped_variances: AtomicUsize::new(0),
        })
    }

    /// Optimize hyperparameters, then fit with the best ones.
    pub fn fit_optimized<R: Rng + ?Sized>(
        inputs: &DMatrix<f64>,
        targets: &DMatrix<f64>,
        noise: f64,
        restarts: usize,
        rng: &mut R,
    ) -> Result<(Self, FitReport)> {
        let report = optimize_hyperparameters(inputs, targets, noise, restarts, rng)?;
        let model = Self::fit(inputs, targets, report.kernel, noise)?;
        Ok((model, report))
    }

    pub fn inputs(&self) -> &DMatrix<f64> {
        &self.inputs
    }

    pub fn targets(&self) -> &DMatrix<f64> {
        &self.targets
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    /// Noise variance requested at fit time.
    pub fn noise(&self) -> f64 {
        self.noise
    }

    /// Diagonal term actually used after any jitter escalation.
    pub fn jitter(&self) -> f64 {
        self.factor.jitter
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn has_duplicate_inputs(&self) -> bool {
        self.duplicate_inputs
    }

    pub fn condition_estimate(&self) -> f64 {
        self.factor.condition_estimate()
    }

    /// Number of negative posterior variances clamped so far.
    pub fn clamped_variances(&self) -> usize {
        self.clamped_variances.load(Ordering::Relaxed)
    }

    /// Cross-covariance `K(X*, X)`.
    pub fn cross_covariance(&self, points: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if points.ncols() != self.inputs.ncols() {
            return Err(Error::Shape(format!(
                "query points have {} columns, model expects {}",
                points.ncols(),
                self.inputs.ncols()
            )));
        }
        let xt = self.inputs.transpose();
        let pt = points.transpose();
        Ok(DMatrix::from_fn(points.nrows(), self.inputs.nrows(), |q, n| {
            self.kernel.eval(pt.column(q).as_slice(), xt.column(n).as_slice())
        }))
    }

    /// Posterior mean at each row of `points` (Q×D → Q×M).
    pub fn predict_mean(&self, points: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        Ok(self.cross_covariance(points)? * &self.weights)
    }

    /// Posterior predictive variance including the noise term. The epistemic
    /// part is clamped at zero when round-off drives it negative.
    pub fn predict_var(&self, points: &DMatrix<f64>) -> Result<DVector<f64>> {
        let kstar_t = self.cross_covariance(points)?.transpose();
        let v = self.factor.chol.l_dirty().solve_lower_triangular(&kstar_t).ok_or_else(|| {
            Error::InvalidInput("singular Cholesky factor".into())
        })?;
        let mut clamped = 0;
        let var = DVector::from_iterator(
            points.nrows(),
            v.column_iter().map(|col| {
                let epistemic = self.kernel.theta1 - col.norm_squared();
                if epistemic < 0.0 {
                    clamped += 1;
                    self.factor.jitter
                } else {
                    epistemic + self.factor.jitter
                }
            }),
        );
        if clamped > 0 {
            log::warn!("clamped {clamped} negative posterior variances");
            self.clamped_variances.fetch_add(clamped, Ordering::Relaxed);
        }
        Ok(var)
    }

    /// Log marginal likelihood summed over output columns.
    pub fn log_evidence(&self) -> f64 {
        evidence_value(&self.targets, &self.weights, &self.factor)
    }

    pub fn to_saved(&self) -> SavedGp {
        SavedGp::from_model(self)
    }
}

/// Outcome of one optimizer restart, in natural-log hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartOutcome {
    pub start: [f64; 2],
    pub end: [f64; 2],
    pub log_evidence: f64,
    pub iterations: usize,
    pub status: ConvergenceStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub kernel: Kernel,
    pub log_evidence: f64,
    pub restarts: usize,
    pub outcomes: Vec<RestartOutcome>,
}

/// Log evidence and its gradient with respect to `(ln θ1, ln θ2)`.
#[derive(Clone, Copy, Debug)]
pub struct EvidenceEval {
    pub value: f64,
    pub gradient: [f64; 2],
    pub jitter: f64,
}

/// The log marginal likelihood of a fixed training set as a function of the
/// kernel hyperparameters.
#[derive(Clone, Debug)]
pub struct GpEvidence {
    sq_dists: DMatrix<f64>,
    targets: DMatrix<f64>,
    noise: f64,
}

impl GpEvidence {
    pub fn new(inputs: &DMatrix<f64>, targets: &DMatrix<f64>, noise: f64) -> Result<Self> {
        check_training_shapes(inputs, targets)?;
        Ok(Self { sq_dists: pairwise_sq_dists(inputs), targets: targets.clone(), noise })
    }

    pub fn evaluate(&self, log_params: [f64; 2]) -> Result<EvidenceEval> {
        let kernel = Kernel::from_log(log_params);
        let k = kernel_from_sq(&kernel, &self.sq_dists);
        let factor = factorize_with_jitter(&k, self.noise)?;
        let alpha = factor.chol.solve(&self.targets);
        let value = evidence_value(&self.targets, &alpha, &factor);

        // dL/dp = ½ tr((α αᵀ − M K̃⁻¹) ∂K/∂p), with ∂K/∂ln θ1 = K and
        // ∂K/∂ln θ2 = −θ2 D ∘ K.
        let inv = factor.chol.inverse();
        let aat = &alpha * alpha.transpose();
        let m = self.targets.ncols() as f64;
        let (mut g1, mut g2) = (0.0, 0.0);
        for (((aa, iv), kij), d) in aat.iter().zip(inv.iter()).zip(k.iter()).zip(self.sq_dists.iter()) {
            let w = (aa - m * iv) * kij;
            g1 += w;
            g2 -= w * d;
        }
        g2 *= kernel.theta2;
        Ok(EvidenceEval { value, gradient: [0.5 * g1, 0.5 * g2], jitter: factor.jitter })
    }
}

/// Maximize the log evidence over `(ln θ1, ln θ2)` from `restarts` random
/// starting points and return the best.
pub fn optimize_hyperparameters<R: Rng + ?Sized>(
    inputs: &DMatrix<f64>,
    targets: &DMatrix<f64>,
    noise: f64,
    restarts: usize,
    rng: &mut R,
) -> Result<FitReport> {
    let objective = GpEvidence::new(inputs, targets, noise)?;
    maximize_evidence(|p| objective.evaluate(p).ok().map(|e| (e.value, e.gradient)), restarts, rng)
}

/// Multi-start driver shared by every evidence objective in the crate.
pub fn maximize_evidence<F, R>(objective: F, restarts: usize, rng: &mut R) -> Result<FitReport>
where
    F: Fn([f64; 2]) -> Option<(f64, [f64; 2])>,
    R: Rng + ?Sized,
{
    if restarts == 0 {
        return Err(Error::InvalidInput("restarts must be at least 1".into()));
    }
    let starts: Vec<[f64; 2]> = (0..restarts)
        .map(|_| std::array::from_fn(|_| rng.random_range(LOG_INIT_RANGE.0..LOG_INIT_RANGE.1)))
        .collect();
    let lower = [LOG_BOUNDS.0; 2];
    let upper = [LOG_BOUNDS.1; 2];
    let opts = LbfgsOptions::default();

    let mut outcomes = Vec::with_capacity(restarts);
    for start in starts {
        let min = optimize::minimize(
            |x| objective([x[0], x[1]]).map(|(v, g)| (-v, vec![-g[0], -g[1]])),
            &start,
            &lower,
            &upper,
            &opts,
        );
        outcomes.push(RestartOutcome {
            start,
            end: [min.x[0], min.x[1]],
            log_evidence: -min.value,
            iterations: min.iterations,
            status: min.status,
        });
    }

    let best = outcomes
        .iter()
        .filter(|o| o.status != ConvergenceStatus::Failed && o.log_evidence.is_finite())
        .max_by(|a, b| a.log_evidence.total_cmp(&b.log_evidence))
        .cloned();
    match best {
        Some(best) => Ok(FitReport { kernel: Kernel::from_log(best.end), log_evidence: best.log_evidence, restarts, outcomes }),
        None => Err(Error::OptimizationFailed {
            restarts,
            diagnostics: outcomes
                .iter()
                .map(|o| format!("start {:?}: {:?}", o.start, o.status))
                .collect::<Vec<_>>()
                .join("; "),
        }),
    }
}

fn check_training_shapes(inputs: &DMatrix<f64>, targets: &DMatrix<f64>) -> Result<()> {
    if inputs.nrows() == 0 {
        return Err(Error::InvalidInput("at least one training point is required".into()));
    }
    if inputs.nrows() != targets.nrows() {
        return Err(Error::Shape(format!("{} inputs but {} targets", inputs.nrows(), targets.nrows())));
    }
    if inputs.iter().chain(targets.iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("training data must be finite".into()));
    }
    Ok(())
}

pub(crate) fn pairwise_sq_dists(x: &DMatrix<f64>) -> DMatrix<f64> {
    let xt = x.transpose();
    let n = x.nrows();
    let mut d = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..j {
            let v = sq_dist(xt.column(i).as_slice(), xt.column(j).as_slice());
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    d
}

fn kernel_from_sq(kernel: &Kernel, sq: &DMatrix<f64>) -> DMatrix<f64> {
    sq.map(|d| kernel.eval_sq(d))
}

fn has_duplicates(sq: &DMatrix<f64>) -> bool {
    let n = sq.nrows();
    (0..n).any(|j| (0..j).any(|i| sq[(i, j)] < 1e-24))
}

/// `−½ Σ_m y_mᵀ α_m − (M/2) log|K̃| − (N M/2) log 2π`.
pub(crate) fn evidence_value(targets: &DMatrix<f64>, alpha: &DMatrix<f64>, factor: &Factorization) -> f64 {
    let n = targets.nrows() as f64;
    let m = targets.ncols() as f64;
    let fit: f64 = targets.iter().zip(alpha.iter()).map(|(y, a)| y * a).sum();
    -0.5 * fit - 0.5 * m * factor.log_det() - 0.5 * n * m * LN_2PI
}
