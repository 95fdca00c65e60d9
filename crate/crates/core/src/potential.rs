//! Strain-energy potential GP.
//!
//! Stress observations are converted to gradient observations
//! `∂Φ/∂I_k` at the invariants of `B`. A GP over `Φ(I1, I2, I3)` is conditioned
//! on those gradients plus the grounding datum `Φ(3, 3, 1) = 0`, using the
//! derivative covariances of the squared-exponential kernel:
//!
//! `Cov(∂Φ(I)/∂I_i, Φ(I')) = ∂K/∂I_i`, `Cov(∂Φ(I)/∂I_i, ∂Φ(I')/∂I'_j) = ∂²K/∂I_i∂I'_j`.
//!
//! The augmented covariance is ordered ground first, then every `∂/∂I1` row,
//! then `∂/∂I2`, then `∂/∂I3`. One weight vector serves both the potential and
//! its gradient, and the gradient maps back to stress through the tensor basis.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::{factorize_with_jitter, maximize_evidence, Factorization, FitReport, Kernel};
use crate::tbgp::featurize;
use crate::tensor::{invariants, reconstruct, snap_feature, BasisCoefficients, Invariants, SymTensor3, TensorPair};
use crate::StressRegressor;

/// Invariants of the undeformed state, where the potential is pinned to zero.
pub const GROUND_POINT: [f64; 3] = [3.0, 3.0, 1.0];

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Partial derivatives of the potential at one point of invariant space (MPa).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialGradientSample {
    pub invariants: Invariants,
    /// `(∂Φ/∂I1, ∂Φ/∂I2, ∂Φ/∂I3)`.
    pub gradient: [f64; 3],
}

fn check_stretch(inv: &Invariants) -> Result<()> {
    if inv.i3 > 0.0 && inv.i3.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidStretch { i3: inv.i3 })
    }
}

/// Potential gradient implied by tensor-basis coefficients:
/// `∂Φ/∂I1 = √I3 (c2 + c3 I1) / 2`, `∂Φ/∂I2 = −c3 √I3 / 2`, `∂Φ/∂I3 = c1 / (2 √I3)`.
pub fn coefficients_to_gradient(c: &BasisCoefficients, inv: &Invariants) -> Result<PotentialGradientSample> {
    check_stretch(inv)?;
    let j = inv.i3.sqrt();
    Ok(PotentialGradientSample {
        invariants: *inv,
        gradient: [0.5 * j * (c.c2 + c.c3 * inv.i1), -0.5 * c.c3 * j, c.c1 / (2.0 * j)],
    })
}

/// Inverse of [`coefficients_to_gradient`]:
/// `c1 = 2 √I3 ∂Φ/∂I3`, `c2 = 2 (∂Φ/∂I1 + I1 ∂Φ/∂I2) / √I3`, `c3 = −2 ∂Φ/∂I2 / √I3`.
pub fn gradient_to_coefficients(g: &PotentialGradientSample) -> Result<BasisCoefficients> {
    check_stretch(&g.invariants)?;
    let j = g.invariants.i3.sqrt();
    let [d1, d2, d3] = g.gradient;
    Ok(BasisCoefficients::new(2.0 * j * d3, 2.0 * (d1 + g.invariants.i1 * d2) / j, -2.0 * d2 / j))
}

/// Derivative covariance blocks between two point sets in invariant space.
#[derive(Clone, Debug)]
pub struct DerivativeBlocks {
    /// `value_gradient[i][(n, m)] = ∂K(a_n, b_m)/∂a_i`.
    pub value_gradient: [DMatrix<f64>; 3],
    /// `gradient_gradient[i][j][(n, m)] = ∂²K(a_n, b_m)/∂a_i ∂b_j`.
    pub gradient_gradient: [[DMatrix<f64>; 3]; 3],
}

pub fn kernel_derivative_blocks(k: &Kernel, a: &[[f64; 3]], b: &[[f64; 3]]) -> DerivativeBlocks {
    let (n, m) = (a.len(), b.len());
    let mut vg: [DMatrix<f64>; 3] = std::array::from_fn(|_| DMatrix::zeros(n, m));
    let mut gg: [[DMatrix<f64>; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| DMatrix::zeros(n, m)));
    for (p, x) in a.iter().enumerate() {
        for (q, y) in b.iter().enumerate() {
            let g = k.grad_first(x, y);
            let h = k.grad_grad(x, y);
            for i in 0..3 {
                vg[i][(p, q)] = g[i];
                for j in 0..3 {
                    gg[i][j][(p, q)] = h[i][j];
                }
            }
        }
    }
    DerivativeBlocks { value_gradient: vg, gradient_gradient: gg }
}

/// Augmented (ground + gradient) covariance and, optionally, its derivative
/// with respect to `ln θ2`.
fn augmented_covariance(kernel: &Kernel, points: &[[f64; 3]], want_theta2: bool) -> (DMatrix<f64>, Option<DMatrix<f64>>) {
    let n = points.len();
    let dim = 3 * n + 1;
    let idx = |i: usize, p: usize| 1 + i * n + p;
    let t2 = kernel.theta2;
    let mut k = DMatrix::zeros(dim, dim);
    let mut dk = want_theta2.then(|| DMatrix::zeros(dim, dim));

    k[(0, 0)] = kernel.theta1;
    for (p, x) in points.iter().enumerate() {
        // Cov(∂Φ(x)/∂x_i, Φ(g)) = ∂K(x, g)/∂x_i = −2θ2 (x − g)_i K.
        let r = crate::gp::sub3(x, &GROUND_POINT);
        let r2 = crate::gp::dot3(&r, &r);
        let g = kernel.grad_first(x, &GROUND_POINT);
        for i in 0..3 {
            k[(0, idx(i, p))] = g[i];
            k[(idx(i, p), 0)] = g[i];
            if let Some(dk) = dk.as_mut() {
                let v = g[i] * (1.0 - t2 * r2);
                dk[(0, idx(i, p))] = v;
                dk[(idx(i, p), 0)] = v;
            }
        }
    }
    for p in 0..n {
        for q in p..n {
            let r = crate::gp::sub3(&points[p], &points[q]);
            let r2 = crate::gp::dot3(&r, &r);
            let kv = kernel.eval_sq(r2);
            for i in 0..3 {
                for j in 0..3 {
                    let delta = if i == j { 2.0 * t2 } else { 0.0 };
                    let h = (delta - 4.0 * t2 * t2 * r[i] * r[j]) * kv;
                    k[(idx(i, p), idx(j, q))] = h;
                    k[(idx(j, q), idx(i, p))] = h;
                    if let Some(dk) = dk.as_mut() {
                        let d = (delta - 8.0 * t2 * t2 * r[i] * r[j]) * kv - t2 * r2 * h;
                        dk[(idx(i, p), idx(j, q))] = d;
                        dk[(idx(j, q), idx(i, p))] = d;
                    }
                }
            }
        }
    }
    (k, dk)
}

fn target_vector(samples: &[PotentialGradientSample]) -> DVector<f64> {
    let n = samples.len();
    let mut y = DVector::zeros(3 * n + 1);
    for (p, s) in samples.iter().enumerate() {
        for i in 0..3 {
            y[1 + i * n + p] = s.gradient[i];
        }
    }
    y
}

/// Log evidence of the augmented ground-plus-gradient system.
#[derive(Clone, Debug)]
pub struct PotentialEvidence {
    points: Vec<[f64; 3]>,
    targets: DVector<f64>,
    noise: f64,
}

impl PotentialEvidence {
    pub fn new(samples: &[PotentialGradientSample], noise: f64) -> Result<Self> {
        validate_samples(samples)?;
        Ok(Self { points: samples.iter().map(|s| s.invariants.to_array()).collect(), targets: target_vector(samples), noise })
    }

    /// `(L, ∂L/∂ln θ1, ∂L/∂ln θ2)`.
    pub fn evaluate(&self, log_params: [f64; 2]) -> Result<(f64, [f64; 2])> {
        let kernel = Kernel::from_log(log_params);
        let (k, dk2) = augmented_covariance(&kernel, &self.points, true);
        let dk2 = dk2.expect("requested");
        let factor = factorize_with_jitter(&k, self.noise)?;
        let alpha = factor.chol.solve(&self.targets);
        let value = evidence(&self.targets, &alpha, &factor);
        let inv = factor.chol.inverse();
        let (mut g1, mut g2) = (0.0, 0.0);
        let dim = k.nrows();
        for j in 0..dim {
            for i in 0..dim {
                let w = alpha[i] * alpha[j] - inv[(i, j)];
                g1 += w * k[(i, j)];
                g2 += w * dk2[(i, j)];
            }
        }
        Ok((value, [0.5 * g1, 0.5 * g2]))
    }
}

fn evidence(y: &DVector<f64>, alpha: &DVector<f64>, factor: &Factorization) -> f64 {
    -0.5 * y.dot(alpha) - 0.5 * factor.log_det() - 0.5 * y.len() as f64 * LN_2PI
}

fn validate_samples(samples: &[PotentialGradientSample]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("potential GP needs at least one gradient sample".into()));
    }
    for s in samples {
        check_stretch(&s.invariants)?;
        if !s.gradient.iter().chain(s.invariants.to_array().iter()).all(|v| v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite gradient sample {s:?}")));
        }
    }
    Ok(())
}

/// GP over the strain-energy density conditioned on gradients and grounding.
#[derive(Debug)]
pub struct PotentialGpModel {
    points: Vec<[f64; 3]>,
    kernel: Kernel,
    noise: f64,
    factor: Factorization,
    weights: DVector<f64>,
    report: Option<FitReport>,
}

impl PotentialGpModel {
    /// Fit with fixed hyperparameters.
    pub fn fit(samples: &[PotentialGradientSample], kernel: Kernel, noise: f64) -> Result<Self> {
        validate_samples(samples)?;
        let points: Vec<[f64; 3]> = samples.iter().map(|s| s.invariants.to_array()).collect();
        let (k, _) = augmented_covariance(&kernel, &points, false);
        let factor = factorize_with_jitter(&k, noise)?;
        let weights = factor.chol.solve(&target_vector(samples));
        Ok(Self { points, kernel, noise, factor, weights, report: None })
    }

    /// Optimize the kernel on the augmented evidence, then fit.
    pub fn fit_optimized<R: Rng + ?Sized>(
        samples: &[PotentialGradientSample],
        noise: f64,
        restarts: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let objective = PotentialEvidence::new(samples, noise)?;
        let report = maximize_evidence(|p| objective.evaluate(p).ok(), restarts, rng)?;
        let mut model = Self::fit(samples, report.kernel, noise)?;
        model.report = Some(report);
        Ok(model)
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    pub fn jitter(&self) -> f64 {
        self.factor.jitter
    }

    pub fn report(&self) -> Option<&FitReport> {
        self.report.as_ref()
    }

    pub fn training_points(&self) -> &[[f64; 3]] {
        &self.points
    }

    /// `K_g⁻¹ [0, ∂Φ/∂I1, ∂Φ/∂I2, ∂Φ/∂I3]ᵀ`.
    pub fn weights(&self) -> &DVector<f64> {
        &self.weights
    }

    pub fn condition_estimate(&self) -> f64 {
        self.factor.condition_estimate()
    }

    /// Log evidence of the augmented system at the fitted hyperparameters.
    pub fn log_evidence(&self) -> f64 {
        let y = self.factor.chol.l_dirty() * self.factor.chol.l_dirty().transpose() * &self.weights;
        evidence(&y, &self.weights, &self.factor)
    }

    fn split_weights(&self) -> (f64, impl Iterator<Item = ([f64; 3], [f64; 3])> + '_) {
        let n = self.points.len();
        let w = &self.weights;
        (w[0], self.points.iter().enumerate().map(move |(p, x)| (*x, [w[1 + p], w[1 + n + p], w[1 + 2 * n + p]])))
    }

    /// Posterior mean of `Φ` in MPa.
    pub fn predict_potential(&self, inv: &Invariants) -> f64 {
        let z = inv.to_array();
        let (w0, rest) = self.split_weights();
        let mut phi = self.kernel.eval(&z, &GROUND_POINT) * w0;
        for (x, wx) in rest {
            // Cov(Φ(z), ∂Φ(x)/∂x_j) = ∂K(z, x)/∂x_j = −∂K(z, x)/∂z_j.
            let g = self.kernel.grad_first(&z, &x);
            phi -= g[0] * wx[0] + g[1] * wx[1] + g[2] * wx[2];
        }
        phi
    }

    /// Posterior mean of `(∂Φ/∂I1, ∂Φ/∂I2, ∂Φ/∂I3)`.
    pub fn predict_gradient(&self, inv: &Invariants) -> PotentialGradientSample {
        let z = inv.to_array();
        let (w0, rest) = self.split_weights();
        let mut grad = self.kernel.grad_first(&z, &GROUND_POINT).map(|g| g * w0);
        for (x, wx) in rest {
            let h = self.kernel.grad_grad(&z, &x);
            for i in 0..3 {
                grad[i] += h[i][0] * wx[0] + h[i][1] * wx[1] + h[i][2] * wx[2];
            }
        }
        PotentialGradientSample { invariants: *inv, gradient: grad }
    }

    /// Stress from the predicted potential gradient through the tensor basis.
    pub fn predict_stress(&self, b: &SymTensor3) -> Result<SymTensor3> {
        let inv = Invariants::from_array(invariants(b)?.to_array().map(snap_feature));
        check_stretch(&inv)?;
        let c = gradient_to_coefficients(&self.predict_gradient(&inv))?;
        Ok(reconstruct(&c, b))
    }

    /// `|Φ̂(3, 3, 1)|`.
    pub fn grounding_residual(&self) -> f64 {
        self.predict_potential(&Invariants::from_array(GROUND_POINT)).abs()
    }
}

impl StressRegressor for PotentialGpModel {
    fn predict_stresses(&self, stretches: &[SymTensor3]) -> Result<Vec<SymTensor3>> {
        stretches.iter().map(|b| self.predict_stress(b)).collect()
    }

    fn condition_estimate(&self) -> f64 {
        self.factor.condition_estimate()
    }
}

/// Gradient samples implied by `(B, σ)` pairs.
pub fn gradient_samples(pairs: &[TensorPair]) -> Result<Vec<PotentialGradientSample>> {
    let data = featurize(pairs)?;
    (0..pairs.len())
        .map(|r| {
            let inv = Invariants::new(data.features[(r, 0)], data.features[(r, 1)], data.features[(r, 2)]);
            let c = BasisCoefficients::new(data.coefficients[(r, 0)], data.coefficients[(r, 1)], data.coefficients[(r, 2)]);
            coefficients_to_gradient(&c, &inv)
        })
        .collect()
}

/// Featurize stress pairs, convert to gradient samples and fit with
/// hyperparameters chosen on the augmented evidence.
pub fn fit_potential<R: Rng + ?Sized>(pairs: &[TensorPair], noise: f64, restarts: usize, rng: &mut R) -> Result<PotentialGpModel> {
    PotentialGpModel::fit_optimized(&gradient_samples(pairs)?, noise, restarts, rng)
}
