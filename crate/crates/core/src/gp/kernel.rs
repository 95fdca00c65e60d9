use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Squared-exponential covariance `θ1 exp(−θ2 ‖x − x'‖²)`.
///
/// `theta1` is the signal variance and `theta2` the inverse squared length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    pub theta1: f64,
    pub theta2: f64,
}

impl Kernel {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self> {
        if !(theta1 > 0.0 && theta2 > 0.0 && theta1.is_finite() && theta2.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "kernel hyperparameters must be positive and finite, got θ1 = {theta1}, θ2 = {theta2}"
            )));
        }
        Ok(Self { theta1, theta2 })
    }

    /// Kernel from natural-log hyperparameters.
    pub fn from_log(log_params: [f64; 2]) -> Self {
        Self { theta1: log_params[0].exp(), theta2: log_params[1].exp() }
    }

    pub fn log_params(&self) -> [f64; 2] {
        [self.theta1.ln(), self.theta2.ln()]
    }

    #[inline]
    pub fn eval_sq(&self, sq_dist: f64) -> f64 {
        self.theta1 * (-self.theta2 * sq_dist).exp()
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        self.eval_sq(sq_dist(x, y))
    }

    /// `∂k(x, x')/∂x_i` for a three-dimensional input.
    pub fn grad_first(&self, x: &[f64; 3], y: &[f64; 3]) -> [f64; 3] {
        let r = sub3(x, y);
        let k = self.eval_sq(dot3(&r, &r));
        r.map(|ri| -2.0 * self.theta2 * ri * k)
    }

    /// `∂²k(x, x')/∂x_i ∂x'_j` for a three-dimensional input.
    pub fn grad_grad(&self, x: &[f64; 3], y: &[f64; 3]) -> [[f64; 3]; 3] {
        let r = sub3(x, y);
        let k = self.eval_sq(dot3(&r, &r));
        let t2 = self.theta2;
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let delta = if i == j { 2.0 * t2 } else { 0.0 };
                (delta - 4.0 * t2 * t2 * r[i] * r[j]) * k
            })
        })
    }
}

#[inline]
pub fn sq_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

#[inline]
pub(crate) fn sub3(x: &[f64; 3], y: &[f64; 3]) -> [f64; 3] {
    [x[0] - y[0], x[1] - y[1], x[2] - y[2]]
}

#[inline]
pub(crate) fn dot3(x: &[f64; 3], y: &[f64; 3]) -> f64 {
    x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
}
