//! Gaussian process regression of isotropic hyperelastic material response.
//!
//! Three regressors are provided, all built on one squared-exponential GP
//! engine ([`gp`]):
//!
//! - a component-wise GP mapping the six components of the Finger stretch
//!   tensor `B` to the six components of the Cauchy stress `σ`;
//! - the tensor-basis GP ([`tbgp`]), which learns the coefficients of
//!   `σ = c1 I + c2 B + c3 B²` as functions of the invariants of `B` and is
//!   therefore exactly equivariant under rotations;
//! - the potential GP ([`potential`]), which learns the strain-energy density
//!   `Φ(I1, I2, I3)` from its gradients plus one grounding value and derives
//!   the stress from it.
//!
//! Truth models ([`materials`]), samplers ([`datagen`]) and the experiment
//! harness ([`experiments`]) complete the crate.

pub mod component;
pub mod datagen;
pub mod error;
pub mod experiments;
pub mod gp;
pub mod io;
pub mod materials;
pub mod potential;
pub mod tbgp;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::{BasisCoefficients, EigenSystem, Invariants, Rotation3, SymTensor3, TensorPair};

/// Common interface of the three stress regressors.
pub trait StressRegressor {
    /// Predicted stress for each stretch tensor.
    fn predict_stresses(&self, stretches: &[SymTensor3]) -> Result<Vec<SymTensor3>>;

    /// Condition estimate of the factorized training covariance.
    fn condition_estimate(&self) -> f64;
}
