//! Baseline regressor: one GP from the six components of `B` to the six
//! components of `σ`. It carries no rotational structure.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::Result;
use crate::gp::{FitReport, GpModel, Kernel};
use crate::tensor::{SymTensor3, TensorPair};
use crate::StressRegressor;

#[derive(Debug)]
pub struct ComponentGp {
    gp: GpModel,
    report: Option<FitReport>,
}

fn component_matrix<'a>(tensors: impl ExactSizeIterator<Item = &'a SymTensor3>) -> DMatrix<f64> {
    let n = tensors.len();
    let mut m = DMatrix::zeros(n, 6);
    for (row, t) in tensors.enumerate() {
        for (j, v) in t.components().into_iter().enumerate() {
            m[(row, j)] = v;
        }
    }
    m
}

impl ComponentGp {
    pub fn fit(pairs: &[TensorPair], kernel: Kernel, noise: f64) -> Result<Self> {
        let x = component_matrix(pairs.iter().map(|p| &p.b));
        let y = component_matrix(pairs.iter().map(|p| &p.sigma));
        Ok(Self { gp: GpModel::fit(&x, &y, kernel, noise)?, report: None })
    }

    pub fn fit_optimized<R: Rng + ?Sized>(pairs: &[TensorPair], noise: f64, restarts: usize, rng: &mut R) -> Result<Self> {
        let x = component_matrix(pairs.iter().map(|p| &p.b));
        let y = component_matrix(pairs.iter().map(|p| &p.sigma));
        let (gp, report) = GpModel::fit_optimized(&x, &y, noise, restarts, rng)?;
        Ok(Self { gp, report: Some(report) })
    }

    pub fn gp(&self) -> &GpModel {
        &self.gp
    }

    pub fn report(&self) -> Option<&FitReport> {
        self.report.as_ref()
    }

    pub fn predict_stress(&self, b: &SymTensor3) -> Result<SymTensor3> {
        Ok(self.predict_stresses(std::slice::from_ref(b))?[0])
    }
}

impl StressRegressor for ComponentGp {
    fn predict_stresses(&self, stretches: &[SymTensor3]) -> Result<Vec<SymTensor3>> {
        let mean = self.gp.predict_mean(&component_matrix(stretches.iter()))?;
        Ok(mean.row_iter().map(|r| SymTensor3::from_components(std::array::from_fn(|j| r[j]))).collect())
    }

    fn condition_estimate(&self) -> f64 {
        self.gp.condition_estimate()
    }
}
