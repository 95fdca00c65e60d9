//! Tensor-basis GP: regress the coefficients of `σ = c1 I + c2 B + c3 B²` on
//! the invariants of `B`.
//!
//! The prediction path only ever sees rotation-invariant features, and the
//! basis `{I, B, B²}` rotates with `B`, so predictions are equivariant by
//! construction: `f(R B Rᵀ) = R f(B) Rᵀ` up to floating-point round-off.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::{FitReport, GpModel, Kernel};
use crate::tensor::{coefficients_from_pair, eigh, snap_feature, reconstruct, BasisCoefficients, Invariants, SolveStatus, SymTensor3, TensorPair};
use crate::StressRegressor;

/// Which rotation-invariant features feed the GP.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureMode {
    /// `(I1, I2, I3)`.
    #[default]
    Invariants,
    /// Eigenvalues of `B`, sorted descending.
    Eigenvalues,
}

impl FeatureMode {
    fn features(self, eigenvalues: [f64; 3]) -> [f64; 3] {
        match self {
            FeatureMode::Invariants => Invariants::from_eigenvalues(eigenvalues).to_array(),
            FeatureMode::Eigenvalues => eigenvalues,
        }
        .map(snap_feature)
    }
}

/// Rows of invariant features and basis coefficients, one per training pair.
#[derive(Clone, Debug)]
pub struct Featurized {
    pub features: DMatrix<f64>,
    pub coefficients: DMatrix<f64>,
    /// Rows whose σ is not a function of B alone (kept with least-squares coefficients).
    pub non_collinear: Vec<usize>,
    /// Rows with repeated eigenvalues of B.
    pub rank_deficient: Vec<usize>,
}

pub fn featurize(pairs: &[TensorPair]) -> Result<Featurized> {
    featurize_with(pairs, FeatureMode::Invariants)
}

pub fn featurize_with(pairs: &[TensorPair], mode: FeatureMode) -> Result<Featurized> {
    let n = pairs.len();
    let mut features = DMatrix::zeros(n, 3);
    let mut coefficients = DMatrix::zeros(n, 3);
    let mut non_collinear = Vec::new();
    let mut rank_deficient = Vec::new();
    for (row, pair) in pairs.iter().enumerate() {
        let (eig, sol) = coefficients_from_pair(&pair.b, &pair.sigma)?;
        match sol.status {
            SolveStatus::Exact => {}
            SolveStatus::RankDeficient => rank_deficient.push(row),
            SolveStatus::NonCollinear => {
                log::warn!("pair {row} is not collinear (residual {:e}); keeping least-squares coefficients", sol.residual);
                non_collinear.push(row);
            }
        }
        for (j, v) in mode.features(eig.values).into_iter().enumerate() {
            features[(row, j)] = v;
        }
        for (j, v) in sol.coefficients.to_array().into_iter().enumerate() {
            coefficients[(row, j)] = v;
        }
    }
    Ok(Featurized { features, coefficients, non_collinear, rank_deficient })
}

/// Where a model's training data came from.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub dataset_id: String,
    pub seed: u64,
}

#[derive(Debug)]
pub struct TbgpModel {
    gp: GpModel,
    mode: FeatureMode,
    report: Option<FitReport>,
    provenance: Provenance,
}

impl TbgpModel {
    /// Fit with fixed hyperparameters.
    pub fn fit(pairs: &[TensorPair], kernel: Kernel, noise: f64, mode: FeatureMode) -> Result<Self> {
        let data = featurize_with(pairs, mode)?;
        let gp = GpModel::fit(&data.features, &data.coefficients, kernel, noise)?;
        Ok(Self { gp, mode, report: None, provenance: Provenance::default() })
    }

    /// Wrap a GP already trained on features of the given mode, e.g. one
    /// reloaded from a [`crate::gp::SavedGp`].
    pub fn from_gp(gp: GpModel, mode: FeatureMode) -> Self {
        Self { gp, mode, report: None, provenance: Provenance::default() }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn gp(&self) -> &GpModel {
        &self.gp
    }

    pub fn feature_mode(&self) -> FeatureMode {
        self.mode
    }

    pub fn report(&self) -> Option<&FitReport> {
        self.report.as_ref()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn predict_coefficients(&self, b: &SymTensor3) -> Result<BasisCoefficients> {
        Ok(self.predict_coefficients_batch(std::slice::from_ref(b))?[0])
    }

    pub fn predict_coefficients_batch(&self, stretches: &[SymTensor3]) -> Result<Vec<BasisCoefficients>> {
        let mut features = DMatrix::zeros(stretches.len(), 3);
        for (row, b) in stretches.iter().enumerate() {
            for (j, v) in self.mode.features(eigh(b)?.values).into_iter().enumerate() {
                features[(row, j)] = v;
            }
        }
        let mean = self.gp.predict_mean(&features)?;
        Ok(mean.row_iter().map(|r| BasisCoefficients::new(r[0], r[1], r[2])).collect())
    }

    /// Predicted stress `c1(B) I + c2(B) B + c3(B) B²`.
    pub fn predict_stress(&self, b: &SymTensor3) -> Result<SymTensor3> {
        Ok(reconstruct(&self.predict_coefficients(b)?, b))
    }
}

impl StressRegressor for TbgpModel {
    fn predict_stresses(&self, stretches: &[SymTensor3]) -> Result<Vec<SymTensor3>> {
        let coeffs = self.predict_coefficients_batch(stretches)?;
        Ok(coeffs.iter().zip(stretches).map(|(c, b)| reconstruct(c, b)).collect())
    }

    fn condition_estimate(&self) -> f64 {
        self.gp.condition_estimate()
    }
}

/// Featurize, optimize the kernel by evidence maximization and fit.
pub fn fit_tbgp<R: Rng + ?Sized>(pairs: &[TensorPair], noise: f64, restarts: usize, rng: &mut R) -> Result<TbgpModel> {
    fit_tbgp_with(pairs, noise, restarts, FeatureMode::Invariants, rng)
}

pub fn fit_tbgp_with<R: Rng + ?Sized>(
    pairs: &[TensorPair],
    noise: f64,
    restarts: usize,
    mode: FeatureMode,
    rng: &mut R,
) -> Result<TbgpModel> {
    if pairs.len() < 2 {
        return Err(Error::InvalidInput(format!("tensor-basis GP needs at least 2 pairs, got {}", pairs.len())));
    }
    let data = featurize_with(pairs, mode)?;
    let (gp, report) = GpModel::fit_optimized(&data.features, &data.coefficients, noise, restarts, rng)?;
    Ok(TbgpModel { gp, mode, report: Some(report), provenance: Provenance::default() })
}
