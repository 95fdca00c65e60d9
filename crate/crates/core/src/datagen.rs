//! Random deformation states and labeled datasets.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix3;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::materials::{matrix_exp, mr_stress, MooneyRivlinParams};
use crate::tensor::{sample_rotation, SymTensor3, TensorPair};

/// Bounds on the eigenvalues of `B`, i.e. on the squared principal stretches.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StretchRange {
    pub lower_sq: f64,
    pub upper_sq: f64,
}

impl StretchRange {
    /// `lower_sq == upper_sq` is allowed and pins every stretch.
    pub fn new(lower_sq: f64, upper_sq: f64) -> Result<Self> {
        if !(lower_sq > 0.0 && lower_sq <= upper_sq && upper_sq.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "stretch range needs 0 < l² <= u² < inf, got [{lower_sq}, {upper_sq}]"
            )));
        }
        Ok(Self { lower_sq, upper_sq })
    }

    pub fn stretch_bounds(&self) -> (f64, f64) {
        (self.lower_sq.sqrt(), self.upper_sq.sqrt())
    }
}

impl fmt::Display for StretchRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower_sq, self.upper_sq)
    }
}

/// How the principal stretches are drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    /// `V_ii ~ U[l, u]`.
    #[default]
    UniformStretch,
    /// `V_ii² ~ U[l², u²]`.
    UniformSquaredStretch,
}

/// `F = R V` and `B = F Fᵀ = R V² Rᵀ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Deformation {
    pub f: Matrix3<f64>,
    pub b: SymTensor3,
}

pub fn sample_deformation<R: Rng + ?Sized>(range: &StretchRange, rng: &mut R) -> Deformation {
    sample_deformation_with(range, SamplingMode::UniformStretch, rng)
}

pub fn sample_deformation_with<R: Rng + ?Sized>(range: &StretchRange, mode: SamplingMode, rng: &mut R) -> Deformation {
    let (l, u) = range.stretch_bounds();
    let mut stretch = || -> f64 {
        match mode {
            SamplingMode::UniformStretch => l + (u - l) * rng.random::<f64>(),
            SamplingMode::UniformSquaredStretch => {
                (range.lower_sq + (range.upper_sq - range.lower_sq) * rng.random::<f64>()).sqrt()
            }
        }
    };
    let v = [stretch(), stretch(), stretch()];
    let r = sample_rotation(rng);
    let f = r.matrix() * Matrix3::from_diagonal(&v.into());
    let b = SymTensor3::from_matrix_sym(&(r.matrix() * Matrix3::from_diagonal(&v.map(|s| s * s).into()) * r.matrix().transpose()));
    Deformation { f, b }
}

/// Symmetric part of a matrix with independent `U[0, 1]` entries.
pub fn sample_symmetric_matrix<R: Rng + ?Sized>(rng: &mut R) -> SymTensor3 {
    let m = Matrix3::<f64>::from_fn(|_, _| rng.random());
    SymTensor3::from_matrix_sym(&((m + m.transpose()) * 0.5))
}

/// Which truth model labels the data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    /// `σ = mr_stress(B)` with `B` from [`sample_deformation`].
    MooneyRivlin,
    /// `σ = exp(B)` with `B` from [`sample_symmetric_matrix`].
    MatrixExp,
}

impl ProblemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::MooneyRivlin => "mooney_rivlin",
            ProblemKind::MatrixExp => "matrix_exp",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mooney_rivlin" => Ok(ProblemKind::MooneyRivlin),
            "matrix_exp" => Ok(ProblemKind::MatrixExp),
            other => Err(Error::InvalidInput(format!("unknown problem kind {other:?} (expected mooney_rivlin or matrix_exp)"))),
        }
    }
}

/// Everything needed to regenerate a dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub kind: ProblemKind,
    pub n: usize,
    /// Ignored for [`ProblemKind::MatrixExp`].
    pub range: StretchRange,
    #[serde(default)]
    pub sampling: SamplingMode,
    pub params: MooneyRivlinParams,
}

impl DatasetSpec {
    pub fn new(kind: ProblemKind, n: usize, range: StretchRange) -> Self {
        Self { kind, n, range, sampling: SamplingMode::default(), params: MooneyRivlinParams::default() }
    }
}

/// Sample `B` for `kind` without labeling it.
pub fn sample_input<R: Rng + ?Sized>(spec: &DatasetSpec, rng: &mut R) -> SymTensor3 {
    match spec.kind {
        ProblemKind::MooneyRivlin => sample_deformation_with(&spec.range, spec.sampling, rng).b,
        ProblemKind::MatrixExp => sample_symmetric_matrix(rng),
    }
}

/// Truth label for a single input.
pub fn label(spec: &DatasetSpec, b: &SymTensor3) -> Result<SymTensor3> {
    match spec.kind {
        ProblemKind::MooneyRivlin => mr_stress(&spec.params, b),
        ProblemKind::MatrixExp => matrix_exp(b),
    }
}

pub fn make_dataset<R: Rng + ?Sized>(spec: &DatasetSpec, rng: &mut R) -> Result<Vec<TensorPair>> {
    if spec.n == 0 {
        return Err(Error::InvalidInput("dataset size must be at least 1".into()));
    }
    spec.params.validate()?;
    (0..spec.n)
        .map(|_| {
            let b = sample_input(spec, rng);
            Ok(TensorPair::new(b, label(spec, &b)?))
        })
        .collect()
}
