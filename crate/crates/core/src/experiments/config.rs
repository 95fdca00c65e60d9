//! Experiment configuration (TOML).
//!
//! ```toml
//! schema_version = 1
//!
//! [problem]
//! kind = "mooney_rivlin"          # or "matrix_exp"
//! stretch_range = [1.0, 1.5]      # bounds on eigenvalues of B; mooney_rivlin only
//! sampling = "uniform_stretch"    # or "uniform_squared_stretch"
//! mooney_rivlin = { c1 = 0.162, c2 = 0.0059, c3 = 10.0 }
//!
//! [run]
//! sizes = [25, 50, 100, 200]
//! trials = 100
//! restarts = 20
//! test_size = 10000
//! seed = 1
//! noise = 1e-10
//! regressors = ["gp", "tbgp", "potential_tbgp"]
//! rotation_test = false
//! record_timing = false
//! output_dir = "results/mr"
//! ```
//!
//! Everything under `[problem]` except `kind`, and everything under `[run]`
//! except `sizes`, `seed` and `output_dir`, has the default shown.

use std::fmt;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::datagen::{DatasetSpec, ProblemKind, SamplingMode, StretchRange};
use crate::error::{Error, Result};
use crate::gp::DEFAULT_NOISE;
use crate::materials::MooneyRivlinParams;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegressorKind {
    /// Component-wise GP on the six entries of `B`.
    Gp,
    Tbgp,
    PotentialTbgp,
}

impl RegressorKind {
    pub const ALL: [RegressorKind; 3] = [RegressorKind::Gp, RegressorKind::Tbgp, RegressorKind::PotentialTbgp];

    pub fn as_str(self) -> &'static str {
        match self {
            RegressorKind::Gp => "gp",
            RegressorKind::Tbgp => "tbgp",
            RegressorKind::PotentialTbgp => "potential_tbgp",
        }
    }
}

impl fmt::Display for RegressorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RegressorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown regressor {s:?}")))
    }
}

/// Validated experiment configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ProblemKind,
    pub range: StretchRange,
    pub sampling: SamplingMode,
    pub params: MooneyRivlinParams,
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub restarts: usize,
    pub test_size: usize,
    pub seed: u64,
    pub noise: f64,
    pub regressors: Vec<RegressorKind>,
    pub rotation_test: bool,
    pub record_timing: bool,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    /// Defaults for everything but the problem kind, sizes, seed and output directory.
    pub fn new(kind: ProblemKind, sizes: Vec<usize>, seed: u64, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            kind,
            range: default_range(),
            sampling: SamplingMode::default(),
            params: MooneyRivlinParams::default(),
            sizes,
            trials: 100,
            restarts: 20,
            test_size: 10_000,
            seed,
            noise: DEFAULT_NOISE,
            regressors: default_regressors(kind),
            rotation_test: false,
            record_timing: false,
            output_dir: output_dir.into(),
        }
    }

    pub fn dataset_spec(&self, n: usize) -> DatasetSpec {
        DatasetSpec { kind: self.kind, n, range: self.range, sampling: self.sampling, params: self.params }
    }

    /// Checks that do not depend on where the values came from in a file.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return bad(format!("sizes must be non-empty and all >= 1, got {:?}", self.sizes));
        }
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if self.restarts == 0 {
            return bad("restarts must be >= 1".into());
        }
        if self.test_size < 2 {
            return bad("test_size must be >= 2".into());
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return bad(format!("noise must be finite and >= 0, got {}", self.noise));
        }
        if self.regressors.is_empty() {
            return bad("at least one regressor is required".into());
        }
        if self.regressors.contains(&RegressorKind::PotentialTbgp) && self.kind != ProblemKind::MooneyRivlin {
            return bad("potential_tbgp needs a hyperelastic problem (kind = \"mooney_rivlin\")".into());
        }
        StretchRange::new(self.range.lower_sq, self.range.upper_sq)?;
        self.params.validate()
    }

    pub fn from_toml_str(text: &str, path: &Path) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let at = e.span().map(|s| location(text, s.start)).unwrap_or_default();
            config_error(path, format!("{at}{}", e.message().trim_end()))
        })?;
        raw.resolve(text, path)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| config_error(path, e.to_string()))?;
        Self::from_toml_str(&text, path)
    }
}

fn default_range() -> StretchRange {
    StretchRange { lower_sq: 1.0, upper_sq: 1.5 }
}

fn default_regressors(kind: ProblemKind) -> Vec<RegressorKind> {
    match kind {
        ProblemKind::MooneyRivlin => RegressorKind::ALL.to_vec(),
        ProblemKind::MatrixExp => vec![RegressorKind::Gp, RegressorKind::Tbgp],
    }
}

fn config_error(path: &Path, message: String) -> Error {
    Error::Config { path: path.to_path_buf(), message }
}

/// `"line L, column C: "` for a byte offset.
fn location(text: &str, offset: usize) -> String {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    format!("line {line}, column {column}: ")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema_version: Spanned<u32>,
    problem: RawProblem,
    run: RawRun,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    kind: Spanned<String>,
    stretch_range: Option<Spanned<[f64; 2]>>,
    #[serde(default)]
    sampling: SamplingMode,
    mooney_rivlin: Option<Spanned<MooneyRivlinParams>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    sizes: Spanned<Vec<i64>>,
    trials: Option<Spanned<i64>>,
    restarts: Option<Spanned<i64>>,
    test_size: Option<Spanned<i64>>,
    seed: u64,
    noise: Option<Spanned<f64>>,
    regressors: Option<Spanned<Vec<String>>>,
    #[serde(default)]
    rotation_test: bool,
    #[serde(default)]
    record_timing: bool,
    output_dir: PathBuf,
}

impl RawConfig {
    fn resolve(self, text: &str, path: &Path) -> Result<ExperimentConfig> {
        let fail = |span: Range<usize>, message: String| config_error(path, format!("{}{message}", location(text, span.start)));

        if *self.schema_version.get_ref() != SCHEMA_VERSION {
            return Err(fail(
                self.schema_version.span(),
                format!("unsupported schema_version {} (expected {SCHEMA_VERSION})", self.schema_version.get_ref()),
            ));
        }
        let kind: ProblemKind = self.problem.kind.get_ref().parse().map_err(|e: Error| fail(self.problem.kind.span(), e.to_string()))?;
        let mut cfg = ExperimentConfig::new(kind, Vec::new(), self.run.seed, self.run.output_dir);
        cfg.sampling = self.problem.sampling;
        cfg.rotation_test = self.run.rotation_test;
        cfg.record_timing = self.run.record_timing;

        if let Some(r) = &self.problem.stretch_range {
            let [l, u] = *r.get_ref();
            cfg.range = StretchRange::new(l, u).map_err(|e| fail(r.span(), e.to_string()))?;
        }
        if let Some(p) = &self.problem.mooney_rivlin {
            p.get_ref().validate().map_err(|e| fail(p.span(), e.to_string()))?;
            cfg.params = *p.get_ref();
        }

        let positive = |v: &Spanned<i64>, name: &str, min: i64| -> Result<usize> {
            if *v.get_ref() < min {
                return Err(fail(v.span(), format!("{name} must be >= {min}, got {}", v.get_ref())));
            }
            Ok(*v.get_ref() as usize)
        };
        if self.run.sizes.get_ref().is_empty() {
            return Err(fail(self.run.sizes.span(), "sizes must not be empty".into()));
        }
        if let Some(s) = self.run.sizes.get_ref().iter().find(|&&s| s < 1) {
            return Err(fail(self.run.sizes.span(), format!("every size must be >= 1, got {s}")));
        }
        cfg.sizes = self.run.sizes.get_ref().iter().map(|&s| s as usize).collect();
        if let Some(v) = &self.run.trials {
            cfg.trials = positive(v, "trials", 1)?;
        }
        if let Some(v) = &self.run.restarts {
            cfg.restarts = positive(v, "restarts", 1)?;
        }
        if let Some(v) = &self.run.test_size {
            cfg.test_size = positive(v, "test_size", 2)?;
        }
        if let Some(v) = &self.run.noise {
            if !(*v.get_ref() >= 0.0 && v.get_ref().is_finite()) {
                return Err(fail(v.span(), format!("noise must be finite and >= 0, got {}", v.get_ref())));
            }
            cfg.noise = *v.get_ref();
        }
        if let Some(list) = &self.run.regressors {
            let parsed: Result<Vec<RegressorKind>> = list.get_ref().iter().map(|s| s.parse()).collect();
            let mut parsed = parsed.map_err(|e| fail(list.span(), e.to_string()))?;
            parsed.dedup();
            if parsed.is_empty() {
                return Err(fail(list.span(), "at least one regressor is required".into()));
            }
            if parsed.contains(&RegressorKind::PotentialTbgp) && kind != ProblemKind::MooneyRivlin {
                return Err(fail(list.span(), "potential_tbgp needs kind = \"mooney_rivlin\"".into()));
            }
            cfg.regressors = parsed;
        }
        cfg.validate().map_err(|e| config_error(path, e.to_string()))?;
        Ok(cfg)
    }
}
