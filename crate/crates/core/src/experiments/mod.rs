//! Learning-curve and rotated-training-set experiments.
//!
//! Every random stream is derived from the master seed by [`derive_seed`]:
//!
//! | stream | parts |
//! |---|---|
//! | shared test set | `[1]` |
//! | training set for `(size, trial)` | `[2, size, trial]` |
//! | optimizer restarts | `[3, size, trial, regressor]` |
//! | rotations of the training set | `[4, size, trial]` |
//!
//! so a trial's outcome does not depend on which other trials ran, and a
//! resumed run writes exactly the rows a fresh run would have.

pub mod config;
pub mod metrics;
pub mod results;

use std::fs::{self, File, OpenOptions};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use config::{ExperimentConfig, RegressorKind, SCHEMA_VERSION};
pub use metrics::{evaluate_metrics, SeriesMetrics, StressMetrics};
pub use results::{ResultRow, SummaryRow, TrialResult, TrialStatus};

use crate::component::ComponentGp;
use crate::datagen::{label, make_dataset, sample_input, ProblemKind};
use crate::error::{Error, Result};
use crate::materials::mr_energy;
use crate::potential::{fit_potential, PotentialGpModel};
use crate::tbgp::fit_tbgp;
use crate::tensor::{invariants, sample_rotation, Invariants, SymTensor3, TensorPair};
use crate::StressRegressor;

pub const RESULTS_FILE: &str = "results.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const CONFIG_RECORD_FILE: &str = "config.json";

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for a stream identified by `parts`.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix64(master), |h, &p| splitmix64(h ^ splitmix64(p)))
}

fn regressor_index(r: RegressorKind) -> u64 {
    RegressorKind::ALL.iter().position(|&k| k == r).expect("listed") as u64
}

/// Held-out points shared by all regressors and trials.
#[derive(Clone, Debug)]
pub struct TestSet {
    pub stretches: Vec<SymTensor3>,
    pub stresses: Vec<SymTensor3>,
    pub invariants: Vec<Invariants>,
    /// Truth potential; hyperelastic problems only.
    pub potential: Option<Vec<f64>>,
}

impl TestSet {
    pub fn generate(cfg: &ExperimentConfig) -> Result<Self> {
        let spec = cfg.dataset_spec(cfg.test_size);
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[1]));
        let mut stretches = Vec::with_capacity(cfg.test_size);
        let mut stresses = Vec::with_capacity(cfg.test_size);
        for _ in 0..cfg.test_size {
            let b = sample_input(&spec, &mut rng);
            stresses.push(label(&spec, &b)?);
            stretches.push(b);
        }
        let invariants = stretches.iter().map(invariants).collect::<Result<Vec<_>>>()?;
        let potential = match cfg.kind {
            ProblemKind::MooneyRivlin => Some(invariants.iter().map(|i| mr_energy(&cfg.params, i)).collect::<Result<_>>()?),
            ProblemKind::MatrixExp => None,
        };
        Ok(Self { stretches, stresses, invariants, potential })
    }
}

enum Fitted {
    Component(ComponentGp),
    Tbgp(crate::tbgp::TbgpModel),
    Potential(PotentialGpModel),
}

impl Fitted {
    fn regressor(&self) -> &dyn StressRegressor {
        match self {
            Fitted::Component(m) => m,
            Fitted::Tbgp(m) => m,
            Fitted::Potential(m) => m,
        }
    }
}

fn status_of(e: &Error) -> TrialStatus {
    match e {
        Error::IllConditioned { .. } => TrialStatus::IllConditioned,
        Error::OptimizationFailed { .. } => TrialStatus::OptimizationFailed,
        Error::InvalidStretch { .. } => TrialStatus::InvalidStretch,
        _ => TrialStatus::Error,
    }
}

/// A configured experiment with its shared test set.
#[derive(Debug)]
pub struct Experiment {
    cfg: ExperimentConfig,
    test: TestSet,
}

impl Experiment {
    pub fn new(cfg: ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let test = TestSet::generate(&cfg)?;
        Ok(Self { cfg, test })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.cfg
    }

    pub fn test_set(&self) -> &TestSet {
        &self.test
    }

    pub fn training_seed(&self, size: usize, trial: usize) -> u64 {
        derive_seed(self.cfg.seed, &[2, size as u64, trial as u64])
    }

    pub fn training_set(&self, size: usize, trial: usize) -> Result<Vec<TensorPair>> {
        make_dataset(&self.cfg.dataset_spec(size), &mut ChaCha8Rng::seed_from_u64(self.training_seed(size, trial)))
    }

    /// Fit `regressor` on `train` and evaluate it. Fit and prediction errors
    /// become a failed [`TrialResult`], never an `Err`.
    pub fn run_trial(&self, regressor: RegressorKind, size: usize, trial: usize, train: &[TensorPair]) -> TrialResult {
        let start = Instant::now();
        let mut result = TrialResult {
            regressor,
            size,
            trial,
            seed: self.training_seed(size, trial),
            status: TrialStatus::Ok,
            message: String::new(),
            metrics: None,
            rotated_rmse: None,
            potential: None,
            grounding_residual: None,
            cond_estimate: None,
            wall_ms: None,
        };
        if let Err(e) = self.evaluate_into(&mut result, train) {
            log::warn!("{regressor} size {size} trial {trial}: {e}");
            result.status = status_of(&e);
            result.message = e.to_string();
            result.metrics = None;
            result.rotated_rmse = None;
            result.potential = None;
        }
        if self.cfg.record_timing {
            result.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
        }
        result
    }

    fn evaluate_into(&self, result: &mut TrialResult, train: &[TensorPair]) -> Result<()> {
        let (size, trial) = (result.size, result.trial);
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
            self.cfg.seed,
            &[3, size as u64, trial as u64, regressor_index(result.regressor)],
        ));
        let (noise, restarts) = (self.cfg.noise, self.cfg.restarts);
        let fitted = match result.regressor {
            RegressorKind::Gp => Fitted::Component(ComponentGp::fit_optimized(train, noise, restarts, &mut rng)?),
            RegressorKind::Tbgp => Fitted::Tbgp(fit_tbgp(train, noise, restarts, &mut rng)?),
            RegressorKind::PotentialTbgp => Fitted::Potential(fit_potential(train, noise, restarts, &mut rng)?),
        };
        let model = fitted.regressor();
        result.cond_estimate = Some(model.condition_estimate());
        let pred = model.predict_stresses(&self.test.stretches)?;
        result.metrics = Some(evaluate_metrics(&self.test.stresses, &pred)?);

        if self.cfg.rotation_test {
            let mut rot_rng = ChaCha8Rng::seed_from_u64(derive_seed(self.cfg.seed, &[4, size as u64, trial as u64]));
            let rotated: Vec<TensorPair> = train.iter().map(|p| p.rotated(&sample_rotation(&mut rot_rng))).collect();
            let stretches: Vec<SymTensor3> = rotated.iter().map(|p| p.b).collect();
            let truth: Vec<SymTensor3> = rotated.iter().map(|p| p.sigma).collect();
            result.rotated_rmse = Some(metrics::component_rmse(&truth, &model.predict_stresses(&stretches)?));
        }
        if let (Fitted::Potential(m), Some(truth)) = (&fitted, &self.test.potential) {
            let pred: Vec<f64> = self.test.invariants.iter().map(|i| m.predict_potential(i)).collect();
            result.potential = Some(metrics::series_metrics(truth, &pred)?);
            result.grounding_residual = Some(m.grounding_residual());
        }
        Ok(())
    }

    /// All trials in memory, in the same order the file runner writes them.
    pub fn run_all(&self) -> Result<Vec<TrialResult>> {
        let mut out = Vec::new();
        for &size in &self.cfg.sizes {
            for trial in 0..self.cfg.trials {
                let train = self.training_set(size, trial)?;
                for &r in &self.cfg.regressors {
                    out.push(self.run_trial(r, size, trial, &train));
                }
            }
        }
        Ok(out)
    }
}

/// What a file-backed run did.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    /// Trials executed by this invocation.
    pub executed: Vec<TrialResult>,
    /// Trials found complete in an earlier partial run and skipped.
    pub resumed: usize,
    /// Failed trials across the whole results file.
    pub failures: usize,
    pub results_path: PathBuf,
    pub summary_path: PathBuf,
}

/// Load complete trials from an earlier run, dropping any trailing partial trial.
fn load_completed(dir: &Path, cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let results = dir.join(RESULTS_FILE);
    let record = dir.join(CONFIG_RECORD_FILE);
    if !results.exists() {
        return Ok(Vec::new());
    }
    let previous: Option<ExperimentConfig> = File::open(&record).ok().and_then(|f| serde_json::from_reader(f).ok());
    if previous.as_ref() != Some(cfg) {
        return Err(Error::Config {
            path: record,
            message: format!("{} holds results from a different configuration; use a fresh output_dir", dir.display()),
        });
    }
    let rows = results::read_rows(File::open(&results)?)?;
    let complete: std::collections::HashSet<_> = rows.iter().filter(|r| r.is_pooled()).map(ResultRow::key).collect();
    Ok(rows.into_iter().filter(|r| complete.contains(&r.key())).collect())
}

/// Run every `(size, trial, regressor)` in the config, streaming rows to
/// `results.csv` and finishing with `summary.csv`. Trials already present in
/// the output directory are skipped.
pub fn run_learning_curve(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir)?;
    let kept = load_completed(dir, cfg)?;
    let done: std::collections::HashSet<_> = kept.iter().map(ResultRow::key).collect();
    serde_json::to_writer_pretty(BufWriter::new(File::create(dir.join(CONFIG_RECORD_FILE))?), cfg)?;

    let results_path = dir.join(RESULTS_FILE);
    let file = OpenOptions::new().write(true).create(true).truncate(true).open(&results_path)?;
    let mut writer = csv::Writer::from_writer(BufWriter::new(file));
    results::write_rows(&mut writer, &kept)?;

    let experiment = Experiment::new(cfg.clone())?;
    let mut executed = Vec::new();
    for &size in &cfg.sizes {
        for trial in 0..cfg.trials {
            if cfg.regressors.iter().all(|r| done.contains(&(*r, size, trial))) {
                continue;
            }
            let train = experiment.training_set(size, trial)?;
            for &r in &cfg.regressors {
                if done.contains(&(r, size, trial)) {
                    continue;
                }
                let t = experiment.run_trial(r, size, trial, &train);
                log::info!(
                    "{r} size {size} trial {trial}: {:?} rmse {:?} fvu {:?}",
                    t.status,
                    t.pooled_rmse(),
                    t.pooled_fvu()
                );
                results::write_rows(&mut writer, &t.rows())?;
                executed.push(t);
            }
        }
    }
    drop(writer);

    let all = results::read_rows(File::open(&results_path)?)?;
    let failures = all.iter().filter(|r| r.is_pooled() && !r.status.is_ok()).count();
    let summary_path = dir.join(SUMMARY_FILE);
    results::write_summary(BufWriter::new(File::create(&summary_path)?), &results::summarize(&all))?;
    Ok(RunOutcome { executed, resumed: done.len(), failures, results_path, summary_path })
}

/// Learning curve with the rotated-training-set evaluation switched on.
pub fn run_rotation_test(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    run_learning_curve(&ExperimentConfig { rotation_test: true, ..cfg.clone() })
}

/// Summary of an existing results file.
pub fn report(results: impl AsRef<Path>) -> Result<Vec<SummaryRow>> {
    Ok(results::summarize(&results::read_rows(File::open(results)?)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::StretchRange;
    use crate::tensor::rotate;

    fn small(kind: ProblemKind, dir: &Path) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(kind, vec![4, 6], 3, dir);
        c.trials = 2;
        c.restarts = 2;
        c.test_size = 50;
        c.range = StretchRange::new(1.0, 1.5).unwrap();
        c
    }

    #[test]
    fn seeds_are_distinct_and_stable() {
        let a = derive_seed(1, &[2, 4, 0]);
        assert_eq!(a, derive_seed(1, &[2, 4, 0]));
        assert_ne!(a, derive_seed(1, &[2, 4, 1]));
        assert_ne!(a, derive_seed(1, &[2, 0, 4]));
        assert_ne!(a, derive_seed(2, &[2, 4, 0]));
    }

    #[test]
    fn smoke_run_has_expected_rows() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small(ProblemKind::MatrixExp, dir.path());
        let out = run_learning_curve(&cfg).unwrap();
        assert_eq!(out.executed.len(), 2 * 2 * 2);
        assert_eq!(out.failures, 0);
        let rows = results::read_rows(File::open(&out.results_path).unwrap()).unwrap();
        assert_eq!(rows.len(), 8 * 7);
        assert!(rows.iter().all(|r| r.rmse.unwrap().is_finite()));
        let summary = report(&out.results_path).unwrap();
        assert_eq!(summary.len(), 4);
    }

    #[test]
    fn resume_reproduces_fresh_run() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small(ProblemKind::MooneyRivlin, dir.path());
        run_learning_curve(&cfg).unwrap();
        let full = fs::read(dir.path().join(RESULTS_FILE)).unwrap();

        // Keep the header, the first trial group and half of the next one.
        let text = String::from_utf8(full.clone()).unwrap();
        let partial: Vec<&str> = text.lines().take(1 + 7 + 3).collect();
        fs::write(dir.path().join(RESULTS_FILE), partial.join("\n") + "\n").unwrap();
        let out = run_learning_curve(&cfg).unwrap();
        assert_eq!(out.resumed, 1);
        assert_eq!(fs::read(dir.path().join(RESULTS_FILE)).unwrap(), full);
    }

    #[test]
    fn resume_refuses_other_config() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small(ProblemKind::MatrixExp, dir.path());
        run_learning_curve(&cfg).unwrap();
        let other = ExperimentConfig { seed: 99, ..cfg };
        assert!(matches!(run_learning_curve(&other), Err(Error::Config { .. })));
    }

    #[test]
    fn identity_rotation_matches_training_error() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small(ProblemKind::MatrixExp, dir.path());
        let e = Experiment::new(cfg).unwrap();
        let train = e.training_set(6, 0).unwrap();
        let t = e.run_trial(RegressorKind::Tbgp, 6, 0, &train);
        assert!(t.status.is_ok());
        // Without rotation the training-set error is the interpolation error,
        // and rotated predictions must agree with it.
        let m = fit_tbgp(&train, 1e-10, 2, &mut ChaCha8Rng::seed_from_u64(derive_seed(3, &[3, 6, 0, 1]))).unwrap();
        let b: Vec<SymTensor3> = train.iter().map(|p| p.b).collect();
        let s: Vec<SymTensor3> = train.iter().map(|p| p.sigma).collect();
        let plain = metrics::component_rmse(&s, &m.predict_stresses(&b).unwrap()).1;
        let id = crate::tensor::Rotation3::identity();
        let rb: Vec<SymTensor3> = b.iter().map(|x| rotate(x, &id)).collect();
        let rotated = metrics::component_rmse(&s, &m.predict_stresses(&rb).unwrap()).1;
        assert_eq!(plain, rotated);
    }

    #[test]
    fn potential_trials_report_potential_metrics() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small(ProblemKind::MooneyRivlin, dir.path());
        cfg.sizes = vec![8];
        cfg.trials = 1;
        let trials = Experiment::new(cfg).unwrap().run_all().unwrap();
        let pot = trials.iter().find(|t| t.regressor == RegressorKind::PotentialTbgp).unwrap();
        assert!(pot.status.is_ok(), "{}", pot.message);
        assert!(pot.potential.unwrap().rmse.is_finite());
        assert!(trials.iter().filter(|t| t.regressor != RegressorKind::PotentialTbgp).all(|t| t.potential.is_none()));
    }

    #[test]
    fn failures_are_recorded_not_fatal() {
        // Duplicate inputs with conflicting labels cannot be interpolated and
        // push the evidence optimizer into the jitter ladder; either way the
        // trial must come back as a row.
        let dir = tempfile::tempdir().unwrap();
        let e = Experiment::new(small(ProblemKind::MatrixExp, dir.path())).unwrap();
        let b = SymTensor3::identity();
        let bad = vec![TensorPair::new(b, b), TensorPair::new(b, SymTensor3::identity() * f64::NAN)];
        let t = e.run_trial(RegressorKind::Gp, 2, 0, &bad);
        assert_eq!(t.status, TrialStatus::Error);
        assert_eq!(t.rows().len(), 1);
    }
}
