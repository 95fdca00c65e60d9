//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`); exits non-zero if any
//! criterion fails. Run one criterion with `cargo test --test acceptance -- 8`.

use std::time::{Duration, Instant};

use hyperelastic_gp::datagen::{make_dataset, sample_deformation, sample_symmetric_matrix, DatasetSpec, ProblemKind, StretchRange};
use hyperelastic_gp::experiments::{run_learning_curve, Experiment, ExperimentConfig, RegressorKind, TrialResult};
use hyperelastic_gp::gp::{GpEvidence, GpModel, Kernel, DEFAULT_NOISE};
use hyperelastic_gp::materials::{mr_energy, mr_stress, MooneyRivlinParams};
use hyperelastic_gp::potential::{fit_potential, kernel_derivative_blocks, PotentialEvidence, PotentialGpModel};
use hyperelastic_gp::tbgp::fit_tbgp;
use hyperelastic_gp::tensor::{
    coefficients_from_pair, reconstruct, rotate, sample_rotation, solve_coefficients, BasisCoefficients, Invariants,
};
use hyperelastic_gp::{StressRegressor, SymTensor3, TensorPair};
use nalgebra::{DMatrix, DVector, Matrix3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn mr_range() -> StretchRange {
    StretchRange::new(1.0, 1.5).unwrap()
}

fn mr_pairs(n: usize, range: StretchRange, seed: u64) -> Vec<TensorPair> {
    make_dataset(&DatasetSpec::new(ProblemKind::MooneyRivlin, n, range), &mut rng(seed)).unwrap()
}

fn expm_pairs(n: usize, seed: u64) -> Vec<TensorPair> {
    make_dataset(&DatasetSpec::new(ProblemKind::MatrixExp, n, mr_range()), &mut rng(seed)).unwrap()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn medians_of(results: &[TrialResult], r: RegressorKind, size: usize, f: impl Fn(&TrialResult) -> Option<f64>) -> f64 {
    median(results.iter().filter(|t| t.regressor == r && t.size == size && t.status.is_ok()).filter_map(f).collect())
}

/// Richardson-extrapolated central difference of a scalar function of one step.
fn richardson(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    let d = |h: f64| (f(h) - f(-h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

/// Richardson-extrapolated mixed second difference.
fn richardson_mixed(f: impl Fn(f64, f64) -> f64, h: f64) -> f64 {
    let d = |h: f64| (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

fn rel(a: &SymTensor3, b: &SymTensor3) -> f64 {
    (*a - *b).norm() / b.norm()
}

// 1 ------------------------------------------------------------------------

fn rotational_equivariance() -> Outcome {
    let mut models: Vec<(Box<dyn StressRegressor>, ProblemKind)> = Vec::new();
    for (i, n) in [15, 40].into_iter().enumerate() {
        let seed = 10 + i as u64;
        models.push((Box::new(fit_tbgp(&mr_pairs(n, mr_range(), seed), DEFAULT_NOISE, 3, &mut rng(seed)).unwrap()), ProblemKind::MooneyRivlin));
        models.push((Box::new(fit_tbgp(&expm_pairs(n, seed), DEFAULT_NOISE, 3, &mut rng(seed)).unwrap()), ProblemKind::MatrixExp));
        models.push((Box::new(fit_potential(&mr_pairs(n, mr_range(), seed), DEFAULT_NOISE, 3, &mut rng(seed)).unwrap()), ProblemKind::MooneyRivlin));
    }
    let mut r = rng(1);
    let mut worst: f64 = 0.0;
    let triples = 1000;
    for k in 0..triples {
        let (model, kind) = &models[k % models.len()];
        let b = match kind {
            ProblemKind::MooneyRivlin => sample_deformation(&mr_range(), &mut r).b,
            ProblemKind::MatrixExp => sample_symmetric_matrix(&mut r),
        };
        let rot = sample_rotation(&mut r);
        let base = model.predict_stresses(&[b]).unwrap()[0];
        let turned = model.predict_stresses(&[rotate(&b, &rot)]).unwrap()[0];
        worst = worst.max(rel(&turned, &rotate(&base, &rot)));
    }
    outcome(worst <= 1e-10, format!("max relative discrepancy {worst:.2e} <= 1e-10 over {triples} triples, {} models", models.len()))
}

// 2 ------------------------------------------------------------------------

/// Minimal-norm solution of the consistent rows with distinct eigenvalues,
/// `c = Aᵀ (A Aᵀ)⁻¹ y`.
fn min_norm_oracle(lambda: [f64; 3], values: [f64; 3]) -> [f64; 3] {
    let mut rows: Vec<(f64, f64)> = Vec::new();
    for (l, v) in lambda.into_iter().zip(values) {
        if !rows.iter().any(|(m, _)| (m - l).abs() < 1e-12) {
            rows.push((l, v));
        }
    }
    let a = DMatrix::from_fn(rows.len(), 3, |i, j| rows[i].0.powi(j as i32));
    let y = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
    let aat = &a * a.transpose();
    let c = a.transpose() * aat.lu().solve(&y).unwrap();
    [c[0], c[1], c[2]]
}

fn coefficient_roundtrip() -> Outcome {
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    while cases < 10_000 {
        let l: [f64; 3] = std::array::from_fn(|_| r.random_range(0.5..2.0));
        let gap = (l[0] - l[1]).abs().min((l[1] - l[2]).abs()).min((l[0] - l[2]).abs());
        if gap < 0.05 {
            continue;
        }
        cases += 1;
        let c = BasisCoefficients::new(r.random_range(-3.0..3.0), r.random_range(-3.0..3.0), r.random_range(-3.0..3.0));
        let b = rotate(&SymTensor3::diag(l[0], l[1], l[2]), &sample_rotation(&mut r));
        let (_, sol) = coefficients_from_pair(&b, &reconstruct(&c, &b)).unwrap();
        let (got, want) = (sol.coefficients.to_array(), c.to_array());
        let err = got.iter().zip(want).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let norm = want.iter().map(|v| v * v).sum::<f64>().sqrt();
        worst = worst.max(err / norm);
    }
    let mut worst_degenerate: f64 = 0.0;
    for _ in 0..1000 {
        let a = r.random_range(0.5..2.0);
        let b = r.random_range(0.5..2.0);
        let c = BasisCoefficients::new(r.random_range(-3.0..3.0), r.random_range(-3.0..3.0), r.random_range(-3.0..3.0));
        for lambda in [[a, a, b], [b, a, a], [a, a, a]] {
            let values = lambda.map(|l| c.c1 + c.c2 * l + c.c3 * l * l);
            let got = solve_coefficients(lambda, values).coefficients.to_array();
            let want = min_norm_oracle(lambda, values);
            let scale = want.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
            let err = got.iter().zip(want).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            worst_degenerate = worst_degenerate.max(err / scale);
        }
    }
    outcome(
        worst <= 1e-8 && worst_degenerate <= 1e-8,
        format!("full rank: max relative error {worst:.2e} <= 1e-8 ({cases} cases); degenerate vs minimal-norm oracle {worst_degenerate:.2e} <= 1e-8"),
    )
}

// 3 ------------------------------------------------------------------------

fn kernel_blocks() -> Outcome {
    let mut r = rng(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let k = Kernel::new(r.random_range(0.5..2.0), r.random_range(0.1..2.0)).unwrap();
        let x: [f64; 3] = std::array::from_fn(|_| r.random_range(0.5..2.0));
        let y: [f64; 3] = std::array::from_fn(|_| r.random_range(0.5..2.0));
        let blocks = kernel_derivative_blocks(&k, &[x], &[y]);
        let shift = |v: [f64; 3], d: usize, s: f64| {
            let mut w = v;
            w[d] += s;
            w
        };
        // Natural magnitudes of first and second derivatives of the kernel.
        let (scale1, scale2) = (k.theta1 * k.theta2.sqrt(), k.theta1 * k.theta2);
        for i in 0..3 {
            let fd = richardson(|h| k.eval(&shift(x, i, h), &y), 1e-3);
            let an = blocks.value_gradient[i][(0, 0)];
            worst = worst.max((fd - an).abs() / an.abs().max(scale1));
            for j in 0..3 {
                let fd = richardson_mixed(|a, b| k.eval(&shift(x, i, a), &shift(y, j, b)), 1e-3);
                let an = blocks.gradient_gradient[i][j][(0, 0)];
                worst = worst.max((fd - an).abs() / an.abs().max(scale2));
            }
        }
    }
    outcome(worst < 1e-6, format!("max relative error {worst:.2e} < 1e-6 over 100 point pairs"))
}

// 4 ------------------------------------------------------------------------

fn stress_from_potential() -> Outcome {
    // σ = (2/√I3) B ∂Φ/∂B with Φ evaluated through invariants computed from
    // matrix formulas and differentiated numerically in the six components.
    let p = MooneyRivlinParams::default();
    let phi = |t: &SymTensor3| {
        let inv = Invariants::new(t.trace(), 0.5 * (t.trace().powi(2) - t.square().trace()), t.det());
        mr_energy(&p, &inv).unwrap()
    };
    let range = StretchRange::new(0.9, 2.0).unwrap();
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let b = sample_deformation(&range, &mut r).b;
        let d: [f64; 6] = std::array::from_fn(|k| {
            richardson(
                |h| {
                    let mut c = b.components();
                    c[k] += h;
                    phi(&SymTensor3::from_components(c))
                },
                1e-4,
            )
        });
        let dphi = Matrix3::new(d[0], d[3] / 2.0, d[4] / 2.0, d[3] / 2.0, d[1], d[5] / 2.0, d[4] / 2.0, d[5] / 2.0, d[2]);
        let oracle = SymTensor3::from_matrix_sym(&(b.to_matrix() * dphi * (2.0 / b.det().sqrt())));
        worst = worst.max(rel(&mr_stress(&p, &b).unwrap(), &oracle));
    }
    outcome(worst < 1e-5, format!("max relative error {worst:.2e} < 1e-5 at 100 stretches with eigenvalues in [0.9, 2.0]"))
}

// 5 ------------------------------------------------------------------------

fn gp_interpolation() -> Outcome {
    let mut notes = Vec::new();
    let mut worst: f64 = 0.0;
    let mut check = |name: &str, gp: &GpModel| {
        let pred = gp.predict_mean(gp.inputs()).unwrap();
        let err = (&pred - gp.targets()).amax() / gp.targets().amax();
        notes.push(format!("{name} {err:.1e} (cond {:.0e})", gp.condition_estimate()));
        worst = worst.max(err);
    };

    let mut r = rng(5);
    let x: DMatrix<f64> = DMatrix::from_fn(200, 3, |_, _| r.random_range(0.0..1.0));
    let y = DMatrix::from_fn(200, 2, |i, j| (3.0 * x[(i, 0)]).sin() + x[(i, 1)] * x[(i, 2)] + j as f64);
    check("N=200 3-D", &GpModel::fit(&x, &y, Kernel::new(1.0, 20.0).unwrap(), DEFAULT_NOISE).unwrap());

    let x1 = DMatrix::from_fn(30, 1, |i, _| i as f64 / 29.0 * 6.0);
    let (gp, _) = GpModel::fit_optimized(&x1, &x1.map(f64::sin), DEFAULT_NOISE, 5, &mut r).unwrap();
    check("N=30 1-D optimized", &gp);

    let train = expm_pairs(64, 6);
    let xb = DMatrix::from_fn(64, 6, |i, j| train[i].b.components()[j]);
    let yb = DMatrix::from_fn(64, 6, |i, j| train[i].sigma.components()[j]);
    check("N=64 exp(B) components", &GpModel::fit(&xb, &yb, Kernel::new(1.0, 2.0).unwrap(), DEFAULT_NOISE).unwrap());

    outcome(worst <= 1e-6, format!("max relative interpolation error {worst:.1e} <= 1e-6: {}", notes.join("; ")))
}

// 6 ------------------------------------------------------------------------

fn grounding(potential_trials: &[TrialResult]) -> Outcome {
    let mut residuals: Vec<f64> = potential_trials.iter().filter_map(|t| t.grounding_residual).collect();
    for (i, n) in [1usize, 5, 20, 60].into_iter().enumerate() {
        let m: PotentialGpModel = fit_potential(&mr_pairs(n, mr_range(), 60 + i as u64), DEFAULT_NOISE, 2, &mut rng(6)).unwrap();
        residuals.push(m.grounding_residual());
    }
    let wide = StretchRange::new(0.9, 2.0).unwrap();
    let m = fit_potential(&mr_pairs(100, wide, 66), DEFAULT_NOISE, 2, &mut rng(6)).unwrap();
    residuals.push(m.grounding_residual());
    let worst = residuals.iter().fold(0.0_f64, |a, &b| a.max(b));
    outcome(worst <= 1e-6, format!("max |phi(3,3,1)| {worst:.1e} MPa <= 1e-6 over {} fitted models", residuals.len()))
}

// 7 ------------------------------------------------------------------------

fn evidence_gradient() -> Outcome {
    let mut r = rng(7);
    let mut worst: f64 = 0.0;
    let mut check = |fd: f64, an: f64| worst = worst.max((fd - an).abs() / an.abs().max(1e-3));

    let x: DMatrix<f64> = DMatrix::from_fn(30, 3, |_, _| r.random_range(0.0..2.0));
    let y = DMatrix::from_fn(30, 2, |i, j| x[(i, 0)].sin() * (j + 1) as f64 + x[(i, 2)]);
    let gp = GpEvidence::new(&x, &y, 1e-6).unwrap();
    let samples = hyperelastic_gp::potential::gradient_samples(&mr_pairs(12, mr_range(), 70)).unwrap();
    let pot = PotentialEvidence::new(&samples, 1e-6).unwrap();
    for _ in 0..10 {
        let p = [r.random_range(-1.0..2.0), r.random_range(-2.0..1.0)];
        let g = gp.evaluate(p).unwrap().gradient;
        let (_, gpot) = pot.evaluate(p).unwrap();
        for d in 0..2 {
            let at = |h: f64| {
                let mut q = p;
                q[d] += h;
                q
            };
            check(richardson(|h| gp.evaluate(at(h)).unwrap().value, 1e-3), g[d]);
            check(richardson(|h| pot.evaluate(at(h)).unwrap().0, 1e-3), gpot[d]);
        }
    }
    outcome(worst < 1e-5, format!("max relative error {worst:.2e} < 1e-5 (stress GP and potential GP evidence, 10 points each)"))
}

// 8, 9 ---------------------------------------------------------------------

fn matrix_exponential_runs() -> (Vec<TrialResult>, Duration) {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::new(ProblemKind::MatrixExp, vec![64], 8, std::env::temp_dir());
    cfg.trials = 20;
    cfg.restarts = 20;
    cfg.test_size = 10_000;
    cfg.rotation_test = true;
    let results = Experiment::new(cfg).unwrap().run_all().unwrap();
    (results, start.elapsed())
}

fn matrix_exponential(results: &[TrialResult], took: Duration) -> Outcome {
    let gp = medians_of(results, RegressorKind::Gp, 64, TrialResult::pooled_rmse);
    let tb = medians_of(results, RegressorKind::Tbgp, 64, TrialResult::pooled_rmse);
    let ratio = tb / gp;
    outcome(
        ratio <= 0.1 && took <= Duration::from_secs(600),
        format!("median RMSE tbgp {tb:.2e} / gp {gp:.2e} = {ratio:.2e} <= 0.1 (N=64, 20 trials, 10000 test points, {:.0} s)", took.as_secs_f64()),
    )
}

fn rotated_training(results: &[TrialResult]) -> Outcome {
    let rot = |t: &TrialResult| t.rotated_rmse.map(|r| r.1);
    let gp = medians_of(results, RegressorKind::Gp, 64, rot);
    let tb = medians_of(results, RegressorKind::Tbgp, 64, rot);
    let ratio = tb / gp;
    outcome(ratio <= 1e-4, format!("median rotated-training RMSE tbgp {tb:.2e} / gp {gp:.2e} = {ratio:.2e} <= 1e-4 (N=64)"))
}

// 10 -----------------------------------------------------------------------

fn mooney_rivlin_tbgp() -> Outcome {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::new(ProblemKind::MooneyRivlin, vec![200], 10, std::env::temp_dir());
    cfg.range = mr_range();
    cfg.trials = 20;
    cfg.restarts = 5;
    cfg.test_size = 10_000;
    cfg.regressors = vec![RegressorKind::Gp, RegressorKind::Tbgp];
    let results = Experiment::new(cfg).unwrap().run_all().unwrap();
    let took = start.elapsed();
    let rmse = |r| medians_of(&results, r, 200, TrialResult::pooled_rmse);
    let fvu = |r| medians_of(&results, r, 200, TrialResult::pooled_fvu);
    let (rr, fr) = (rmse(RegressorKind::Tbgp) / rmse(RegressorKind::Gp), fvu(RegressorKind::Tbgp) / fvu(RegressorKind::Gp));
    outcome(
        rr <= 0.1 && fr <= 1e-3 && took <= Duration::from_secs(1800),
        format!(
            "N=200, 20 trials: RMSE ratio {rr:.2e} <= 0.1 (tbgp {:.2e}, gp {:.2e}); 1-rho^2 ratio {fr:.2e} <= 1e-3 (tbgp {:.2e}, gp {:.2e}); {:.0} s",
            rmse(RegressorKind::Tbgp),
            rmse(RegressorKind::Gp),
            fvu(RegressorKind::Tbgp),
            fvu(RegressorKind::Gp),
            took.as_secs_f64()
        ),
    )
}

// 11, 12 -------------------------------------------------------------------

const POTENTIAL_SIZES: [usize; 4] = [25, 50, 100, 200];

fn potential_runs() -> Vec<TrialResult> {
    let mut cfg = ExperimentConfig::new(ProblemKind::MooneyRivlin, POTENTIAL_SIZES.to_vec(), 12, std::env::temp_dir());
    cfg.range = mr_range();
    cfg.trials = 6;
    cfg.restarts = 3;
    cfg.test_size = 10_000;
    cfg.regressors = vec![RegressorKind::Gp, RegressorKind::PotentialTbgp];
    Experiment::new(cfg).unwrap().run_all().unwrap()
}

fn potential_stress(results: &[TrialResult]) -> Outcome {
    let ratios: Vec<String> = POTENTIAL_SIZES
        .iter()
        .map(|&n| {
            let ratio = medians_of(results, RegressorKind::PotentialTbgp, n, TrialResult::pooled_rmse)
                / medians_of(results, RegressorKind::Gp, n, TrialResult::pooled_rmse);
            format!("N={n}: {ratio:.2}")
        })
        .collect();
    let n = *POTENTIAL_SIZES.last().unwrap();
    let pot = medians_of(results, RegressorKind::PotentialTbgp, n, TrialResult::pooled_rmse);
    let gp = medians_of(results, RegressorKind::Gp, n, TrialResult::pooled_rmse);
    let ratio = pot / gp;
    outcome(
        (1.0 / 3.0..=3.0).contains(&ratio),
        format!("median RMSE potential {pot:.2e} / gp {gp:.2e} = {ratio:.2} within [1/3, 3] at N={n} (ratios {})", ratios.join(", ")),
    )
}

fn potential_recovery(results: &[TrialResult]) -> Outcome {
    let pot_rmse: Vec<f64> = POTENTIAL_SIZES
        .iter()
        .map(|&n| medians_of(results, RegressorKind::PotentialTbgp, n, |t| t.potential.map(|p| p.rmse)))
        .collect();
    let rises = pot_rmse.windows(2).filter(|w| w[1] >= w[0]).count();
    let n = *POTENTIAL_SIZES.last().unwrap();
    let fvu = medians_of(results, RegressorKind::PotentialTbgp, n, |t| t.potential.and_then(|p| p.fvu));
    let curve: Vec<String> = POTENTIAL_SIZES.iter().zip(&pot_rmse).map(|(n, e)| format!("{n}: {e:.2e}")).collect();
    outcome(
        rises <= 1 && fvu < 0.05,
        format!("median phi RMSE [{}] with {rises} non-decreasing step(s) <= 1; final 1-rho^2 {fvu:.2e} < 0.05", curve.join(", ")),
    )
}

// 13 -----------------------------------------------------------------------

fn ill_conditioning() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let sizes = vec![50, 100, 200, 400];
    let mut cfg = ExperimentConfig::new(ProblemKind::MooneyRivlin, sizes.clone(), 13, dir.path());
    cfg.range = StretchRange::new(0.9, 2.0).unwrap();
    cfg.trials = 2;
    cfg.restarts = 3;
    cfg.test_size = 2000;
    cfg.regressors = vec![RegressorKind::Gp, RegressorKind::Tbgp];
    let out = match run_learning_curve(&cfg) {
        Ok(o) => o,
        Err(e) => return outcome(false, format!("run aborted: {e}")),
    };
    let rows = hyperelastic_gp::experiments::report(&out.results_path).unwrap();
    let expected = sizes.len() * cfg.trials * cfg.regressors.len();
    let mut growing = true;
    let mut notes = Vec::new();
    for r in &cfg.regressors {
        let conds: Vec<f64> = rows.iter().filter(|s| s.regressor == *r).filter_map(|s| s.cond_median).collect();
        growing &= conds.len() == sizes.len() && conds.last() > conds.first();
        let rmse: Vec<f64> = rows.iter().filter(|s| s.regressor == *r).filter_map(|s| s.rmse_median).collect();
        let chain = |v: &[f64]| v.iter().map(|c| format!("{c:.1e}")).collect::<Vec<_>>().join(" -> ");
        notes.push(format!("{r} cond {}, rmse {}", chain(&conds), chain(&rmse)));
    }
    let statuses: usize = rows.iter().map(|s| s.trials_ok + s.trials_failed).sum();
    outcome(
        statuses == expected && growing,
        format!("{statuses}/{expected} trials recorded with status ({} failed); {}", out.failures, notes.join("; ")),
    )
}

// ---------------------------------------------------------------------------

fn main() {
    let filter: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wanted = |n: usize| filter.is_empty() || filter.contains(&n);
    let mut failed = Vec::new();
    let mut report = |n: usize, name: &str, run: &mut dyn FnMut() -> Outcome| {
        if !wanted(n) {
            return;
        }
        let start = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("[{verdict}] {n:>2} {name}: {} [{:.1} s]", o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failed.push(n);
        }
    };

    report(1, "rotational equivariance", &mut || {
        let start = Instant::now();
        let o = rotational_equivariance();
        let took = start.elapsed();
        outcome(o.pass && took < Duration::from_secs(60), o.detail)
    });
    report(2, "coefficient roundtrip", &mut coefficient_roundtrip);
    report(3, "kernel derivative blocks", &mut kernel_blocks);
    report(4, "stress from potential", &mut stress_from_potential);
    report(5, "GP interpolation", &mut gp_interpolation);
    report(7, "evidence gradient", &mut evidence_gradient);

    let expm = if wanted(8) || wanted(9) { Some(matrix_exponential_runs()) } else { None };
    if let Some((results, took)) = &expm {
        report(8, "matrix exponential accuracy", &mut || matrix_exponential(results, *took));
        report(9, "rotated training set", &mut || rotated_training(results));
    }
    report(10, "Mooney-Rivlin tensor basis", &mut mooney_rivlin_tbgp);

    let pot = if wanted(6) || wanted(11) || wanted(12) { potential_runs() } else { Vec::new() };
    report(6, "grounding", &mut || grounding(&pot));
    report(11, "potential stress accuracy", &mut || potential_stress(&pot));
    report(12, "potential recovery", &mut || potential_recovery(&pot));
    report(13, "ill-conditioning behavior", &mut ill_conditioning);

    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
