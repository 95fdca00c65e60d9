//! Learn `exp(B)` for symmetric `B` with the component GP and the tensor-basis
//! GP, and compare test errors.
//!
//!     cargo run --release --example matrix_exponential [N]

use hyperelastic_gp::component::ComponentGp;
use hyperelastic_gp::datagen::{make_dataset, DatasetSpec, ProblemKind, StretchRange};
use hyperelastic_gp::experiments::evaluate_metrics;
use hyperelastic_gp::tbgp::fit_tbgp;
use hyperelastic_gp::{StressRegressor, SymTensor3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hyperelastic_gp::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(64);
    let spec = |n| DatasetSpec::new(ProblemKind::MatrixExp, n, StretchRange::new(1.0, 1.0).unwrap());
    let train = make_dataset(&spec(n), &mut ChaCha8Rng::seed_from_u64(1))?;
    let test = make_dataset(&spec(2000), &mut ChaCha8Rng::seed_from_u64(2))?;
    let (tb, ts): (Vec<SymTensor3>, Vec<SymTensor3>) = test.iter().map(|p| (p.b, p.sigma)).unzip();

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let gp = ComponentGp::fit_optimized(&train, 1e-10, 10, &mut rng)?;
    let tbgp = fit_tbgp(&train, 1e-10, 10, &mut rng)?;

    println!("N = {n}, {} test points", test.len());
    for (name, model) in [("gp", &gp as &dyn StressRegressor), ("tbgp", &tbgp)] {
        let m = evaluate_metrics(&ts, &model.predict_stresses(&tb)?)?;
        println!("{name:>5}: RMSE {:.3e}  1-rho^2 {:.3e}  cond {:.1e}", m.pooled_rmse, m.pooled_fvu.unwrap_or(f64::NAN), model.condition_estimate());
    }
    Ok(())
}
