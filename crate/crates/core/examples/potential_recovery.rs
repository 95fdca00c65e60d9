//! Recover the strain-energy density from stress data alone and compare it
//! with the Mooney-Rivlin potential that generated the data.
//!
//!     cargo run --release --example potential_recovery

use hyperelastic_gp::datagen::{make_dataset, sample_deformation, DatasetSpec, ProblemKind, StretchRange};
use hyperelastic_gp::experiments::metrics::series_metrics;
use hyperelastic_gp::materials::{mr_energy, MooneyRivlinParams};
use hyperelastic_gp::potential::fit_potential;
use hyperelastic_gp::tensor::invariants;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hyperelastic_gp::Result<()> {
    let params = MooneyRivlinParams::default();
    let range = StretchRange::new(1.0, 1.5)?;
    let mut test_rng = ChaCha8Rng::seed_from_u64(100);
    let test: Vec<_> = (0..2000).map(|_| invariants(&sample_deformation(&range, &mut test_rng).b)).collect::<Result<_, _>>()?;
    let truth: Vec<f64> = test.iter().map(|i| mr_energy(&params, i)).collect::<Result<_, _>>()?;

    println!("{:>5} {:>12} {:>12} {:>12}", "N", "phi RMSE", "1-rho^2", "|phi(3,3,1)|");
    for n in [10, 25, 50, 100] {
        let spec = DatasetSpec::new(ProblemKind::MooneyRivlin, n, range);
        let train = make_dataset(&spec, &mut ChaCha8Rng::seed_from_u64(n as u64))?;
        let model = fit_potential(&train, 1e-10, 3, &mut ChaCha8Rng::seed_from_u64(1))?;
        let pred: Vec<f64> = test.iter().map(|i| model.predict_potential(i)).collect();
        let m = series_metrics(&truth, &pred)?;
        println!("{n:>5} {:>12.3e} {:>12.3e} {:>12.1e}", m.rmse, m.fvu.unwrap_or(f64::NAN), model.grounding_residual());
    }
    Ok(())
}
