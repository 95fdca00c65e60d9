//! Plain GP regression on a 1-D function: hyperparameters from evidence
//! maximization, posterior mean and variance, and a save/load round trip.
//!
//!     cargo run --example gp_regression

use hyperelastic_gp::gp::{GpModel, SavedGp, DEFAULT_NOISE};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hyperelastic_gp::Result<()> {
    let n = 12;
    let x = DMatrix::from_fn(n, 1, |i, _| i as f64 / (n - 1) as f64 * 6.0);
    let y = x.map(f64::sin);

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (gp, report) = GpModel::fit_optimized(&x, &y, DEFAULT_NOISE, 10, &mut rng)?;
    println!("kernel {:?}, log evidence {:.3}", report.kernel, report.log_evidence);
    for o in &report.outcomes {
        println!("  restart from {:?}: {:?} after {} iterations", o.start, o.status, o.iterations);
    }

    let grid = DMatrix::from_fn(7, 1, |i, _| 0.25 + i as f64);
    let mean = gp.predict_mean(&grid)?;
    let var = gp.predict_var(&grid)?;
    println!("{:>6} {:>10} {:>10} {:>10}", "x", "sin x", "mean", "sd");
    for i in 0..grid.nrows() {
        let t = grid[(i, 0)];
        println!("{t:>6.2} {:>10.6} {:>10.6} {:>10.2e}", t.sin(), mean[(i, 0)], var[i].sqrt());
    }

    let path = std::env::temp_dir().join("gp_regression_example.json");
    gp.to_saved().save(&path)?;
    let reloaded = SavedGp::load(&path)?.into_model()?;
    println!("reloaded prediction identical: {}", reloaded.predict_mean(&grid)? == mean);
    Ok(())
}
