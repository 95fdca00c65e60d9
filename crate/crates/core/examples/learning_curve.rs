//! Drive the experiment runner from code: a small learning curve written to
//! a temporary directory, then its summary.
//!
//!     cargo run --release --example learning_curve

use hyperelastic_gp::datagen::{ProblemKind, StretchRange};
use hyperelastic_gp::experiments::{run_learning_curve, ExperimentConfig};

fn main() -> hyperelastic_gp::Result<()> {
    let dir = std::env::temp_dir().join("hgp_learning_curve_example");
    let _ = std::fs::remove_dir_all(&dir);
    let mut cfg = ExperimentConfig::new(ProblemKind::MooneyRivlin, vec![10, 20, 40, 80], 1, &dir);
    cfg.range = StretchRange::new(1.0, 1.5)?;
    cfg.trials = 5;
    cfg.restarts = 3;
    cfg.test_size = 2000;

    let out = run_learning_curve(&cfg)?;
    println!("{} trials, {} failed; rows in {}", out.executed.len(), out.failures, out.results_path.display());
    print!("{}", std::fs::read_to_string(&out.summary_path)?);
    Ok(())
}
