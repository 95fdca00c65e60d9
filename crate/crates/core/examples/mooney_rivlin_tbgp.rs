//! Fit the tensor-basis GP to Mooney-Rivlin stresses and inspect the learned
//! coefficient functions against the exact ones.
//!
//!     cargo run --release --example mooney_rivlin_tbgp

use hyperelastic_gp::datagen::{make_dataset, DatasetSpec, ProblemKind, StretchRange};
use hyperelastic_gp::materials::{mr_energy_gradient, mr_stress, MooneyRivlinParams};
use hyperelastic_gp::potential::gradient_to_coefficients;
use hyperelastic_gp::tbgp::fit_tbgp;
use hyperelastic_gp::tensor::invariants;
use hyperelastic_gp::SymTensor3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hyperelastic_gp::Result<()> {
    let params = MooneyRivlinParams::default();
    let spec = DatasetSpec::new(ProblemKind::MooneyRivlin, 100, StretchRange::new(1.0, 1.5)?);
    let train = make_dataset(&spec, &mut ChaCha8Rng::seed_from_u64(7))?;
    let model = fit_tbgp(&train, 1e-10, 10, &mut ChaCha8Rng::seed_from_u64(8))?;
    println!("kernel {:?}", model.gp().kernel());

    for b in [
        SymTensor3::diag(1.1, 1.0, 1.0),
        SymTensor3::diag(1.2, 1.2, 1.05),
        SymTensor3::new(1.3, 1.15, 1.1, 0.05, 0.02, -0.03),
    ] {
        let exact = gradient_to_coefficients(&mr_energy_gradient(&params, &invariants(&b)?)?)?;
        let learned = model.predict_coefficients(&b)?;
        let err = (model.predict_stress(&b)? - mr_stress(&params, &b)?).norm();
        println!("B = {b}");
        println!("  exact   c = [{:.6}, {:.6}, {:.6}]", exact.c1, exact.c2, exact.c3);
        println!("  learned c = [{:.6}, {:.6}, {:.6}]  |stress error| = {err:.2e} MPa", learned.c1, learned.c2, learned.c3);
    }
    Ok(())
}
