//! Reduce a stress tensor to three basis coefficients and back, and show that
//! the coefficients do not change when the pair is rotated.
//!
//!     cargo run --example tensor_basis

use hyperelastic_gp::materials::{mr_stress, MooneyRivlinParams};
use hyperelastic_gp::tensor::{coefficients_from_pair, invariants, reconstruct, rotate, sample_rotation};
use hyperelastic_gp::SymTensor3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hyperelastic_gp::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let b = SymTensor3::new(1.3, 1.1, 1.05, 0.08, -0.02, 0.04);
    let sigma = mr_stress(&MooneyRivlinParams::default(), &b)?;

    let (eig, sol) = coefficients_from_pair(&b, &sigma)?;
    println!("B       = {b}");
    println!("sigma   = {sigma}");
    println!("eig(B)  = {:?}", eig.values);
    println!("inv(B)  = {:?}", invariants(&b)?);
    println!("c       = {:?} ({:?}, residual {:.2e})", sol.coefficients, sol.status, sol.residual);
    let back = reconstruct(&sol.coefficients, &b);
    println!("|c1 I + c2 B + c3 B^2 - sigma| = {:.2e}", (back - sigma).norm());

    let r = sample_rotation(&mut rng);
    let (rb, rs) = (rotate(&b, &r), rotate(&sigma, &r));
    let (_, rotated) = coefficients_from_pair(&rb, &rs)?;
    println!("c after rotating (B, sigma) = {:?}", rotated.coefficients);
    Ok(())
}
