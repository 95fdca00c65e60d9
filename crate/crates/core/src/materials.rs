//! Truth models used to label training and test data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{gradient_to_coefficients, PotentialGradientSample};
use crate::tensor::{eigh, invariants, reconstruct, Invariants, SymTensor3};

/// Compressible Mooney–Rivlin constants in MPa.
///
/// `Φ = c1 (I3^{-1/2} I1 − 3) + c2 (I3^{-2/3} I2 − 3) + c3 (I3^{1/2} − 1)²`
///
/// Note that with the `I3^{-1/2}` scaling on the first term the stress in the
/// undeformed state is `−c1 I`, not zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MooneyRivlinParams {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl Default for MooneyRivlinParams {
    fn default() -> Self {
        Self { c1: 0.162, c2: 0.0059, c3: 10.0 }
    }
}

impl MooneyRivlinParams {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        let p = Self { c1, c2, c3 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c3 > 0.0) || ![self.c1, self.c2, self.c3].iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidInput(format!("Mooney-Rivlin constants must be finite with c3 > 0, got {self:?}")));
        }
        Ok(())
    }
}

fn check_stretch(inv: &Invariants) -> Result<()> {
    if inv.i3 > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidStretch { i3: inv.i3 })
    }
}

/// Strain-energy density in MPa.
pub fn mr_energy(p: &MooneyRivlinParams, inv: &Invariants) -> Result<f64> {
    check_stretch(inv)?;
    let Invariants { i1, i2, i3 } = *inv;
    let j = i3.sqrt();
    Ok(p.c1 * (i1 / j - 3.0) + p.c2 * (i2 * i3.powf(-2.0 / 3.0) - 3.0) + p.c3 * (j - 1.0).powi(2))
}

/// Analytic partial derivatives of [`mr_energy`] with respect to the invariants.
pub fn mr_energy_gradient(p: &MooneyRivlinParams, inv: &Invariants) -> Result<PotentialGradientSample> {
    check_stretch(inv)?;
    let Invariants { i1, i2, i3 } = *inv;
    let j = i3.sqrt();
    let d1 = p.c1 / j;
    let d2 = p.c2 * i3.powf(-2.0 / 3.0);
    let d3 = -0.5 * p.c1 * i1 * i3.powf(-1.5) - (2.0 / 3.0) * p.c2 * i2 * i3.powf(-5.0 / 3.0) + p.c3 * (j - 1.0) / j;
    Ok(PotentialGradientSample { invariants: *inv, gradient: [d1, d2, d3] })
}

/// Cauchy stress from the tensor-basis form of the potential derivative.
pub fn mr_stress(p: &MooneyRivlinParams, b: &SymTensor3) -> Result<SymTensor3> {
    let inv = invariants(b)?;
    let c = gradient_to_coefficients(&mr_energy_gradient(p, &inv)?)?;
    Ok(reconstruct(&c, b))
}

/// Matrix exponential of a symmetric tensor through its eigendecomposition.
pub fn matrix_exp(b: &SymTensor3) -> Result<SymTensor3> {
    let mut e = eigh(b)?;
    e.values = e.values.map(f64::exp);
    Ok(e.reconstruct())
}
