//! Symmetric 3×3 tensor algebra.
//!
//! Everything an isotropic tensor function of one symmetric argument needs:
//! eigendecomposition, principal invariants, the `{I, B, B²}` basis with its
//! coefficient solve, rotations and Haar-uniform rotation sampling.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Singular values below this fraction of the largest one are treated as zero
/// when solving the Vandermonde system.
pub const SVD_CUTOFF: f64 = 1e-10;

/// Relative residual above which a (B, σ) pair is reported as non-collinear.
pub const COLLINEARITY_TOL: f64 = 1e-8;

/// Component names in file order.
pub const COMPONENT_NAMES: [&str; 6] = ["xx", "yy", "zz", "xy", "xz", "yz"];

/// Symmetric 3×3 tensor stored as its upper triangle.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SymTensor3 {
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
    pub xy: f64,
    pub xz: f64,
    pub yz: f64,
}

impl SymTensor3 {
    pub const fn new(xx: f64, yy: f64, zz: f64, xy: f64, xz: f64, yz: f64) -> Self {
        Self { xx, yy, zz, xy, xz, yz }
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    }

    pub const fn identity() -> Self {
        Self::diag(1.0, 1.0, 1.0)
    }

    pub const fn diag(a: f64, b: f64, c: f64) -> Self {
        Self::new(a, b, c, 0.0, 0.0, 0.0)
    }

    /// Components in the order `xx, yy, zz, xy, xz, yz`.
    pub const fn from_components(c: [f64; 6]) -> Self {
        Self::new(c[0], c[1], c[2], c[3], c[4], c[5])
    }

    pub const fn components(&self) -> [f64; 6] {
        [self.xx, self.yy, self.zz, self.xy, self.xz, self.yz]
    }

    /// Symmetric part of an arbitrary 3×3 matrix.
    pub fn from_matrix_sym(m: &Matrix3<f64>) -> Self {
        Self::new(
            m[(0, 0)],
            m[(1, 1)],
            m[(2, 2)],
            0.5 * (m[(0, 1)] + m[(1, 0)]),
            0.5 * (m[(0, 2)] + m[(2, 0)]),
            0.5 * (m[(1, 2)] + m[(2, 1)]),
        )
    }

    pub fn to_matrix(&self) -> Matrix3<f64> {
        Matrix3::new(
            self.xx, self.xy, self.xz, //
            self.xy, self.yy, self.yz, //
            self.xz, self.yz, self.zz,
        )
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|v| v.is_finite())
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy + self.zz
    }

    pub fn det(&self) -> f64 {
        self.xx * (self.yy * self.zz - self.yz * self.yz) - self.xy * (self.xy * self.zz - self.yz * self.xz)
            + self.xz * (self.xy * self.yz - self.yy * self.xz)
    }

    /// `self · self`, which is again symmetric.
    pub fn square(&self) -> Self {
        let Self { xx, yy, zz, xy, xz, yz } = *self;
        Self::new(
            xx * xx + xy * xy + xz * xz,
            xy * xy + yy * yy + yz * yz,
            xz * xz + yz * yz + zz * zz,
            xx * xy + xy * yy + xz * yz,
            xx * xz + xy * yz + xz * zz,
            xy * xz + yy * yz + yz * zz,
        )
    }

    /// Frobenius norm of the full 3×3 matrix.
    pub fn norm(&self) -> f64 {
        (self.xx * self.xx
            + self.yy * self.yy
            + self.zz * self.zz
            + 2.0 * (self.xy * self.xy + self.xz * self.xz + self.yz * self.yz))
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.components().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl Add for SymTensor3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.xx + o.xx, self.yy + o.yy, self.zz + o.zz, self.xy + o.xy, self.xz + o.xz, self.yz + o.yz)
    }
}

impl Sub for SymTensor3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.xx - o.xx, self.yy - o.yy, self.zz - o.zz, self.xy - o.xy, self.xz - o.xz, self.yz - o.yz)
    }
}

impl Mul<f64> for SymTensor3 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.xx * s, self.yy * s, self.zz * s, self.xy * s, self.xz * s, self.yz * s)
    }
}

impl Neg for SymTensor3 {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl fmt::Display for SymTensor3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:.6e}, {:.6e}, {:.6e}; {:.6e}, {:.6e}, {:.6e}]",
            self.xx, self.yy, self.zz, self.xy, self.xz, self.yz
        )
    }
}

/// A training or test observation: stretch `B` and the stress it produces.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorPair {
    pub b: SymTensor3,
    pub sigma: SymTensor3,
}

impl TensorPair {
    pub const fn new(b: SymTensor3, sigma: SymTensor3) -> Self {
        Self { b, sigma }
    }

    /// Both tensors rotated by `r`.
    pub fn rotated(&self, r: &Rotation3) -> Self {
        Self::new(rotate(&self.b, r), rotate(&self.sigma, r))
    }
}

/// Eigenvalues sorted descending with matching eigenvector columns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenSystem {
    pub values: [f64; 3],
    pub vectors: Matrix3<f64>,
}

impl EigenSystem {
    /// `Q Λ Qᵀ`.
    pub fn reconstruct(&self) -> SymTensor3 {
        let lambda = Matrix3::from_diagonal(&Vector3::from(self.values));
        SymTensor3::from_matrix_sym(&(self.vectors * lambda * self.vectors.transpose()))
    }

    /// Diagonal of `Qᵀ t Q`: the eigenvalues of a tensor sharing this eigenbasis,
    /// paired with `self.values` by position.
    pub fn project_diagonal(&self, t: &SymTensor3) -> [f64; 3] {
        let p = self.vectors.transpose() * t.to_matrix() * self.vectors;
        [p[(0, 0)], p[(1, 1)], p[(2, 2)]]
    }
}

/// Principal invariants `(I1, I2, I3)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Invariants {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
}

impl Invariants {
    pub const fn new(i1: f64, i2: f64, i3: f64) -> Self {
        Self { i1, i2, i3 }
    }

    /// Invariants of the undeformed state `B = I`.
    pub const fn undeformed() -> Self {
        Self::new(3.0, 3.0, 1.0)
    }

    pub fn from_eigenvalues(l: [f64; 3]) -> Self {
        Self::new(l[0] + l[1] + l[2], l[0] * l[1] + l[1] * l[2] + l[2] * l[0], l[0] * l[1] * l[2])
    }

    pub const fn to_array(self) -> [f64; 3] {
        [self.i1, self.i2, self.i3]
    }

    pub const fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

/// Coefficients of `σ = c1 I + c2 B + c3 B²`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BasisCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl BasisCoefficients {
    pub const fn new(c1: f64, c2: f64, c3: f64) -> Self {
        Self { c1, c2, c3 }
    }

    pub const fn to_array(self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }

    pub const fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    /// Full-rank system solved.
    Exact,
    /// Repeated eigenvalues; minimal-norm least-squares solution returned.
    RankDeficient,
    /// Residual exceeded [`COLLINEARITY_TOL`]; the tensors do not share a basis expansion.
    NonCollinear,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoefficientSolution {
    pub coefficients: BasisCoefficients,
    /// Absolute residual of the solve.
    pub residual: f64,
    pub status: SolveStatus,
}

/// Proper rotation (orthogonal, determinant +1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation3(Matrix3<f64>);

impl Rotation3 {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Accepts `m` if it is orthogonal with unit determinant to `tol`.
    pub fn from_matrix(m: Matrix3<f64>, tol: f64) -> Result<Self> {
        let ortho = (m * m.transpose() - Matrix3::identity()).amax();
        let det = m.determinant();
        if !(ortho <= tol && (det - 1.0).abs() <= tol) {
            return Err(Error::InvalidInput(format!(
                "not a rotation: orthogonality residual {ortho:e}, determinant {det}"
            )));
        }
        Ok(Self(m))
    }

    /// Rotation from a unit quaternion `(w, x, y, z)`.
    pub fn from_quaternion(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self(Matrix3::new(
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }
}

/// Sorted symmetric eigendecomposition.
pub fn eigh(t: &SymTensor3) -> Result<EigenSystem> {
    if !t.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite tensor {t}")));
    }
    let eig = SymmetricEigen::new(t.to_matrix());
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.map(|i| eig.eigenvalues[i]);
    let vectors = Matrix3::from_columns(&order.map(|i| eig.eigenvectors.column(i).into_owned()));
    Ok(EigenSystem { values, vectors })
}

/// Principal invariants computed from the eigenvalues.
pub fn invariants(t: &SymTensor3) -> Result<Invariants> {
    Ok(Invariants::from_eigenvalues(eigh(t)?.values))
}

/// Solve `[1, λ_Bi, λ_Bi²] · c = λ_σi` for the basis coefficients.
///
/// Rank-deficient systems (repeated eigenvalues of `B`) get the minimal-norm
/// least-squares solution, discarding singular values below
/// [`SVD_CUTOFF`] times the largest.
pub fn solve_coefficients(lambda_b: [f64; 3], lambda_sigma: [f64; 3]) -> CoefficientSolution {
    let v = Matrix3::from_fn(|i, j| lambda_b[i].powi(j as i32));
    let rhs = Vector3::from(lambda_sigma);
    let svd = v.svd(true, true);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let smax = svd.singular_values.max();
    let mut rank = 0;
    let mut utb = u.transpose() * rhs;
    for k in 0..3 {
        let s = svd.singular_values[k];
        if s > SVD_CUTOFF * smax {
            utb[k] /= s;
            rank += 1;
        } else {
            utb[k] = 0.0;
        }
    }
    let c = vt.transpose() * utb;
    let residual = (v * c - rhs).norm();
    let status = if residual > COLLINEARITY_TOL * rhs.norm() {
        SolveStatus::NonCollinear
    } else if rank < 3 {
        SolveStatus::RankDeficient
    } else {
        SolveStatus::Exact
    };
    CoefficientSolution { coefficients: BasisCoefficients::new(c[0], c[1], c[2]), residual, status }
}

/// Basis coefficients for a `(B, σ)` pair, pairing eigenvalues through the
/// eigenbasis of `B`.
///
/// The reported residual is the full tensor residual
/// `‖c1 I + c2 B + c3 B² − σ‖_F`, so off-diagonal parts of `Qᵀ σ Q` (a σ that
/// is not a function of B) are flagged as [`SolveStatus::NonCollinear`].
pub fn coefficients_from_pair(b: &SymTensor3, sigma: &SymTensor3) -> Result<(EigenSystem, CoefficientSolution)> {
    let eig = eigh(b)?;
    if !sigma.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite tensor {sigma}")));
    }
    let mut sol = solve_coefficients(eig.values, eig.project_diagonal(sigma));
    let residual = (reconstruct(&sol.coefficients, b) - *sigma).norm();
    sol.residual = residual;
    if residual > COLLINEARITY_TOL * sigma.norm() {
        sol.status = SolveStatus::NonCollinear;
    }
    Ok((eig, sol))
}

/// Round to 32 significant bits.
///
/// Eigenvalues of `R B Rᵀ` and `B` differ by a few ulps, and an
/// ill-conditioned GP amplifies that into ~1e-10 relative differences in its
/// mean. Rounding the rotation-invariant features first makes them bitwise
/// identical except when a value sits within a few ulps of a rounding
/// boundary; the bias is at most `2^-33` relative.
pub fn snap_feature(x: f64) -> f64 {
    const DROP: u32 = 20;
    let bits = x.to_bits();
    let half = 1u64 << (DROP - 1);
    f64::from_bits(bits.wrapping_add(half) & !((1u64 << DROP) - 1))
}

/// `c1 I + c2 B + c3 B²`.
pub fn reconstruct(c: &BasisCoefficients, b: &SymTensor3) -> SymTensor3 {
    SymTensor3::identity() * c.c1 + *b * c.c2 + b.square() * c.c3
}

/// Haar-uniform rotation from a uniformly distributed unit quaternion
/// (Shoemake's subgroup algorithm).
pub fn sample_rotation<R: Rng + ?Sized>(rng: &mut R) -> Rotation3 {
    use std::f64::consts::TAU;
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();
    let u3: f64 = rng.random();
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let (x, y) = (a * (TAU * u2).sin(), a * (TAU * u2).cos());
    let (z, w) = (b * (TAU * u3).sin(), b * (TAU * u3).cos());
    Rotation3::from_quaternion(w, x, y, z)
}

/// `R t Rᵀ`.
pub fn rotate(t: &SymTensor3, r: &Rotation3) -> SymTensor3 {
    let m = r.matrix();
    SymTensor3::from_matrix_sym(&(m * t.to_matrix() * m.transpose()))
}
