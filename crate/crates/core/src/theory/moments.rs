//! First and second moments of the one-bit score and the resulting
//! weighted-χ² representation of the Rao statistic.
//!
//! With `w = zᴴy / √E`, `E = tr(Z Zᴴ)`, the Rao statistic is `T = w₁² + w₂²`.
//! The sign bits are independent with `E[r_i] = c_i = 1 − 2Q(a u_i − b v_i)`
//! and `E[s_i] = d_i = 1 − 2Q(a v_i + b u_i)`, so mean and covariance of `w`
//! are exact finite sums; only the Gaussian shape is asymptotic.

use num_complex::Complex64;

use super::imhof::{ChiSquareTerm, WeightedChiSquareSpec};
use super::qfunc::q_function;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Gaussian approximation of the score `w = (w₁, w₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianApprox {
    pub mean: [f64; 2],
    /// Symmetric `[[σ₁², σ₁₂], [σ₁₂, σ₂²]]`.
    pub covariance: [[f64; 2]; 2],
}

/// Mean and covariance of `w` for reflectivity `beta`.
///
/// Sums are normalized by `E = tr(Z Zᴴ)`, which equals `N` for LFM scenes, so
/// `β = 0` gives exactly `(0, I₂)` for any non-zero `Z`.
pub fn gaussian_moments(signature: &ComplexMatrix, beta: Complex64) -> Result<GaussianApprox> {
    let energy = signature.energy();
    if energy <= 0.0 {
        return Err(Error::DegenerateScene);
    }
    let (a, b) = (beta.re, beta.im);
    let mut mean = [0.0; 2];
    let (mut s1, mut s2, mut s12) = (0.0, 0.0, 0.0);
    for z in signature.entries() {
        let (u, v) = (z.re, z.im);
        let c = 1.0 - 2.0 * q_function(a * u - b * v);
        let d = 1.0 - 2.0 * q_function(a * v + b * u);
        mean[0] += c * u + d * v;
        mean[1] += d * u - c * v;
        s1 += c * c * u * u + d * d * v * v;
        s2 += c * c * v * v + d * d * u * u;
        s12 += (c * c - d * d) * u * v;
    }
    let scale = energy.sqrt();
    Ok(GaussianApprox {
        mean: [mean[0] / scale, mean[1] / scale],
        covariance: [
            [1.0 - s1 / energy, s12 / energy],
            [s12 / energy, 1.0 - s2 / energy],
        ],
    })
}

/// `Σ = Pᵀ Λ P` for a symmetric 2×2 matrix; rows of `P` are eigenvectors and
/// `λ₁ ≥ λ₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricEigen2 {
    pub values: [f64; 2],
    pub rotation: [[f64; 2]; 2],
}

/// Off-diagonal and diagonal-gap size below which the rotation is taken as `I`.
const TIE: f64 = 1e-14;

pub fn symmetric_eigen2(m: [[f64; 2]; 2]) -> SymmetricEigen2 {
    let a = m[0][0];
    let b = m[1][1];
    let c = 0.5 * (m[0][1] + m[1][0]);
    if (a - b).abs() < TIE && c.abs() < TIE {
        return SymmetricEigen2 {
            values: [a, b],
            rotation: [[1.0, 0.0], [0.0, 1.0]],
        };
    }
    let center = 0.5 * (a + b);
    let radius = (0.5 * (a - b)).hypot(c);
    let theta = 0.5 * (2.0 * c).atan2(a - b);
    let (sin, cos) = theta.sin_cos();
    SymmetricEigen2 {
        values: [center + radius, center - radius],
        rotation: [[cos, sin], [-sin, cos]],
    }
}

/// Decomposes `T = w₁² + w₂²` with `w ~ N(mean, Σ)` into
/// `λ₁(ν₁ + μ₁)² + λ₂(ν₂ + μ₂)²`, `μ = P Σ^{-1/2} mean = Λ^{-1/2} P mean`.
pub fn weighted_spec_from_moments(approx: &GaussianApprox) -> Result<WeightedChiSquareSpec> {
    let eig = symmetric_eigen2(approx.covariance);
    let [l1, l2] = eig.values;
    if !(l1 > 0.0 && l2 > 0.0) || !l1.is_finite() {
        return Err(Error::NumericalDegeneracy { lambda1: l1, lambda2: l2 });
    }
    let p = eig.rotation;
    let rotated = [
        p[0][0] * approx.mean[0] + p[0][1] * approx.mean[1],
        p[1][0] * approx.mean[0] + p[1][1] * approx.mean[1],
    ];
    let mu1 = rotated[0] / l1.sqrt();
    let mu2 = rotated[1] / l2.sqrt();
    WeightedChiSquareSpec::new(vec![
        ChiSquareTerm::new(l1, 1, mu1 * mu1),
        ChiSquareTerm::new(l2, 1, mu2 * mu2),
    ])
}
