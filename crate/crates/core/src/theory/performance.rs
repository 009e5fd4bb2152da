//! False-alarm and detection probabilities of the one-bit Rao test and the
//! ∞-bit GLRT, plus the Fisher-information comparison behind the 2 dB loss.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::imhof::{imhof_ccdf, WeightedChiSquareSpec};
use super::moments::{gaussian_moments, weighted_spec_from_moments};
use super::ncx2::noncentral_chi2_ccdf;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// `P_fa(γ) = exp(−γ/2)`: the null law of the Rao statistic is χ²₂,
/// i.e. exponential with rate 1/2.
pub fn rao_pfa(gamma: f64) -> Result<f64> {
    if gamma.is_nan() || gamma < 0.0 {
        return Err(Error::invalid(format!("threshold {gamma} must be ≥ 0")));
    }
    Ok((-0.5 * gamma).exp())
}

/// `γ = −2 ln P_fa`.
pub fn rao_threshold(pfa: f64) -> Result<f64> {
    if !(pfa > 0.0 && pfa <= 1.0) {
        return Err(Error::invalid(format!("false-alarm probability {pfa} must lie in (0, 1]")));
    }
    Ok(-2.0 * pfa.ln())
}

/// Detection probability of the Rao test from the bivariate Gaussian score
/// approximation, evaluated with Imhof's inversion.
pub fn rao_pd_imhof(signature: &ComplexMatrix, beta: Complex64, gamma: f64) -> Result<f64> {
    let approx = gaussian_moments(signature, beta)?;
    let spec = weighted_spec_from_moments(&approx)?;
    imhof_ccdf(&spec, gamma)
}

/// [`rao_pd_imhof`] averaged over weighted reflectivity nodes (see
/// [`crate::scene::beta_quadrature`]).
pub fn rao_pd_imhof_averaged(
    signature: &ComplexMatrix,
    nodes: &[(Complex64, f64)],
    gamma: f64,
) -> Result<f64> {
    RaoImhofModel::new(signature, nodes)?.pd(gamma)
}

/// Imhof detection model with the moment decomposition done once per node,
/// for evaluating many thresholds.
#[derive(Debug, Clone)]
pub struct RaoImhofModel {
    components: Vec<(WeightedChiSquareSpec, f64)>,
}

impl RaoImhofModel {
    pub fn new(signature: &ComplexMatrix, nodes: &[(Complex64, f64)]) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::invalid("at least one reflectivity node is required"));
        }
        let components = nodes
            .iter()
            .map(|(beta, w)| {
                let approx = gaussian_moments(signature, *beta)?;
                Ok((weighted_spec_from_moments(&approx)?, *w))
            })
            .collect::<Result<_>>()?;
        Ok(Self { components })
    }

    pub fn pd(&self, gamma: f64) -> Result<f64> {
        self.components
            .iter()
            .try_fold(0.0, |acc, (spec, w)| Ok(acc + w * imhof_ccdf(spec, gamma)?))
    }

    /// [`RaoImhofModel::pd`] on every threshold, evaluated in parallel.
    pub fn pd_grid(&self, gammas: &[f64]) -> Result<Vec<f64>> {
        gammas.par_iter().map(|&g| self.pd(g)).collect()
    }
}

/// `δ₁² = (2N/π)|β|²` of the low-SNR approximation `T ~ χ²₂(δ₁²)`.
pub fn lowsnr_noncentrality(entries: usize, beta: Complex64) -> f64 {
    2.0 * entries as f64 / PI * beta.norm_sqr()
}

pub fn rao_pd_lowsnr(entries: usize, beta: Complex64, gamma: f64) -> Result<f64> {
    check_entries(entries)?;
    noncentral_chi2_ccdf(2, lowsnr_noncentrality(entries, beta), gamma)
}

/// `δ² = N|β|²` of the Wilks law `−2 ln T_GLRT ~ χ²₂(δ²)` (σ² = 2).
pub fn glrt_noncentrality(entries: usize, beta: Complex64) -> f64 {
    entries as f64 * beta.norm_sqr()
}

pub fn glrt_pd(entries: usize, beta: Complex64, gamma: f64) -> Result<f64> {
    check_entries(entries)?;
    noncentral_chi2_ccdf(2, glrt_noncentrality(entries, beta), gamma)
}

pub fn rao_pd_lowsnr_averaged(entries: usize, nodes: &[(Complex64, f64)], gamma: f64) -> Result<f64> {
    nodes
        .iter()
        .try_fold(0.0, |acc, (beta, w)| Ok(acc + w * rao_pd_lowsnr(entries, *beta, gamma)?))
}

pub fn glrt_pd_averaged(entries: usize, nodes: &[(Complex64, f64)], gamma: f64) -> Result<f64> {
    nodes
        .iter()
        .try_fold(0.0, |acc, (beta, w)| Ok(acc + w * glrt_pd(entries, *beta, gamma)?))
}

fn check_entries(entries: usize) -> Result<()> {
    if entries == 0 {
        return Err(Error::invalid("sample count N must be ≥ 1"));
    }
    Ok(())
}

/// One-bit Fisher information at `β = 0`: `(2/π)·tr(Z Zᴴ)·I₂`.
pub fn fim_onebit_null(signature: &ComplexMatrix) -> [[f64; 2]; 2] {
    let f = 2.0 / PI * signature.energy();
    [[f, 0.0], [0.0, f]]
}

/// `(a, b)` block of the ∞-bit Fisher information, `(2/σ²)·tr(Z Zᴴ)·I₂`,
/// with σ² = 2.
pub fn fim_infbit_block(signature: &ComplexMatrix) -> [[f64; 2]; 2] {
    let f = signature.energy();
    [[f, 0.0], [0.0, f]]
}

/// Low-SNR detection loss of one-bit sampling, `10 log₁₀(π/2)` dB.
pub fn loss_db() -> f64 {
    10.0 * (PI / 2.0).log10()
}

/// Factor on the sample count that recovers the one-bit loss, `π/2`.
pub fn sample_compensation_factor() -> f64 {
    PI / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pfa_and_threshold() {
        assert_eq!(rao_pfa(0.0).unwrap(), 1.0);
        assert!((rao_threshold(1e-3).unwrap() - 13.815_510_557_964_274).abs() < 1e-12);
        assert!((rao_threshold((-1f64).exp()).unwrap() - 2.0).abs() < 1e-15);
        assert!(rao_threshold(0.0).is_err());
        assert!(rao_threshold(1.5).is_err());
        assert!(rao_pfa(-1.0).is_err());
        let g = 7.3;
        assert!((rao_pfa(g).unwrap() - rao_pfa(rao_threshold(rao_pfa(g).unwrap()).unwrap()).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn null_reductions() {
        let z = ComplexMatrix::new(1, 2, vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        for &g in &[0.5, 2.0, 9.0] {
            let pfa = rao_pfa(g).unwrap();
            assert!((rao_pd_imhof(&z, c(0.0, 0.0), g).unwrap() - pfa).abs() < 1e-9);
            assert!((rao_pd_lowsnr(64, c(0.0, 0.0), g).unwrap() - pfa).abs() < 1e-15);
            assert!((glrt_pd(64, c(0.0, 0.0), g).unwrap() - pfa).abs() < 1e-15);
        }
    }

    #[test]
    fn noncentrality_values() {
        let beta = c(0.06, 0.08);
        assert!((glrt_noncentrality(1024, beta) - 10.24).abs() < 1e-12);
        for &n in &[1usize, 7, 512] {
            let ratio = glrt_noncentrality(n, beta) / lowsnr_noncentrality(n, beta);
            assert!((ratio - PI / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn fim_gap_is_two_over_pi() {
        let z = ComplexMatrix::new(2, 1, vec![c(3.0, 4.0), c(1.0, -1.0)]).unwrap();
        let one = fim_onebit_null(&z);
        let inf = fim_infbit_block(&z);
        assert_eq!(one[0][1], 0.0);
        assert_eq!(one[1][0], 0.0);
        assert!((one[0][0] / inf[0][0] - 2.0 / PI).abs() < 1e-15);

        let lfm128 = ComplexMatrix::new(1, 128, vec![c(1.0, 0.0); 128]).unwrap();
        assert!((fim_onebit_null(&lfm128)[1][1] - 256.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn loss_constants() {
        assert!((loss_db() - 1.9612).abs() < 5e-5);
        assert!((2.0 * sample_compensation_factor() - std::f64::consts::PI).abs() < 1e-15);
        assert!((sample_compensation_factor().log2() - 0.6515).abs() < 5e-5);
    }

    #[test]
    fn entry_count_must_be_positive() {
        assert!(rao_pd_lowsnr(0, c(0.1, 0.0), 1.0).is_err());
        assert!(glrt_pd(0, c(0.1, 0.0), 1.0).is_err());
    }
}
