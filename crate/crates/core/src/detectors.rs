//! Detection statistics. Every statistic is oriented so that large values
//! favour H1 and the decision is `H1 ⇔ statistic ≥ threshold`.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::scene::Hypothesis;
use crate::theory::log_q;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Detector {
    /// Rao test on one-bit data.
    Rao,
    /// ∞-bit GLRT on the Wilks scale, `−2 ln T_GLRT`.
    GlrtWilks,
    /// One-bit likelihood ratio with the true β (benchmark only).
    LrtKnownBeta,
}

impl Detector {
    pub fn name(self) -> &'static str {
        match self {
            Detector::Rao => "rao",
            Detector::GlrtWilks => "glrt_wilks",
            Detector::LrtKnownBeta => "lrt_known_beta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorOutput {
    pub statistic: f64,
    pub threshold: f64,
    pub decision: Hypothesis,
}

impl DetectorOutput {
    pub fn new(statistic: f64, threshold: f64) -> Result<Self> {
        Ok(Self { statistic, threshold, decision: decide(statistic, threshold)? })
    }
}

/// `H1` iff `statistic ≥ threshold`.
pub fn decide(statistic: f64, threshold: f64) -> Result<Hypothesis> {
    if statistic.is_nan() || threshold.is_nan() {
        return Err(Error::invalid("cannot decide on a NaN statistic or threshold"));
    }
    Ok(if statistic >= threshold { Hypothesis::H1 } else { Hypothesis::H0 })
}

fn signature_energy(z: &ComplexMatrix) -> Result<f64> {
    let e = z.energy();
    if e <= 0.0 {
        return Err(Error::DegenerateScene);
    }
    Ok(e)
}

/// Rao statistic `|tr(Y Zᴴ)|² / tr(Z Zᴴ)`.
///
/// Under H0 it is χ²₂ distributed whatever the noise power; on LFM scenes the
/// denominator equals `N`.
pub fn rao_statistic(y: &ComplexMatrix, z: &ComplexMatrix) -> Result<f64> {
    let inner = y.trace_inner(z)?;
    Ok(inner.norm_sqr() / signature_energy(z)?)
}

/// Score `∂L/∂(a, b)` at `β = 0`: `√(2/π) (Re zᴴy, Im zᴴy)`.
pub fn rao_score(y: &ComplexMatrix, z: &ComplexMatrix) -> Result<[f64; 2]> {
    let inner = y.trace_inner(z)?;
    let k = (2.0 / PI).sqrt();
    Ok([k * inner.re, k * inner.im])
}

/// `T′ = |tr(X Zᴴ)|² / tr(X Xᴴ)`, the statistic the GLRT is monotone in.
pub fn glrt_monotone_statistic(x: &ComplexMatrix, z: &ComplexMatrix) -> Result<f64> {
    let inner = x.trace_inner(z)?;
    let energy = x.energy();
    if energy <= 0.0 {
        return Err(Error::DegenerateInput("tr(X Xᴴ) = 0".into()));
    }
    Ok(inner.norm_sqr() / energy)
}

/// GLRT on the Wilks scale, `−2N ln(1 − T′/tr(Z Zᴴ))`.
///
/// χ²₂ under H0 and approximately χ²₂(N|β|²) under H1.
pub fn glrt_wilks_statistic(x: &ComplexMatrix, z: &ComplexMatrix) -> Result<f64> {
    let t = glrt_monotone_statistic(x, z)?;
    let ratio = t / signature_energy(z)?;
    if ratio >= 1.0 {
        if ratio > 1.0 + 1e-9 {
            return Err(Error::NumericalDomain(format!(
                "correlation ratio {ratio} exceeds 1 (Cauchy–Schwarz)"
            )));
        }
        return Err(Error::Overflow("received data is collinear with Z".into()));
    }
    Ok(-2.0 * x.len() as f64 * (-ratio).ln_1p())
}

/// The GLRT as written, `[1 − |tr(X Zᴴ)|² / (N tr(X Xᴴ))]^N`; small under H1.
pub fn glrt_raw_statistic(x: &ComplexMatrix, z: &ComplexMatrix) -> Result<f64> {
    let t = glrt_monotone_statistic(x, z)?;
    let n = x.len() as f64;
    Ok((1.0 - t / n).powf(n))
}

/// Known-β log-likelihood ratio on one-bit data,
/// `Σ ln Q[−r_i(a u_i − b v_i)] + Σ ln Q[−s_i(a v_i + b u_i)] + 2N ln 2`.
pub fn lrt_known_beta(y: &ComplexMatrix, z: &ComplexMatrix, beta: Complex64) -> Result<f64> {
    y.check_same_dims(z)?;
    let (a, b) = (beta.re, beta.im);
    let mut acc = 0.0;
    for (yi, zi) in y.entries().iter().zip(z.entries()) {
        let (u, v) = (zi.re, zi.im);
        acc += log_q(-yi.re * (a * u - b * v)) + log_q(-yi.im * (a * v + b * u));
    }
    Ok(acc + 2.0 * y.len() as f64 * LN_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::q_function;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mat(rows: usize, cols: usize, v: &[(f64, f64)]) -> ComplexMatrix {
        ComplexMatrix::new(rows, cols, v.iter().map(|&(r, i)| c(r, i)).collect()).unwrap()
    }

    #[test]
    fn rao_on_all_ones() {
        let (m, n) = (3, 4);
        let y = ComplexMatrix::from_fn(m, n, |_, _| c(1.0, 1.0));
        let z = ComplexMatrix::from_fn(m, n, |_, _| c(1.0, 0.0));
        let big_n = (m * n) as f64;
        assert!((y.trace_inner(&z).unwrap() - c(big_n, big_n)).norm() < 1e-12);
        assert!((rao_statistic(&y, &z).unwrap() - 2.0 * big_n).abs() < 1e-12);
    }

    #[test]
    fn rao_orthogonal_is_zero() {
        let y = mat(1, 2, &[(1.0, 1.0), (-1.0, -1.0)]);
        let z = mat(1, 2, &[(1.0, 0.0), (1.0, 0.0)]);
        assert_eq!(rao_statistic(&y, &z).unwrap(), 0.0);
    }

    #[test]
    fn rao_errors() {
        let y = mat(1, 2, &[(1.0, 1.0), (1.0, 1.0)]);
        assert!(matches!(rao_statistic(&y, &ComplexMatrix::zeros(1, 2)), Err(Error::DegenerateScene)));
        assert!(matches!(rao_statistic(&y, &ComplexMatrix::zeros(2, 1)), Err(Error::InvalidArgument(_))));
    }

    /// Score and FIM assembled element by element from the likelihood
    /// derivatives at θ = 0, then sᵀ F⁻¹ s.
    #[test]
    fn rao_matches_score_quadratic_form() {
        let z = mat(1, 2, &[(0.8, -0.6), (-0.28, 0.96)]);
        let y = mat(1, 2, &[(1.0, -1.0), (-1.0, -1.0)]);
        let phi0 = 1.0 / (2.0 * PI).sqrt();
        let (mut da, mut db) = (0.0, 0.0);
        for (yi, zi) in y.entries().iter().zip(z.entries()) {
            let (r, s, u, v) = (yi.re, yi.im, zi.re, zi.im);
            // φ(0)/Q(0) = 2φ(0) for each term.
            da += r * u * phi0 / 0.5 + s * v * phi0 / 0.5;
            db += -r * v * phi0 / 0.5 + s * u * phi0 / 0.5;
        }
        let n = 2.0;
        let fisher = 2.0 / PI * n;
        let quad = (da * da + db * db) / fisher;
        assert!((rao_statistic(&y, &z).unwrap() - quad).abs() < 1e-12);
        let score = rao_score(&y, &z).unwrap();
        assert!((score[0] - da).abs() < 1e-12 && (score[1] - db).abs() < 1e-12);
    }

    #[test]
    fn glrt_orthogonal_is_zero() {
        let x = mat(1, 2, &[(1.0, 0.5), (-1.0, -0.5)]);
        let z = mat(1, 2, &[(1.0, 0.0), (1.0, 0.0)]);
        assert_eq!(glrt_wilks_statistic(&x, &z).unwrap(), 0.0);
    }

    #[test]
    fn glrt_collinear_overflows() {
        let z = mat(2, 1, &[(1.0, 0.0), (0.0, 1.0)]);
        let x = z.scaled(c(-2.0, 3.0));
        assert!(matches!(glrt_wilks_statistic(&x, &z), Err(Error::Overflow(_))));
        assert!(matches!(
            glrt_wilks_statistic(&ComplexMatrix::zeros(2, 1), &z),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn glrt_two_paths_agree() {
        // Unit-modulus signature so tr(Z Zᴴ) = N = 4.
        let z = mat(2, 2, &[(1.0, 0.0), (0.0, 1.0), (-0.6, 0.8), (0.28, -0.96)]);
        let x = mat(2, 2, &[(0.3, -1.2), (1.1, 0.4), (-0.7, -0.2), (0.5, 0.9)]);
        let raw = glrt_raw_statistic(&x, &z).unwrap();
        let wilks = glrt_wilks_statistic(&x, &z).unwrap();
        assert!((wilks - (-2.0 * raw.ln())).abs() < 1e-12);
    }

    #[test]
    fn lrt_zero_beta_is_zero() {
        let y = mat(1, 3, &[(1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)]);
        let z = mat(1, 3, &[(0.3, 0.1), (1.0, -2.0), (0.0, 0.5)]);
        assert!(lrt_known_beta(&y, &z, c(0.0, 0.0)).unwrap().abs() < 1e-14);
    }

    #[test]
    fn lrt_single_entry_substitution() {
        let y = mat(1, 1, &[(1.0, 1.0)]);
        let z = mat(1, 1, &[(1.0, 0.0)]);
        let a = 0.9;
        let expected = q_function(-a).ln() + LN_2;
        assert!((lrt_known_beta(&y, &z, c(a, 0.0)).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn lrt_stays_finite_at_high_snr() {
        let y = mat(1, 2, &[(-1.0, -1.0), (1.0, 1.0)]);
        let z = mat(1, 2, &[(1.0, 0.0), (0.0, 1.0)]);
        let v = lrt_known_beta(&y, &z, c(80.0, 0.0)).unwrap();
        assert!(v.is_finite() && v < -3000.0);
    }

    #[test]
    fn decide_boundary_inclusive() {
        assert_eq!(decide(13.8155, 13.8155).unwrap(), Hypothesis::H1);
        assert_eq!(decide(0.0, 13.8155).unwrap(), Hypothesis::H0);
        assert_eq!(decide(14.0, 13.8155).unwrap(), Hypothesis::H1);
        assert!(decide(f64::NAN, 1.0).is_err());
        let out = DetectorOutput::new(3.0, 2.0).unwrap();
        assert_eq!(out.decision, Hypothesis::H1);
    }
}
