//! Central and non-central χ² tail probabilities.
//!
//! The non-central law is evaluated as its Poisson mixture of central laws,
//! `Pr{χ²_f(δ²) > x} = Σⱼ Pois(j; δ²/2) · Pr{χ²_{f+2j} > x}`, summed outwards
//! from the Poisson mode so that no weight underflows before it matters.

use statrs::function::gamma::{gamma_ur, ln_gamma};

use crate::error::{Error, Result};

/// Poisson tail mass left unsummed on each side of the mode.
const POISSON_TAIL: f64 = 1e-15;

/// `Pr{χ²_dof > x}`.
pub fn central_chi2_ccdf(dof: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    gamma_ur(0.5 * dof, 0.5 * x)
}

/// `Pr{χ²_dof(δ²) > x}`.
pub fn noncentral_chi2_ccdf(dof: u32, delta2: f64, x: f64) -> Result<f64> {
    if dof == 0 {
        return Err(Error::invalid("χ² needs at least one degree of freedom"));
    }
    if !(delta2.is_finite() && delta2 >= 0.0) {
        return Err(Error::invalid(format!("non-centrality {delta2} must be finite and ≥ 0")));
    }
    if x.is_nan() {
        return Err(Error::invalid("x is NaN"));
    }
    let f = dof as f64;
    if x <= 0.0 {
        return Ok(1.0);
    }
    if delta2 == 0.0 {
        return Ok(central_chi2_ccdf(f, x));
    }

    let lambda = 0.5 * delta2;
    let mode = lambda.floor();
    let log_weight =
        |j: f64| -> f64 { -lambda + j * lambda.ln() - ln_gamma(j + 1.0) };

    // The summed weights renormalize the result, which cancels the rounding
    // in the mode weight at large δ².
    let mut total = 0.0;
    let mut mass = 0.0;
    // Forward from the mode: ratio w_{j+1}/w_j = λ/(j+1).
    let mut j = mode;
    let mut w = log_weight(j).exp();
    loop {
        total += w * central_chi2_ccdf(f + 2.0 * j, x);
        mass += w;
        let ratio = lambda / (j + 1.0);
        let next = w * ratio;
        if ratio < 1.0 && next / (1.0 - ratio) < POISSON_TAIL {
            break;
        }
        j += 1.0;
        w = next;
    }
    // Backward from the mode: ratio w_{j-1}/w_j = j/λ.
    let mut j = mode;
    let mut w = log_weight(j).exp();
    while j > 0.0 {
        let ratio = j / lambda;
        w *= ratio;
        j -= 1.0;
        total += w * central_chi2_ccdf(f + 2.0 * j, x);
        mass += w;
        if ratio < 1.0 && w * ratio / (1.0 - ratio) < POISSON_TAIL {
            break;
        }
    }
    Ok((total / mass).clamp(0.0, 1.0))
}

/// `Pr{χ²_dof(δ²) ≤ x}`.
pub fn noncentral_chi2_cdf(dof: u32, delta2: f64, x: f64) -> Result<f64> {
    noncentral_chi2_ccdf(dof, delta2, x).map(|q| 1.0 - q)
}
