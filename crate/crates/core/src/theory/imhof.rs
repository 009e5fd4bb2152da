//! Tail probability of a positively weighted sum of non-central χ² variables
//! by numerical inversion of its characteristic function (Imhof).
//!
//! For `R = Σ_r k_r χ²_{h_r}(δ_r²)`,
//!
//! ```text
//! Pr{R > x} = 1/2 + (1/π) ∫₀^∞ sin ψ(u) / (u ρ(u)) du
//! ψ(u) = ½ Σ_r [h_r atan(k_r u) + δ_r² k_r u / (1 + k_r² u²)] − x u / 2
//! ρ(u) = Π_r (1 + k_r² u²)^{h_r/4} · exp{½ Σ_r (δ_r k_r u)² / (1 + k_r² u²)}
//! ```
//!
//! The integrand tends to `ψ′(0)` at the origin and, for large `u`, behaves
//! like `sin(c − x u/2) / (u ρ(u))` with `ρ` growing only algebraically. The
//! integral is split into a head `[0, U₀]`, integrated adaptively, and a tail
//! cut into half-periods `2π/x` whose alternating partial sums are
//! extrapolated with Wynn's ε algorithm. The tail is summed directly instead
//! whenever the envelope bound `∫_U^∞ du/(u ρ(u))` is already negligible.

use std::f64::consts::PI;

use log::debug;

use super::quadrature::{integrate_adaptive, WynnEpsilon};
use crate::error::{Error, Result};

/// One term `k · χ²_h(δ²)` of a generalized non-central χ² variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareTerm {
    pub weight: f64,
    pub dof: u32,
    pub noncentrality: f64,
}

impl ChiSquareTerm {
    pub fn new(weight: f64, dof: u32, noncentrality: f64) -> Self {
        Self { weight, dof, noncentrality }
    }
}

/// Generalized non-central χ² law `Σ_r k_r χ²_{h_r}(δ_r²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedChiSquareSpec {
    terms: Vec<ChiSquareTerm>,
}

impl WeightedChiSquareSpec {
    pub fn new(terms: Vec<ChiSquareTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::invalid("weighted χ² needs at least one term"));
        }
        for t in &terms {
            if !(t.weight.is_finite() && t.weight > 0.0) {
                return Err(Error::invalid(format!("weight {} must be positive", t.weight)));
            }
            if t.dof == 0 {
                return Err(Error::invalid("each term needs at least one degree of freedom"));
            }
            if !(t.noncentrality.is_finite() && t.noncentrality >= 0.0) {
                return Err(Error::invalid(format!(
                    "non-centrality {} must be finite and ≥ 0",
                    t.noncentrality
                )));
            }
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[ChiSquareTerm] {
        &self.terms
    }

    pub fn mean(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.weight * (t.dof as f64 + t.noncentrality))
            .sum()
    }

    fn psi(&self, u: f64, x: f64) -> f64 {
        let mut acc = 0.0;
        for t in &self.terms {
            let ku = t.weight * u;
            acc += t.dof as f64 * ku.atan() + t.noncentrality * ku / (1.0 + ku * ku);
        }
        0.5 * acc - 0.5 * x * u
    }

    fn ln_rho(&self, u: f64) -> f64 {
        let mut acc = 0.0;
        for t in &self.terms {
            let ku2 = (t.weight * u).powi(2);
            acc += 0.25 * t.dof as f64 * ku2.ln_1p() + 0.5 * t.noncentrality * ku2 / (1.0 + ku2);
        }
        acc
    }

    fn integrand(&self, u: f64, x: f64) -> f64 {
        if u == 0.0 {
            return self.integrand_at_zero(x);
        }
        self.psi(u, x).sin() / (u * self.ln_rho(u).exp())
    }

    /// `lim_{u→0} sin ψ(u)/(u ρ(u)) = ψ′(0) = ½[Σ h k + Σ δ² k − x]`.
    fn integrand_at_zero(&self, x: f64) -> f64 {
        0.5 * (self
            .terms
            .iter()
            .map(|t| t.weight * (t.dof as f64 + t.noncentrality))
            .sum::<f64>()
            - x)
    }

    /// Upper bound on `∫_U^∞ du / (u ρ(u))` using `ρ(u) ≥ Π (k u)^{h/2}`.
    fn envelope_tail(&self, u: f64) -> f64 {
        let half_dof: f64 = self.terms.iter().map(|t| 0.5 * t.dof as f64).sum();
        let ln_scale: f64 = self
            .terms
            .iter()
            .map(|t| 0.5 * t.dof as f64 * (t.weight * u).ln())
            .sum();
        (-ln_scale).exp() / half_dof
    }
}

/// Absolute accuracy targeted for the inversion integral.
const TARGET: f64 = 1e-11;
const MAX_HEAD_PANELS: usize = 20_000;
const MAX_TAIL_CYCLES: usize = 400;

/// `Pr{R > x}` for `R` distributed as `spec`.
pub fn imhof_ccdf(spec: &WeightedChiSquareSpec, x: f64) -> Result<f64> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::invalid(format!("threshold {x} must be finite and ≥ 0")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }

    let k_min = spec
        .terms
        .iter()
        .map(|t| t.weight)
        .fold(f64::INFINITY, f64::min);
    let half_period = 2.0 * PI / x;
    let f = |u: f64| spec.integrand(u, x);

    // Head: past ~50/k_min every atan term is within 2% of its limit and the
    // integrand oscillates at the steady rate x/2.
    let saturation = 50.0 / k_min;
    let head_cycles = (saturation / half_period).ceil().max(1.0);
    let head_end = head_cycles * half_period;
    let head_panels = (head_cycles as usize).clamp(1, MAX_HEAD_PANELS);
    let head = integrate_adaptive(f, 0.0, head_end, head_panels, 0.1 * TARGET, 0.0, 8 * MAX_HEAD_PANELS)?;

    let mut total = head.value;
    let mut evaluations = head.evaluations;
    let mut lower = head_end;
    if spec.envelope_tail(lower) > TARGET {
        let mut wynn = WynnEpsilon::new();
        let mut partial = total;
        let mut converged = false;
        let mut last_estimate = partial;
        for cycle in 0..MAX_TAIL_CYCLES {
            let upper = lower + half_period;
            let piece = integrate_adaptive(f, lower, upper, 1, 0.01 * TARGET, 0.0, 256)?;
            evaluations += piece.evaluations;
            partial += piece.value;
            lower = upper;
            if spec.envelope_tail(lower) < TARGET {
                last_estimate = partial;
                converged = true;
                break;
            }
            let estimate = wynn.push(partial);
            let history = wynn.estimates();
            if cycle >= 6 {
                let n = history.len();
                let spread = (history[n - 1] - history[n - 2])
                    .abs()
                    .max((history[n - 2] - history[n - 3]).abs());
                if spread < TARGET {
                    last_estimate = estimate;
                    converged = true;
                    break;
                }
            }
            last_estimate = estimate;
        }
        if !converged {
            return Err(Error::NumericalFailure {
                what: format!("Imhof tail extrapolation did not settle (x = {x})"),
                estimate: 0.5 + last_estimate / PI,
                error: spec.envelope_tail(lower),
                evaluations,
            });
        }
        total = last_estimate;
    }

    let p = 0.5 + total / PI;
    if !(-1e-6..=1.0 + 1e-6).contains(&p) {
        return Err(Error::NumericalFailure {
            what: format!("Imhof inversion left [0, 1] (x = {x})"),
            estimate: p,
            error: head.error,
            evaluations,
        });
    }
    if !(0.0..=1.0).contains(&p) {
        debug!("imhof_ccdf clamped {p:e} into [0, 1] at x = {x}");
    }
    Ok(p.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::ncx2::noncentral_chi2_ccdf;

    fn spec(terms: &[(f64, u32, f64)]) -> WeightedChiSquareSpec {
        WeightedChiSquareSpec::new(terms.iter().map(|&(k, h, d)| ChiSquareTerm::new(k, h, d)).collect())
            .unwrap()
    }

    #[test]
    fn chi2_two_dof_closed_form() {
        let p = imhof_ccdf(&spec(&[(1.0, 2, 0.0)]), 2.0).unwrap();
        assert!((p - (-1f64).exp()).abs() < 1e-8, "{p}");
    }

    #[test]
    fn origin_limit_matches_small_u() {
        let s = spec(&[(1.5, 1, 1.0), (0.5, 1, 4.0)]);
        let limit = s.integrand_at_zero(5.0);
        let near = s.integrand(1e-7, 5.0);
        assert!((limit - near).abs() < 1e-6);
    }

    #[test]
    fn validates_spec() {
        assert!(WeightedChiSquareSpec::new(vec![]).is_err());
        assert!(WeightedChiSquareSpec::new(vec![ChiSquareTerm::new(0.0, 1, 0.0)]).is_err());
        assert!(WeightedChiSquareSpec::new(vec![ChiSquareTerm::new(1.0, 0, 0.0)]).is_err());
        assert!(WeightedChiSquareSpec::new(vec![ChiSquareTerm::new(1.0, 1, -1.0)]).is_err());
        assert!(imhof_ccdf(&spec(&[(1.0, 2, 0.0)]), -1.0).is_err());
        assert_eq!(imhof_ccdf(&spec(&[(1.0, 2, 0.0)]), 0.0).unwrap(), 1.0);
    }

    #[test]
    fn two_unit_terms_equal_two_dof_noncentral() {
        let s = spec(&[(1.0, 1, 3.0), (1.0, 1, 0.0)]);
        for &x in &[0.3, 1.0, 4.0, 9.0, 20.0] {
            let a = imhof_ccdf(&s, x).unwrap();
            let b = noncentral_chi2_ccdf(2, 3.0, x).unwrap();
            assert!((a - b).abs() < 1e-8, "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn single_dof_central_is_hardest_tail() {
        let s = spec(&[(1.0, 1, 0.0)]);
        for &x in &[0.01, 0.5, 3.0, 40.0] {
            let a = imhof_ccdf(&s, x).unwrap();
            let b = noncentral_chi2_ccdf(1, 0.0, x).unwrap();
            assert!((a - b).abs() < 1e-8, "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn scale_invariance() {
        // 2·χ²_2 > x  ⇔  χ²_2 > x/2.
        let a = imhof_ccdf(&spec(&[(2.0, 2, 1.5)]), 6.0).unwrap();
        let b = noncentral_chi2_ccdf(2, 1.5, 3.0).unwrap();
        assert!((a - b).abs() < 1e-8);
    }
}
