//! Tail probabilities checked against oracles that share no code with the
//! library: direct quadrature of densities and plain sampling.

use onebit_core::theory::{
    central_chi2_ccdf, imhof_ccdf, noncentral_chi2_ccdf, q_function, ChiSquareTerm, WeightedChiSquareSpec,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Adaptive Simpson with Richardson correction.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Density of χ²₂(δ²): `½ exp(−(x+δ²)/2) I₀(√(δ² x))`, with the Bessel
/// series summed in log space.
fn ncx2_two_dof_density(delta2: f64, x: f64) -> f64 {
    let half_z_sq = 0.25 * delta2 * x;
    let base = -0.5 * (x + delta2);
    if half_z_sq == 0.0 {
        return 0.5 * base.exp();
    }
    let ln_h = half_z_sq.ln();
    let mut total = 0.0;
    let mut ln_fact = 0.0;
    for k in 0..2000 {
        if k > 0 {
            ln_fact += (k as f64).ln();
        }
        let term = (base + k as f64 * ln_h - 2.0 * ln_fact).exp();
        total += term;
        if k as f64 > half_z_sq.sqrt() + 5.0 && term < 1e-18 * total {
            break;
        }
    }
    0.5 * total
}

#[test]
fn q_function_matches_density_quadrature() {
    let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    for &x in &[0.0, 0.5, 1.0, 2.0, 3.5] {
        let oracle = 0.5 - simpson(&pdf, 0.0, x, 1e-15);
        assert!((q_function(x) - oracle).abs() < 1e-13, "Q({x})");
    }
}

#[test]
fn noncentral_two_dof_matches_density_quadrature() {
    for &delta2 in &[0.3, 4.0, 12.0, 40.0] {
        for &x in &[0.5, 2.0, 13.815_510_557_964_274, 30.0, 60.0] {
            let f = |t: f64| ncx2_two_dof_density(delta2, t);
            let cdf = simpson(&f, 0.0, x, 1e-14);
            let got = noncentral_chi2_ccdf(2, delta2, x).unwrap();
            assert!((got - (1.0 - cdf)).abs() < 1e-10, "δ²={delta2} x={x}: {got} vs {}", 1.0 - cdf);
        }
    }
}

#[test]
fn central_matches_exponential() {
    for i in 0..50 {
        let x = 0.37 * i as f64;
        assert!((central_chi2_ccdf(2.0, x) - (-0.5 * x).exp()).abs() < 1e-14);
    }
}

#[test]
fn imhof_single_term_matches_noncentral_chi2_on_grid() {
    let mut worst: f64 = 0.0;
    for &(dof, delta2) in &[(1u32, 0.0), (1, 2.5), (2, 0.0), (2, 7.0), (2, 25.0)] {
        let spec = WeightedChiSquareSpec::new(vec![ChiSquareTerm::new(1.0, dof, delta2)]).unwrap();
        for i in 1..=100 {
            let x = 0.45 * i as f64;
            let a = imhof_ccdf(&spec, x).unwrap();
            let b = noncentral_chi2_ccdf(dof, delta2, x).unwrap();
            worst = worst.max((a - b).abs());
        }
    }
    assert!(worst < 1e-8, "worst deviation {worst:e}");
}

#[test]
fn imhof_two_terms_match_sampling() {
    let terms = [(1.35, 0.8f64), (0.62, 2.1f64)];
    let spec = WeightedChiSquareSpec::new(
        terms.iter().map(|&(w, mu)| ChiSquareTerm::new(w, 1, mu * mu)).collect(),
    )
    .unwrap();
    let draws = 400_000;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let samples: Vec<f64> = (0..draws)
        .map(|_| {
            terms
                .iter()
                .map(|&(w, mu)| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    w * (z + mu).powi(2)
                })
                .sum()
        })
        .collect();
    for &x in &[0.5, 1.5, 3.0, 6.0, 10.0] {
        let empirical = samples.iter().filter(|&&t| t > x).count() as f64 / draws as f64;
        let theory = imhof_ccdf(&spec, x).unwrap();
        let se = (theory * (1.0 - theory) / draws as f64).sqrt();
        assert!((empirical - theory).abs() <= 4.0 * se, "x={x}: {empirical} vs {theory} (se {se:e})");
    }
}

#[test]
fn imhof_rejects_negative_threshold() {
    let spec = WeightedChiSquareSpec::new(vec![ChiSquareTerm::new(1.0, 2, 0.0)]).unwrap();
    assert!(imhof_ccdf(&spec, -1.0).is_err());
    assert_eq!(imhof_ccdf(&spec, 0.0).unwrap(), 1.0);
}
