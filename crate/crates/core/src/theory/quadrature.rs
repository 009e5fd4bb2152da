//! Adaptive Gauss–Kronrod integration and Wynn's ε extrapolation.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

// 21-point Kronrod nodes (non-negative half, descending) and weights, with the
// embedded 10-point Gauss weights on the odd-indexed nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_850_074_760,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// One G10/K21 panel: `(kronrod estimate, |kronrod − gauss|)`.
pub fn gauss_kronrod_21(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Globally adaptive bisection on `[a, b]` split into `initial_panels` equal
/// pieces, refining the worst panel until the summed error estimate is below
/// `max(abs_tol, rel_tol·|value|)`.
pub fn integrate_adaptive(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    initial_panels: usize,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<Integral> {
    let initial_panels = initial_panels.max(1);
    let width = (b - a) / initial_panels as f64;
    let mut panels: Vec<(f64, f64, f64, f64)> = (0..initial_panels)
        .map(|i| {
            let lo = a + width * i as f64;
            let hi = if i + 1 == initial_panels { b } else { lo + width };
            let (v, e) = gauss_kronrod_21(&mut f, lo, hi);
            (lo, hi, v, e)
        })
        .collect();
    let mut evaluations = 21 * initial_panels;

    loop {
        let value: f64 = panels.iter().map(|p| p.2).sum();
        let error: f64 = panels.iter().map(|p| p.3).sum();
        if !value.is_finite() {
            return Err(Error::NumericalFailure {
                what: "integrand produced a non-finite value".into(),
                estimate: value,
                error,
                evaluations,
            });
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Integral { value, error, evaluations });
        }
        if panels.len() >= max_panels {
            return Err(Error::NumericalFailure {
                what: format!("adaptive quadrature did not converge on [{a}, {b}]"),
                estimate: value,
                error,
                evaluations,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let (lo, hi, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            // Panel can no longer be bisected in floating point.
            let value: f64 = panels.iter().map(|p| p.2).sum();
            return Err(Error::NumericalFailure {
                what: format!("panel [{lo}, {hi}] collapsed during refinement"),
                estimate: value,
                error,
                evaluations,
            });
        }
        let (vl, el) = gauss_kronrod_21(&mut f, lo, mid);
        let (vr, er) = gauss_kronrod_21(&mut f, mid, hi);
        evaluations += 42;
        panels.push((lo, mid, vl, el));
        panels.push((mid, hi, vr, er));
    }
}

/// Wynn's ε algorithm over a growing sequence of partial sums.
///
/// Push partial sums one at a time; [`WynnEpsilon::estimate`] returns the
/// latest even-column extrapolant.
#[derive(Debug, Default, Clone)]
pub struct WynnEpsilon {
    // Last anti-diagonal of the ε table: e[k] = ε_k^{(n-k)}.
    diagonal: Vec<f64>,
    estimates: Vec<f64>,
}

impl WynnEpsilon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, partial_sum: f64) -> f64 {
        let mut next = Vec::with_capacity(self.diagonal.len() + 1);
        next.push(partial_sum);
        // ε_{-1} ≡ 0.
        let mut prev_lower = 0.0;
        for k in 0..self.diagonal.len() {
            let delta = next[k] - self.diagonal[k];
            let value = if delta == 0.0 || !delta.is_finite() {
                f64::INFINITY
            } else {
                prev_lower + 1.0 / delta
            };
            prev_lower = self.diagonal[k];
            next.push(value);
        }
        self.diagonal = next;

        // Even columns hold the extrapolants; take the deepest finite one.
        let estimate = self
            .diagonal
            .iter()
            .enumerate()
            .rev()
            .filter(|(k, v)| k % 2 == 0 && v.is_finite())
            .map(|(_, v)| *v)
            .next()
            .unwrap_or(partial_sum);
        self.estimates.push(estimate);
        estimate
    }

    pub fn estimates(&self) -> &[f64] {
        &self.estimates
    }
}
