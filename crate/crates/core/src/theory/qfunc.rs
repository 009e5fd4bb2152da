//! Gaussian tail probability and its logarithm.

use std::f64::consts::{LN_2, PI, SQRT_2};

/// `Q(x) = Pr{N(0,1) > x}`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Above this argument `ln Q` switches to the asymptotic Mills-ratio series.
const LOG_Q_ASYMPTOTIC: f64 = 30.0;

/// `ln Q(x)`, finite for every finite `x`.
///
/// For `x ≥ 30` the tail is below `1e-197` and is evaluated as
/// `−x²/2 − ln(x√(2π)) + ln(1 − 1/x² + 3/x⁴ − 15/x⁶ + 105/x⁸)`, which keeps the
/// value finite far past the point where `Q` itself underflows.
pub fn log_q(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        // Q(x) = 1 − Q(−x), with Q(−x) ≤ 1/2.
        return (-q_function(-x)).ln_1p();
    }
    if x == 0.0 {
        return -LN_2;
    }
    if x < LOG_Q_ASYMPTOTIC {
        return q_function(x).ln();
    }
    let t = 1.0 / (x * x);
    let series = 1.0 - t * (1.0 - 3.0 * t * (1.0 - 5.0 * t * (1.0 - 7.0 * t)));
    -0.5 * x * x - (x * (2.0 * PI).sqrt()).ln() + series.ln()
}
