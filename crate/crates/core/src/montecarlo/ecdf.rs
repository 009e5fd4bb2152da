use crate::error::{Error, Result};

/// Number of equally ranked order statistics used as the default CvM grid.
pub const DEFAULT_CVM_POINTS: usize = 1000;

/// Right-continuous empirical distribution of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("empirical CDF needs at least one sample"));
        }
        if samples.iter().any(|v| v.is_nan()) {
            return Err(Error::invalid("samples contain NaN"));
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { sorted: samples })
    }

    pub fn from_slice(samples: &[f64]) -> Result<Self> {
        Self::new(samples.to_vec())
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// `F(x) = #{samples ≤ x} / count`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|v| *v <= x) as f64 / self.len() as f64
    }

    /// `#{samples > x} / count`.
    pub fn ccdf(&self, x: f64) -> f64 {
        (self.len() - self.sorted.partition_point(|v| *v <= x)) as f64 / self.len() as f64
    }

    /// Smallest sample value `v` with `F(v) ≥ q`.
    pub fn quantile(&self, q: f64) -> f64 {
        let n = self.len();
        let rank = (q.clamp(0.0, 1.0) * n as f64).ceil() as usize;
        self.sorted[rank.clamp(1, n) - 1]
    }

    /// `k` order statistics at equally spaced ranks (all samples when fewer).
    pub fn order_statistic_grid(&self, k: usize) -> Vec<f64> {
        let n = self.len();
        if k == 0 {
            return Vec::new();
        }
        if n <= k {
            return self.sorted.clone();
        }
        (0..k)
            .map(|j| {
                let rank = ((j as f64 + 0.5) * n as f64 / k as f64).floor() as usize;
                self.sorted[rank.min(n - 1)]
            })
            .collect()
    }
}

/// Fraction of samples strictly above `x`.
pub fn empirical_ccdf(samples: &[f64], x: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::invalid("no samples"));
    }
    Ok(samples.iter().filter(|v| **v > x).count() as f64 / samples.len() as f64)
}

/// Detection (or false-alarm) rate `Pr{T > γ}` of a statistic sample.
pub fn empirical_pd(samples: &[f64], gamma: f64) -> Result<f64> {
    empirical_ccdf(samples, gamma)
}

/// Cramér–von Mises error `(1/K) Σ |F(c_i) − F̂(c_i)|²` on `grid`.
pub fn cvm_error(empirical: &EmpiricalCdf, model_cdf: impl Fn(f64) -> f64, grid: &[f64]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::invalid("CvM grid is empty"));
    }
    let total: f64 = grid
        .iter()
        .map(|&c| (empirical.cdf(c) - model_cdf(c)).powi(2))
        .sum();
    Ok(total / grid.len() as f64)
}

/// [`cvm_error`] on [`DEFAULT_CVM_POINTS`] equally ranked order statistics.
pub fn cvm_error_default(empirical: &EmpiricalCdf, model_cdf: impl Fn(f64) -> f64) -> Result<f64> {
    let grid = empirical.order_statistic_grid(DEFAULT_CVM_POINTS);
    cvm_error(empirical, model_cdf, &grid)
}
