//! Exact law of the one-bit score by enumerating every sign pattern.
//!
//! Each entry contributes one of four `(r_i, s_i)` outcomes with probability
//! `Q[−r_i(a u_i − b v_i)] · Q[−s_i(a v_i + b u_i)]`; the `4^N` products give
//! the exact distribution of `w` and of the Rao statistic `T = |w|²`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::theory::q_function;

pub const MAX_ENUMERATION_ENTRIES: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    /// `(T, probability)` for every sign pattern, sorted by `T`.
    pub support: Vec<(f64, f64)>,
    pub mean: [f64; 2],
    pub covariance: [[f64; 2]; 2],
    pub total_mass: f64,
}

impl ExactDistribution {
    /// `Pr{T > x}`.
    pub fn ccdf(&self, x: f64) -> f64 {
        let start = self.support.partition_point(|(t, _)| *t <= x);
        self.support[start..].iter().map(|(_, p)| p).sum()
    }
}

struct Outcome {
    prob: f64,
    w1: f64,
    w2: f64,
}

pub fn enumerate_exact(signature: &ComplexMatrix, beta: Complex64) -> Result<ExactDistribution> {
    let entries = signature.len();
    if entries > MAX_ENUMERATION_ENTRIES {
        return Err(Error::TooLarge { entries, limit: MAX_ENUMERATION_ENTRIES });
    }
    let energy = signature.energy();
    if energy <= 0.0 {
        return Err(Error::DegenerateScene);
    }
    let scale = energy.sqrt();
    let (a, b) = (beta.re, beta.im);

    let per_entry: Vec<[Outcome; 4]> = signature
        .entries()
        .iter()
        .map(|z| {
            let (u, v) = (z.re, z.im);
            let re_mean = a * u - b * v;
            let im_mean = a * v + b * u;
            let outcome = |r: f64, s: f64| Outcome {
                prob: q_function(-r * re_mean) * q_function(-s * im_mean),
                w1: (r * u + s * v) / scale,
                w2: (s * u - r * v) / scale,
            };
            [outcome(1.0, 1.0), outcome(1.0, -1.0), outcome(-1.0, 1.0), outcome(-1.0, -1.0)]
        })
        .collect();

    let mut support = Vec::with_capacity(1 << (2 * entries));
    let mut mean = [0.0; 2];
    let mut second = [[0.0; 2]; 2];
    let mut total_mass = 0.0;
    let mut stack = vec![(0usize, 1.0f64, 0.0f64, 0.0f64)];
    while let Some((depth, prob, w1, w2)) = stack.pop() {
        if depth == entries {
            support.push((w1 * w1 + w2 * w2, prob));
            total_mass += prob;
            mean[0] += prob * w1;
            mean[1] += prob * w2;
            second[0][0] += prob * w1 * w1;
            second[0][1] += prob * w1 * w2;
            second[1][1] += prob * w2 * w2;
            continue;
        }
        for o in &per_entry[depth] {
            stack.push((depth + 1, prob * o.prob, w1 + o.w1, w2 + o.w2));
        }
    }
    support.sort_by(|x, y| x.0.total_cmp(&y.0));

    let c11 = second[0][0] - mean[0] * mean[0];
    let c22 = second[1][1] - mean[1] * mean[1];
    let c12 = second[0][1] - mean[0] * mean[1];
    Ok(ExactDistribution {
        support,
        mean,
        covariance: [[c11, c12], [c12, c22]],
        total_mass,
    })
}
