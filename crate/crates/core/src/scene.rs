//! Array geometry, transmitted waveform and received-data synthesis.
//!
//! The received block is `X = β a_r(φ) a_tᴴ(φ) S + N` with `m` receive and
//! `p` transmit elements on half-wavelength uniform linear arrays, `n`
//! snapshots and white complex Gaussian noise whose real and imaginary parts
//! are standard normal.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Noise variance implied by unit-variance real and imaginary parts.
pub const NOISE_VARIANCE: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Hypothesis {
    H0,
    H1,
}

/// Experiment geometry and target reflectivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneConfig {
    m: usize,
    p: usize,
    n: usize,
    phi: f64,
    beta: Complex64,
}

impl SceneConfig {
    pub fn new(m: usize, p: usize, n: usize, phi: f64, beta: Complex64) -> Result<Self> {
        if m == 0 || p == 0 || n == 0 {
            return Err(Error::invalid(format!(
                "antenna and snapshot counts must be positive (m={m}, p={p}, n={n})"
            )));
        }
        if !(phi.is_finite() && phi.abs() < PI / 2.0) {
            return Err(Error::invalid(format!("beam angle {phi} outside (-π/2, π/2)")));
        }
        if !(beta.re.is_finite() && beta.im.is_finite()) {
            return Err(Error::invalid("reflectivity must be finite"));
        }
        Ok(Self { m, p, n, phi, beta })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// Total number of complex samples, `N = m·n`.
    pub fn entry_count(&self) -> usize {
        self.m * self.n
    }

    pub fn with_beta(mut self, beta: Complex64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_n(mut self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("snapshot count must be positive"));
        }
        self.n = n;
        Ok(self)
    }
}

/// Unit-modulus array response.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector(Vec<Complex64>);

impl SteeringVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Half-wavelength ULA response, entry `k` (0-based) is `exp(−ıπ k sin φ)`.
pub fn make_steering_vector(count: usize, phi: f64) -> Result<SteeringVector> {
    if count == 0 {
        return Err(Error::invalid("steering vector needs at least one element"));
    }
    let s = phi.sin();
    Ok(SteeringVector(
        (0..count)
            .map(|k| Complex64::from_polar(1.0, -PI * k as f64 * s))
            .collect(),
    ))
}

/// Orthogonal LFM waveform, `p×n`.
///
/// `S[k,l] = exp{ı2πk(l−1)/n + ıπ(l−1)²/n} / √p` with 1-based `k`, `l`.
/// Rows are orthogonal for `p ≤ n`, so `S Sᴴ = (n/p) I` and
/// `tr(Z Zᴴ) = ‖a_r‖²·a_tᴴ S Sᴴ a_t = m·n = N`.
pub fn make_lfm_waveform(p: usize, n: usize) -> Result<ComplexMatrix> {
    if p == 0 || n == 0 {
        return Err(Error::invalid(format!(
            "waveform dimensions must be positive, got {p}x{n}"
        )));
    }
    let scale = 1.0 / (p as f64).sqrt();
    let nf = n as f64;
    Ok(ComplexMatrix::from_fn(p, n, |row, col| {
        let k = (row + 1) as f64;
        let l = col as f64;
        // Reduce phases before evaluating to keep large-n entries accurate.
        let chirp = (l * l / nf).rem_euclid(2.0);
        let tone = (2.0 * k * l / nf).rem_euclid(2.0);
        Complex64::from_polar(scale, PI * (tone + chirp))
    }))
}

/// `Z = a_r(φ) a_tᴴ(φ) S`, `m×n`.
pub fn spatial_signature(config: &SceneConfig, waveform: &ComplexMatrix) -> Result<ComplexMatrix> {
    if waveform.rows() != config.p() || waveform.cols() != config.n() {
        return Err(Error::invalid(format!(
            "waveform is {}x{}, scene needs {}x{}",
            waveform.rows(),
            waveform.cols(),
            config.p(),
            config.n()
        )));
    }
    let a_t = make_steering_vector(config.p(), config.phi())?;
    let a_r = make_steering_vector(config.m(), config.phi())?;

    // a_tᴴ S is a 1×n row; Z is its outer product with a_r.
    let mut beam = vec![Complex64::new(0.0, 0.0); config.n()];
    for (k, at) in a_t.entries().iter().enumerate() {
        let at = at.conj();
        for (b, s) in beam.iter_mut().zip((0..config.n()).map(|l| waveform.get(k, l))) {
            *b += at * s;
        }
    }
    Ok(ComplexMatrix::from_fn(config.m(), config.n(), |r, c| {
        a_r.entries()[r] * beam[c]
    }))
}

/// Scene with its spatial signature precomputed for the LFM waveform.
#[derive(Debug, Clone)]
pub struct Scene {
    config: SceneConfig,
    signature: ComplexMatrix,
}

impl Scene {
    /// Fails when `p > n`: the LFM rows are then not orthogonal and
    /// `tr(Z Zᴴ) ≠ N`, which the performance theory relies on.
    pub fn lfm(config: SceneConfig) -> Result<Self> {
        if config.p() > config.n() {
            return Err(Error::invalid(format!(
                "LFM scene needs p ≤ n for orthogonal waveforms, got p={} n={}",
                config.p(),
                config.n()
            )));
        }
        reserve_scene(&config)?;
        let s = make_lfm_waveform(config.p(), config.n())?;
        let signature = spatial_signature(&config, &s)?;
        Ok(Self { config, signature })
    }

    pub fn config(&self) -> &SceneConfig {
        &self.config
    }

    pub fn signature(&self) -> &ComplexMatrix {
        &self.signature
    }
}

/// Checks up front that the waveform, signature and one data block fit in
/// memory, so an oversized scene is an error rather than an abort.
fn reserve_scene(config: &SceneConfig) -> Result<()> {
    let too_big = || Error::OutOfMemory(format!("a {}x{}x{} scene", config.m(), config.p(), config.n()));
    let entries = config
        .m()
        .checked_mul(2)
        .and_then(|v| v.checked_add(config.p()))
        .and_then(|v| v.checked_mul(config.n()))
        .ok_or_else(too_big)?;
    let mut probe: Vec<Complex64> = Vec::new();
    probe.try_reserve_exact(entries).map_err(|_| too_big())?;
    Ok(())
}

/// Draws `X` under the requested hypothesis with unit-variance noise parts.
pub fn synthesize_received<R: Rng + ?Sized>(
    config: &SceneConfig,
    signature: &ComplexMatrix,
    hypothesis: Hypothesis,
    rng: &mut R,
) -> Result<ComplexMatrix> {
    synthesize_received_with_noise(config, signature, hypothesis, config.beta(), 1.0, rng)
}

/// Like [`synthesize_received`] with an explicit β and noise standard
/// deviation per real dimension. `noise_std = 0` gives the noiseless block.
pub fn synthesize_received_with_noise<R: Rng + ?Sized>(
    config: &SceneConfig,
    signature: &ComplexMatrix,
    hypothesis: Hypothesis,
    beta: Complex64,
    noise_std: f64,
    rng: &mut R,
) -> Result<ComplexMatrix> {
    if signature.dims() != (config.m(), config.n()) {
        return Err(Error::invalid(format!(
            "signature is {}x{}, scene needs {}x{}",
            signature.rows(),
            signature.cols(),
            config.m(),
            config.n()
        )));
    }
    let gain = match hypothesis {
        Hypothesis::H0 => Complex64::new(0.0, 0.0),
        Hypothesis::H1 => beta,
    };
    let data = signature
        .entries()
        .iter()
        .map(|z| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            gain * z + Complex64::new(re, im) * noise_std
        })
        .collect();
    Ok(ComplexMatrix::from_raw(config.m(), config.n(), data))
}

fn sign(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// One-bit quantizer for a single sample; `sign(0) = +1`.
pub fn quantize_sample(x: Complex64) -> Complex64 {
    Complex64::new(sign(x.re), sign(x.im))
}

/// `Y = sign(Re X) + ı sign(Im X)`, entrywise.
pub fn quantize(x: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_raw(
        x.rows(),
        x.cols(),
        x.entries().iter().copied().map(quantize_sample).collect(),
    )
}

/// `|β| = sqrt(σ² · 10^(SNR/10))` with σ² = 2.
pub fn snr_db_to_beta_modulus(snr_db: f64) -> f64 {
    (NOISE_VARIANCE * 10f64.powf(snr_db / 10.0)).sqrt()
}

pub fn beta_modulus_to_snr_db(modulus: f64) -> f64 {
    10.0 * (modulus * modulus / NOISE_VARIANCE).log10()
}

/// How the reflectivity of each trial is drawn from the nominal β.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BetaMode {
    /// The nominal β, identical in every trial.
    Fixed,
    /// Nominal modulus with a uniformly random phase per trial.
    RandomPhase,
    /// Circular complex Gaussian with `E|β|² = |β_nominal|²`, redrawn per trial.
    Gaussian,
}

pub fn draw_beta<R: Rng + ?Sized>(nominal: Complex64, mode: BetaMode, rng: &mut R) -> Complex64 {
    match mode {
        BetaMode::Fixed => nominal,
        BetaMode::RandomPhase => {
            let theta = rng.random::<f64>() * 2.0 * PI;
            Complex64::from_polar(nominal.norm(), theta)
        }
        BetaMode::Gaussian => {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im) * (nominal.norm() / 2f64.sqrt())
        }
    }
}

/// Quadrature nodes `(β_j, w_j)` for averaging a theoretical quantity over
/// the per-trial law of β. Phases use the periodic midpoint rule; the
/// Gaussian modulus uses midpoints in `u` with `|β|² = −s² ln(1 − u)`.
pub fn beta_quadrature(nominal: Complex64, mode: BetaMode, nodes: usize) -> Vec<(Complex64, f64)> {
    let nodes = nodes.max(1);
    let phases = |modulus: f64, weight: f64| {
        (0..nodes).map(move |j| {
            let theta = 2.0 * PI * (j as f64 + 0.5) / nodes as f64;
            (Complex64::from_polar(modulus, theta), weight / nodes as f64)
        })
    };
    match mode {
        BetaMode::Fixed => vec![(nominal, 1.0)],
        BetaMode::RandomPhase => phases(nominal.norm(), 1.0).collect(),
        BetaMode::Gaussian => {
            let s2 = nominal.norm_sqr();
            (0..nodes)
                .flat_map(|k| {
                    let u = (k as f64 + 0.5) / nodes as f64;
                    let modulus = (-s2 * (-u).ln_1p()).sqrt();
                    phases(modulus, 1.0 / nodes as f64)
                })
                .collect()
        }
    }
}
