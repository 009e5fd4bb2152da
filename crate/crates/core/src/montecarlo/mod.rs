//! Seeded Monte Carlo engine.
//!
//! Trial `t` draws everything it needs (β, then the noise block) from a
//! ChaCha8 stream keyed by the master seed and positioned on stream `t`, so a
//! batch is bit-identical whatever the number of worker threads and whatever
//! order the trials run in.

mod ecdf;
mod enumerate;

pub use ecdf::{cvm_error, cvm_error_default, empirical_ccdf, empirical_pd, EmpiricalCdf, DEFAULT_CVM_POINTS};
pub use enumerate::{enumerate_exact, ExactDistribution, MAX_ENUMERATION_ENTRIES};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::detectors::{glrt_wilks_statistic, lrt_known_beta, rao_score, rao_statistic, Detector};
use crate::error::{Error, Result};
use crate::scene::{draw_beta, quantize, synthesize_received_with_noise, BetaMode, Hypothesis, Scene, SceneConfig};

/// Random stream of trial `trial` under `master_seed`.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialPlan {
    pub scene: SceneConfig,
    pub hypothesis: Hypothesis,
    pub trials: usize,
    pub master_seed: u64,
    pub detectors: Vec<Detector>,
    pub beta_mode: BetaMode,
}

impl TrialPlan {
    pub fn new(scene: SceneConfig, hypothesis: Hypothesis, trials: usize, master_seed: u64) -> Self {
        Self {
            scene,
            hypothesis,
            trials,
            master_seed,
            detectors: vec![Detector::Rao],
            beta_mode: BetaMode::Fixed,
        }
    }

    pub fn with_detectors(mut self, detectors: &[Detector]) -> Self {
        self.detectors = detectors.to_vec();
        self
    }

    pub fn with_beta_mode(mut self, mode: BetaMode) -> Self {
        self.beta_mode = mode;
        self
    }

    /// FNV-1a digest of everything that determines the sample values.
    pub fn digest(&self) -> u64 {
        let s = &self.scene;
        let mut h = Fnv1a::default();
        for v in [s.m() as u64, s.p() as u64, s.n() as u64] {
            h.write(v);
        }
        for v in [s.phi(), s.beta().re, s.beta().im] {
            h.write(v.to_bits());
        }
        h.write(self.hypothesis as u64);
        h.write(self.beta_mode as u64);
        h.write(self.master_seed);
        for d in &self.detectors {
            h.write(*d as u64);
        }
        h.finish()
    }
}

#[derive(Default)]
struct Fnv1a(u64);

impl Fnv1a {
    fn write(&mut self, v: u64) {
        if self.0 == 0 {
            self.0 = 0xcbf2_9ce4_8422_2325;
        }
        for byte in v.to_le_bytes() {
            self.0 ^= byte as u64;
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunMetadata {
    pub master_seed: u64,
    pub trials: usize,
    pub plan_digest: u64,
}

/// Statistic samples aligned across detectors: entry `t` of every column
/// comes from the same realization.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSamples {
    detectors: Vec<Detector>,
    columns: Vec<Vec<f64>>,
    metadata: RunMetadata,
}

impl TrialSamples {
    pub fn detectors(&self) -> &[Detector] {
        &self.detectors
    }

    pub fn get(&self, detector: Detector) -> Option<&[f64]> {
        self.detectors
            .iter()
            .position(|d| *d == detector)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn metadata(&self) -> RunMetadata {
        self.metadata
    }

    pub fn into_columns(self) -> Vec<(Detector, Vec<f64>)> {
        self.detectors.into_iter().zip(self.columns).collect()
    }
}

const MAX_DETECTORS: usize = 3;
const CHUNK: usize = 1 << 16;

pub fn run_trials(plan: &TrialPlan) -> Result<TrialSamples> {
    let scene = Scene::lfm(plan.scene)?;
    run_trials_on(plan, &scene)
}

/// Runs `plan` against a scene whose signature was built beforehand; the
/// scene's geometry must match `plan.scene`.
pub fn run_trials_on(plan: &TrialPlan, scene: &Scene) -> Result<TrialSamples> {
    let cfg = &plan.scene;
    if (scene.config().m(), scene.config().n(), scene.config().p()) != (cfg.m(), cfg.n(), cfg.p()) {
        return Err(Error::invalid("scene geometry does not match the trial plan"));
    }
    if plan.detectors.is_empty() || plan.detectors.len() > MAX_DETECTORS {
        return Err(Error::invalid(format!(
            "between 1 and {MAX_DETECTORS} detectors per plan, got {}",
            plan.detectors.len()
        )));
    }
    let metadata = RunMetadata {
        master_seed: plan.master_seed,
        trials: plan.trials,
        plan_digest: plan.digest(),
    };

    let z = scene.signature();
    let needs_bits = plan
        .detectors
        .iter()
        .any(|d| matches!(d, Detector::Rao | Detector::LrtKnownBeta));
    let evaluate = |t: usize| -> Result<[f64; MAX_DETECTORS]> {
        let mut rng = trial_rng(plan.master_seed, t as u64);
        let beta = draw_beta(cfg.beta(), plan.beta_mode, &mut rng);
        let x = synthesize_received_with_noise(cfg, z, plan.hypothesis, beta, 1.0, &mut rng)?;
        let y = needs_bits.then(|| quantize(&x));
        let mut row = [f64::NAN; MAX_DETECTORS];
        for (slot, d) in row.iter_mut().zip(&plan.detectors) {
            *slot = match d {
                Detector::Rao => rao_statistic(y.as_ref().expect("quantized"), z)?,
                Detector::GlrtWilks => glrt_wilks_statistic(&x, z)?,
                Detector::LrtKnownBeta => lrt_known_beta(y.as_ref().expect("quantized"), z, beta)?,
            };
        }
        Ok(row)
    };

    // Chunked so that an allocation failure reports how far the batch got.
    let mut rows: Vec<[f64; MAX_DETECTORS]> = Vec::new();
    for start in (0..plan.trials).step_by(CHUNK) {
        let end = (start + CHUNK).min(plan.trials);
        let chunk: Vec<[f64; MAX_DETECTORS]> =
            (start..end).into_par_iter().map(evaluate).collect::<Result<_>>()?;
        rows.try_reserve(chunk.len())
            .map_err(|_| Error::PartialResults { completed: rows.len(), requested: plan.trials })?;
        rows.extend(chunk);
    }

    let mut columns = Vec::with_capacity(plan.detectors.len());
    for i in 0..plan.detectors.len() {
        let mut col = Vec::new();
        col.try_reserve_exact(plan.trials)
            .map_err(|_| Error::PartialResults { completed: rows.len(), requested: plan.trials })?;
        col.extend(rows.iter().map(|r| r[i]));
        columns.push(col);
    }
    Ok(TrialSamples { detectors: plan.detectors.clone(), columns, metadata })
}

/// Score vectors `√(2/π)(Re zᴴy, Im zᴴy)` of the one-bit data, one per trial.
pub fn run_score_trials(plan: &TrialPlan) -> Result<Vec<[f64; 2]>> {
    let scene = Scene::lfm(plan.scene)?;
    let cfg = &plan.scene;
    let z = scene.signature();
    (0..plan.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(plan.master_seed, t as u64);
            let beta = draw_beta(cfg.beta(), plan.beta_mode, &mut rng);
            let x = synthesize_received_with_noise(cfg, z, plan.hypothesis, beta, 1.0, &mut rng)?;
            rao_score(&quantize(&x), z)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn plan(trials: usize) -> TrialPlan {
        let cfg = SceneConfig::new(2, 2, 8, -0.5, Complex64::new(0.2, 0.1)).unwrap();
        TrialPlan::new(cfg, Hypothesis::H1, trials, 42)
            .with_detectors(&[Detector::Rao, Detector::GlrtWilks, Detector::LrtKnownBeta])
            .with_beta_mode(BetaMode::RandomPhase)
    }

    #[test]
    fn zero_trials_gives_empty_columns() {
        let s = run_trials(&plan(0)).unwrap();
        assert!(s.get(Detector::Rao).unwrap().is_empty());
        assert_eq!(s.metadata().trials, 0);
    }

    #[test]
    fn same_plan_is_bit_identical() {
        let a = run_trials(&plan(500)).unwrap();
        let b = run_trials(&plan(500)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn trials_do_not_depend_on_batch_size() {
        let long = run_trials(&plan(300)).unwrap();
        let short = run_trials(&plan(100)).unwrap();
        assert_eq!(&long.get(Detector::Rao).unwrap()[..100], short.get(Detector::Rao).unwrap());
    }

    #[test]
    fn independent_of_worker_count() {
        let p = plan(400);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| run_trials(&p)).unwrap();
        let b = four.install(|| run_trials(&p)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn digest_changes_with_plan() {
        let p = plan(10);
        let mut q = p.clone();
        q.master_seed += 1;
        assert_ne!(p.digest(), q.digest());
        assert_eq!(p.digest(), plan(10).digest());
    }

    #[test]
    fn rejects_bad_detector_lists() {
        let mut p = plan(5);
        p.detectors.clear();
        assert!(run_trials(&p).is_err());
    }
}
