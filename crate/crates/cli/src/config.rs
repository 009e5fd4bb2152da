//! Experiment configuration: a JSON document mirroring every knob of a run,
//! with command-line flags layered on top.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use onebit_core::detectors::Detector;
use onebit_core::scene::{snr_db_to_beta_modulus, BetaMode, SceneConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    PfaCurve,
    PdCurve,
    SweepSnr,
    SweepN,
    Gof,
    Loss,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::PfaCurve => "pfa-curve",
            Command::PdCurve => "pd-curve",
            Command::SweepSnr => "sweep-snr",
            Command::SweepN => "sweep-n",
            Command::Gof => "gof",
            Command::Loss => "loss",
        }
    }
}

/// Per-trial reflectivity law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BetaModeArg {
    /// Modulus fixed by the SNR, phase uniform per trial.
    FixedMod,
    /// Circular complex Gaussian with mean power set by the SNR.
    Gaussian,
    /// Modulus fixed by the SNR, phase fixed at `beta_phase`.
    FixedPhase,
}

impl BetaModeArg {
    pub fn to_core(self) -> BetaMode {
        match self {
            BetaModeArg::FixedMod => BetaMode::RandomPhase,
            BetaModeArg::Gaussian => BetaMode::Gaussian,
            BetaModeArg::FixedPhase => BetaMode::Fixed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorArg {
    Rao,
    GlrtWilks,
    LrtKnownBeta,
}

impl DetectorArg {
    pub fn to_core(self) -> Detector {
        match self {
            DetectorArg::Rao => Detector::Rao,
            DetectorArg::GlrtWilks => Detector::GlrtWilks,
            DetectorArg::LrtKnownBeta => Detector::LrtKnownBeta,
        }
    }
}

/// Evenly spaced thresholds `start, …, stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl ThresholdGrid {
    pub fn values(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.start],
            k => (0..k)
                .map(|i| self.start + (self.stop - self.start) * i as f64 / (k - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub command: Option<Command>,
    pub m: usize,
    pub p: usize,
    pub n: usize,
    /// Block lengths for `sweep-n`.
    pub n_values: Vec<usize>,
    /// Direction of arrival in radians.
    pub phi: f64,
    pub snr_db: Vec<f64>,
    pub pfa: f64,
    pub trials: usize,
    pub seed: u64,
    pub beta_mode: BetaModeArg,
    /// Phase of β in radians when `beta_mode` is `fixed-phase`.
    pub beta_phase: f64,
    pub detectors: Vec<DetectorArg>,
    /// Threshold grid of the curve commands; chosen from the scene when absent.
    pub thresholds: Option<ThresholdGrid>,
    /// Order statistics used by the Cramér–von Mises error.
    pub cvm_points: usize,
    /// Quadrature nodes per dimension when averaging theory over random β.
    pub beta_nodes: usize,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: None,
            m: 4,
            p: 4,
            n: 32,
            n_values: vec![16, 32, 64, 128, 256, 512, 1024, 2048],
            phi: -PI / 3.0,
            snr_db: vec![-13.0],
            pfa: 1e-3,
            trials: 100_000,
            seed: 1,
            beta_mode: BetaModeArg::FixedMod,
            beta_phase: 0.0,
            detectors: vec![DetectorArg::Rao, DetectorArg::GlrtWilks, DetectorArg::LrtKnownBeta],
            thresholds: None,
            cvm_points: 1000,
            beta_nodes: 8,
            out: None,
        }
    }
}

/// Marker that opens the metadata comment line of every CSV this tool writes.
pub const METADATA_PREFIX: &str = "# ";

impl ExperimentConfig {
    /// Reads a JSON config, or the embedded config of a CSV written by this
    /// tool, which reproduces that table.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_owned(), source })?;
        let config_err = |source| CliError::Config { path: path.to_owned(), source };
        match text.strip_prefix(METADATA_PREFIX) {
            Some(rest) => {
                let line = rest.lines().next().unwrap_or_default();
                let meta: serde_json::Value = serde_json::from_str(line).map_err(config_err)?;
                let embedded = meta.get("config").cloned().unwrap_or(serde_json::Value::Null);
                serde_json::from_value(embedded).map_err(config_err)
            }
            None => serde_json::from_str(&text).map_err(config_err),
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        let invalid = |msg: String| Err(CliError::Invalid(msg));
        if self.m == 0 || self.p == 0 || self.n == 0 {
            return invalid(format!("m, p, n must be ≥ 1, got {}, {}, {}", self.m, self.p, self.n));
        }
        if !(self.pfa > 0.0 && self.pfa < 1.0) {
            return invalid(format!("pfa must lie in (0, 1), got {}", self.pfa));
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return invalid("snr_db values must be finite".into());
        }
        if !self.beta_phase.is_finite() {
            return invalid("beta_phase must be finite".into());
        }
        if self.cvm_points == 0 {
            return invalid("cvm_points must be ≥ 1".into());
        }
        if self.beta_nodes == 0 {
            return invalid("beta_nodes must be ≥ 1".into());
        }
        if let Some(g) = &self.thresholds {
            if !(g.start >= 0.0 && g.stop >= g.start && g.stop.is_finite()) || g.points == 0 {
                return invalid(format!("threshold grid needs 0 ≤ start ≤ stop and points ≥ 1, got {g:?}"));
            }
        }
        SceneConfig::new(self.m, self.p, self.n, self.phi, Complex64::new(0.0, 0.0))?;
        Ok(())
    }

    pub fn scene(&self, n: usize, snr_db: Option<f64>) -> CliResult<SceneConfig> {
        Ok(SceneConfig::new(self.m, self.p, n, self.phi, self.nominal_beta(snr_db))?)
    }

    /// Nominal β for an SNR; `None` is the null hypothesis.
    pub fn nominal_beta(&self, snr_db: Option<f64>) -> Complex64 {
        match snr_db {
            Some(s) => Complex64::from_polar(snr_db_to_beta_modulus(s), self.beta_phase),
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn uses(&self, detector: DetectorArg) -> bool {
        self.detectors.contains(&detector)
    }
}

/// Flags given on the command line; each one present replaces the file value.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Receive antennas.
    #[arg(long)]
    pub m: Option<usize>,
    /// Transmit antennas.
    #[arg(long)]
    pub p: Option<usize>,
    /// Snapshots per block.
    #[arg(long)]
    pub n: Option<usize>,
    /// Direction of arrival in radians.
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
    /// SNR in dB; repeat for several points.
    #[arg(long = "snr-db", allow_negative_numbers = true)]
    pub snr_db: Vec<f64>,
    /// Design false-alarm probability.
    #[arg(long)]
    pub pfa: Option<f64>,
    /// Monte Carlo trials per point; 0 gives theory only.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "beta-mode", value_enum)]
    pub beta_mode: Option<BetaModeArg>,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON config, or a CSV previously written by this tool.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Overrides {
    pub fn resolve(&self, command: Command) -> CliResult<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        cfg.command = Some(command);
        if let Some(v) = self.m {
            cfg.m = v;
        }
        if let Some(v) = self.p {
            cfg.p = v;
        }
        if let Some(v) = self.n {
            cfg.n = v;
        }
        if let Some(v) = self.phi {
            cfg.phi = v;
        }
        if !self.snr_db.is_empty() {
            cfg.snr_db = self.snr_db.clone();
        }
        if let Some(v) = self.pfa {
            cfg.pfa = v;
        }
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.beta_mode {
            cfg.beta_mode = v;
        }
        if let Some(v) = &self.out {
            cfg.out = Some(v.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
