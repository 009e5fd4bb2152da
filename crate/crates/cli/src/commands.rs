//! The experiment commands. Each returns a [`Report`] whose table columns are
//! fixed per command:
//!
//! | command     | columns |
//! |-------------|---------|
//! | `pfa-curve` | threshold, empirical_pfa_rao, theory_pfa, empirical_pfa_glrt_wilks, theory_chi2_2 |
//! | `pd-curve`  | threshold, empirical_pd, pd_imhof, pd_lowsnr, pd_glrt_wilks |
//! | `sweep-snr` | snr_db, pd_rao_empirical, pd_rao_imhof, pd_glrt_empirical, pd_glrt_theory, pd_lrt_empirical |
//! | `sweep-n`   | n, pd_rao, pd_glrt, pd_glrt_shifted, pd_rao_imhof, pd_glrt_theory |
//! | `gof`       | snr_db, cvm_rao_imhof, cvm_rao_lowsnr, cvm_glrt_wilks |
//! | `loss`      | loss_db, sample_factor, log2_sample_factor |
//!
//! Empirical columns are empty when `trials` is 0.

use num_complex::Complex64;
use onebit_core::detectors::Detector;
use onebit_core::montecarlo::{run_trials_on, EmpiricalCdf, TrialPlan, TrialSamples};
use onebit_core::scene::{beta_quadrature, Hypothesis, Scene};
use onebit_core::theory::{
    central_chi2_ccdf, glrt_pd_averaged, loss_db, rao_pd_lowsnr_averaged, rao_pfa, rao_threshold,
    sample_compensation_factor, RaoImhofModel,
};

use crate::config::{Command, DetectorArg, ExperimentConfig, ThresholdGrid};
use crate::error::{CliError, CliResult};
use crate::table::{Report, Table};

pub fn run(cfg: &ExperimentConfig) -> CliResult<Report> {
    match cfg.command {
        Some(Command::PfaCurve) => cmd_pfa_curve(cfg),
        Some(Command::PdCurve) => cmd_pd_curve(cfg),
        Some(Command::SweepSnr) => cmd_sweep_snr(cfg),
        Some(Command::SweepN) => cmd_sweep_n(cfg),
        Some(Command::Gof) => cmd_gof(cfg),
        Some(Command::Loss) => Ok(cmd_loss()),
        None => Err(CliError::Invalid("config names no command".into())),
    }
}

const PD_LEVEL: f64 = 0.5;
const PFA_GRID: ThresholdGrid = ThresholdGrid { start: 0.0, stop: 30.0, points: 61 };
/// Bracket searched for theoretical Pd = 0.5 crossings, in dB.
const SNR_SEARCH: (f64, f64) = (-60.0, 30.0);

fn single_snr(cfg: &ExperimentConfig) -> CliResult<f64> {
    match cfg.snr_db.as_slice() {
        [s] => Ok(*s),
        other => Err(CliError::Invalid(format!(
            "{} needs exactly one SNR, got {}",
            cfg.command.map_or("this command", Command::name),
            other.len()
        ))),
    }
}

fn theory_nodes(cfg: &ExperimentConfig, snr_db: f64) -> Vec<(Complex64, f64)> {
    beta_quadrature(cfg.nominal_beta(Some(snr_db)), cfg.beta_mode.to_core(), cfg.beta_nodes)
}

/// Runs the selected detectors; `None` when there is nothing to simulate.
fn simulate(
    cfg: &ExperimentConfig,
    scene: &Scene,
    snr_db: Option<f64>,
    hypothesis: Hypothesis,
    wanted: &[DetectorArg],
) -> CliResult<Option<TrialSamples>> {
    let detectors: Vec<Detector> = wanted.iter().filter(|d| cfg.uses(**d)).map(|d| d.to_core()).collect();
    if cfg.trials == 0 || detectors.is_empty() {
        return Ok(None);
    }
    let plan = TrialPlan::new(cfg.scene(scene.config().n(), snr_db)?, hypothesis, cfg.trials, cfg.seed)
        .with_detectors(&detectors)
        .with_beta_mode(cfg.beta_mode.to_core());
    Ok(Some(run_trials_on(&plan, scene)?))
}

fn ecdf_of(samples: &Option<TrialSamples>, detector: Detector) -> CliResult<Option<EmpiricalCdf>> {
    match samples.as_ref().and_then(|s| s.get(detector)) {
        Some(column) => Ok(Some(EmpiricalCdf::from_slice(column)?)),
        None => Ok(None),
    }
}

fn ccdf_or_nan(ecdf: &Option<EmpiricalCdf>, x: f64) -> f64 {
    ecdf.as_ref().map_or(f64::NAN, |e| e.ccdf(x))
}

/// CvM error of `ecdf` against a model given by its ccdf, evaluated once per
/// grid point.
fn cvm_against_ccdf(
    cfg: &ExperimentConfig,
    ecdf: &EmpiricalCdf,
    model_ccdf: impl Fn(&[f64]) -> CliResult<Vec<f64>>,
) -> CliResult<f64> {
    let grid = ecdf.order_statistic_grid(cfg.cvm_points);
    let tail = model_ccdf(&grid)?;
    let total: f64 = grid.iter().zip(&tail).map(|(&c, &q)| (ecdf.cdf(c) - (1.0 - q)).powi(2)).sum();
    Ok(total / grid.len() as f64)
}

fn pointwise(f: impl Fn(f64) -> onebit_core::Result<f64>) -> impl Fn(&[f64]) -> CliResult<Vec<f64>> {
    move |grid| grid.iter().map(|&x| Ok(f(x)?)).collect()
}

/// CvM errors `[imhof, lowsnr, glrt]`; the null hypothesis when `snr_db` is
/// `None`. NaN where the detector was not simulated.
fn fit_errors(cfg: &ExperimentConfig, scene: &Scene, snr_db: Option<f64>) -> CliResult<[f64; 3]> {
    let hypothesis = if snr_db.is_some() { Hypothesis::H1 } else { Hypothesis::H0 };
    let samples = simulate(cfg, scene, snr_db, hypothesis, &[DetectorArg::Rao, DetectorArg::GlrtWilks])?;
    let rao = ecdf_of(&samples, Detector::Rao)?;
    let glrt = ecdf_of(&samples, Detector::GlrtWilks)?;
    let entries = scene.config().entry_count();
    let mut out = [f64::NAN; 3];
    match snr_db {
        None => {
            if let Some(e) = &rao {
                let v = cvm_against_ccdf(cfg, e, pointwise(rao_pfa))?;
                out[0] = v;
                out[1] = v;
            }
            if let Some(e) = &glrt {
                out[2] = cvm_against_ccdf(cfg, e, pointwise(|x| Ok(central_chi2_ccdf(2.0, x))))?;
            }
        }
        Some(snr) => {
            let nodes = theory_nodes(cfg, snr);
            if let Some(e) = &rao {
                let model = RaoImhofModel::new(scene.signature(), &nodes)?;
                out[0] = cvm_against_ccdf(cfg, e, |g| Ok(model.pd_grid(g)?))?;
                out[1] = cvm_against_ccdf(cfg, e, pointwise(|x| rao_pd_lowsnr_averaged(entries, &nodes, x)))?;
            }
            if let Some(e) = &glrt {
                out[2] = cvm_against_ccdf(cfg, e, pointwise(|x| glrt_pd_averaged(entries, &nodes, x)))?;
            }
        }
    }
    Ok(out)
}

pub fn cmd_pfa_curve(cfg: &ExperimentConfig) -> CliResult<Report> {
    let scene = Scene::lfm(cfg.scene(cfg.n, None)?)?;
    let gamma_pfa = rao_threshold(cfg.pfa)?;
    let mut grid = cfg.thresholds.unwrap_or(PFA_GRID).values();
    grid.push(gamma_pfa);
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let samples = simulate(cfg, &scene, None, Hypothesis::H0, &[DetectorArg::Rao, DetectorArg::GlrtWilks])?;
    let rao = ecdf_of(&samples, Detector::Rao)?;
    let glrt = ecdf_of(&samples, Detector::GlrtWilks)?;

    let mut table = Table::new(&[
        "threshold",
        "empirical_pfa_rao",
        "theory_pfa",
        "empirical_pfa_glrt_wilks",
        "theory_chi2_2",
    ]);
    for &g in &grid {
        table.push(vec![g, ccdf_or_nan(&rao, g), rao_pfa(g)?, ccdf_or_nan(&glrt, g), central_chi2_ccdf(2.0, g)]);
    }

    let mut report = Report::new(table);
    report.note("threshold_at_pfa", gamma_pfa);
    report.note("empirical_pfa_rao_at_threshold", ccdf_or_nan(&rao, gamma_pfa));
    report.note("empirical_pfa_glrt_wilks_at_threshold", ccdf_or_nan(&glrt, gamma_pfa));
    let cvm = |e: &Option<EmpiricalCdf>, f: fn(f64) -> onebit_core::Result<f64>| -> CliResult<f64> {
        e.as_ref().map_or(Ok(f64::NAN), |e| cvm_against_ccdf(cfg, e, pointwise(f)))
    };
    report.note("cvm_rao", cvm(&rao, rao_pfa)?);
    report.note("cvm_glrt_wilks", cvm(&glrt, |x| Ok(central_chi2_ccdf(2.0, x)))?);
    Ok(report)
}

/// Upper end of the default threshold grid: well past the bulk of the GLRT
/// statistic, whose non-centrality is the larger of the two.
fn default_pd_grid(cfg: &ExperimentConfig, entries: usize, snr_db: f64) -> ThresholdGrid {
    let delta2 = entries as f64 * cfg.nominal_beta(Some(snr_db)).norm_sqr();
    let upper = (2.0 + delta2 + 8.0 * (4.0 + 4.0 * delta2).sqrt()).max(30.0).ceil();
    ThresholdGrid { start: 0.0, stop: upper, points: 101 }
}

pub fn cmd_pd_curve(cfg: &ExperimentConfig) -> CliResult<Report> {
    let snr = single_snr(cfg)?;
    let scene = Scene::lfm(cfg.scene(cfg.n, Some(snr))?)?;
    let entries = scene.config().entry_count();
    let nodes = theory_nodes(cfg, snr);
    let model = RaoImhofModel::new(scene.signature(), &nodes)?;
    let gamma_pfa = rao_threshold(cfg.pfa)?;
    let mut grid = cfg.thresholds.unwrap_or_else(|| default_pd_grid(cfg, entries, snr)).values();
    grid.push(gamma_pfa);
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let samples = simulate(cfg, &scene, Some(snr), Hypothesis::H1, &[DetectorArg::Rao, DetectorArg::GlrtWilks])?;
    let rao = ecdf_of(&samples, Detector::Rao)?;
    let glrt = ecdf_of(&samples, Detector::GlrtWilks)?;

    let imhof = model.pd_grid(&grid)?;
    let mut table = Table::new(&["threshold", "empirical_pd", "pd_imhof", "pd_lowsnr", "pd_glrt_wilks"]);
    for (&g, &pd_imhof) in grid.iter().zip(&imhof) {
        table.push(vec![
            g,
            ccdf_or_nan(&rao, g),
            pd_imhof,
            rao_pd_lowsnr_averaged(entries, &nodes, g)?,
            glrt_pd_averaged(entries, &nodes, g)?,
        ]);
    }

    let mut report = Report::new(table);
    report.note("snr_db", snr);
    report.note("threshold_at_pfa", gamma_pfa);
    report.note("empirical_pd_at_threshold", ccdf_or_nan(&rao, gamma_pfa));
    report.note("pd_imhof_at_threshold", model.pd(gamma_pfa)?);
    report.note("pd_lowsnr_at_threshold", rao_pd_lowsnr_averaged(entries, &nodes, gamma_pfa)?);
    report.note("empirical_pd_glrt_wilks_at_threshold", ccdf_or_nan(&glrt, gamma_pfa));
    report.note("pd_glrt_wilks_at_threshold", glrt_pd_averaged(entries, &nodes, gamma_pfa)?);

    let (mut c_imhof, mut c_low, mut c_glrt) = (f64::NAN, f64::NAN, f64::NAN);
    if let Some(e) = &rao {
        c_imhof = cvm_against_ccdf(cfg, e, |g| Ok(model.pd_grid(g)?))?;
        c_low = cvm_against_ccdf(cfg, e, pointwise(|x| rao_pd_lowsnr_averaged(entries, &nodes, x)))?;
    }
    if let Some(e) = &glrt {
        c_glrt = cvm_against_ccdf(cfg, e, pointwise(|x| glrt_pd_averaged(entries, &nodes, x)))?;
    }
    report.note("cvm_imhof", c_imhof);
    report.note("cvm_lowsnr", c_low);
    report.note("cvm_glrt_wilks", c_glrt);
    Ok(report)
}

pub fn cmd_sweep_snr(cfg: &ExperimentConfig) -> CliResult<Report> {
    if cfg.snr_db.is_empty() {
        return Err(CliError::Invalid("sweep-snr needs at least one SNR".into()));
    }
    let mut snrs = cfg.snr_db.clone();
    snrs.sort_by(f64::total_cmp);
    snrs.dedup();
    let scene = Scene::lfm(cfg.scene(cfg.n, None)?)?;
    let entries = scene.config().entry_count();
    let gamma = rao_threshold(cfg.pfa)?;

    let mut table = Table::new(&[
        "snr_db",
        "pd_rao_empirical",
        "pd_rao_imhof",
        "pd_glrt_empirical",
        "pd_glrt_theory",
        "pd_lrt_empirical",
    ]);
    for &snr in &snrs {
        let nodes = theory_nodes(cfg, snr);
        let h1 = simulate(
            cfg,
            &scene,
            Some(snr),
            Hypothesis::H1,
            &[DetectorArg::Rao, DetectorArg::GlrtWilks, DetectorArg::LrtKnownBeta],
        )?;
        let pd = |d: Detector| h1.as_ref().and_then(|s| s.get(d)).map(|t| fraction_above(t, gamma));
        let lrt = match h1.as_ref().and_then(|s| s.get(Detector::LrtKnownBeta)) {
            Some(alt) => {
                let h0 = simulate(cfg, &scene, Some(snr), Hypothesis::H0, &[DetectorArg::LrtKnownBeta])?
                    .expect("H0 run exists when the H1 run does");
                let null = EmpiricalCdf::from_slice(h0.get(Detector::LrtKnownBeta).expect("requested"))?;
                fraction_above(alt, null.quantile(1.0 - cfg.pfa))
            }
            None => f64::NAN,
        };
        table.push(vec![
            snr,
            pd(Detector::Rao).unwrap_or(f64::NAN),
            RaoImhofModel::new(scene.signature(), &nodes)?.pd(gamma)?,
            pd(Detector::GlrtWilks).unwrap_or(f64::NAN),
            glrt_pd_averaged(entries, &nodes, gamma)?,
            lrt,
        ]);
    }

    let col = |name| table.column(name).expect("known column");
    let rao_emp = crossing(&snrs, &col("pd_rao_empirical"), PD_LEVEL);
    let glrt_emp = crossing(&snrs, &col("pd_glrt_empirical"), PD_LEVEL);
    let lrt_emp = crossing(&snrs, &col("pd_lrt_empirical"), PD_LEVEL);
    let rao_theory = bisect_increasing(
        |s| Ok(RaoImhofModel::new(scene.signature(), &theory_nodes(cfg, s))?.pd(gamma)?),
        SNR_SEARCH,
        PD_LEVEL,
    )?;
    let glrt_theory =
        bisect_increasing(|s| Ok(glrt_pd_averaged(entries, &theory_nodes(cfg, s), gamma)?), SNR_SEARCH, PD_LEVEL)?;

    let mut report = Report::new(table);
    report.note("threshold", gamma);
    report.note("snr50_rao_empirical", rao_emp);
    report.note("snr50_glrt_empirical", glrt_emp);
    report.note("snr50_lrt_empirical", lrt_emp);
    report.note("snr50_rao_theory", rao_theory);
    report.note("snr50_glrt_theory", glrt_theory);
    report.note("gap_rao_glrt_empirical_db", rao_emp - glrt_emp);
    report.note("gap_rao_glrt_theory_db", rao_theory - glrt_theory);
    report.note("gap_rao_lrt_empirical_db", rao_emp - lrt_emp);
    report.note("loss_db", loss_db());
    Ok(report)
}

pub fn cmd_sweep_n(cfg: &ExperimentConfig) -> CliResult<Report> {
    let snr = single_snr(cfg)?;
    if cfg.n_values.is_empty() {
        return Err(CliError::Invalid("sweep-n needs at least one value in n_values".into()));
    }
    let mut ns = cfg.n_values.clone();
    ns.sort_unstable();
    ns.dedup();
    let gamma = rao_threshold(cfg.pfa)?;
    let nodes = theory_nodes(cfg, snr);

    let mut rows = Vec::with_capacity(ns.len());
    for &n in &ns {
        let scene = Scene::lfm(cfg.scene(n, Some(snr))?)?;
        let entries = scene.config().entry_count();
        let h1 = simulate(cfg, &scene, Some(snr), Hypothesis::H1, &[DetectorArg::Rao, DetectorArg::GlrtWilks])?;
        let pd = |d: Detector| {
            h1.as_ref().and_then(|s| s.get(d)).map_or(f64::NAN, |t| fraction_above(t, gamma))
        };
        rows.push([
            n as f64,
            pd(Detector::Rao),
            pd(Detector::GlrtWilks),
            RaoImhofModel::new(scene.signature(), &nodes)?.pd(gamma)?,
            glrt_pd_averaged(entries, &nodes, gamma)?,
        ]);
    }

    let log_n: Vec<f64> = ns.iter().map(|&n| (n as f64).log2()).collect();
    let shift = sample_compensation_factor().log2();
    let column = |i: usize| rows.iter().map(|r| r[i]).collect::<Vec<f64>>();
    let (pd_rao, pd_glrt, rao_theory, glrt_theory) = (column(1), column(2), column(3), column(4));

    let mut table =
        Table::new(&["n", "pd_rao", "pd_glrt", "pd_glrt_shifted", "pd_rao_imhof", "pd_glrt_theory"]);
    let mut mismatch: f64 = f64::NAN;
    for (i, r) in rows.iter().enumerate() {
        let shifted = interpolate(&log_n, &pd_glrt, log_n[i] - shift);
        let gap = (r[1] - shifted).abs();
        if gap.is_finite() {
            mismatch = if mismatch.is_nan() { gap } else { mismatch.max(gap) };
        }
        table.push(vec![r[0], r[1], r[2], shifted, r[3], r[4]]);
    }

    let n50 = |pd: &[f64]| crossing(&log_n, pd, PD_LEVEL).exp2();
    let mut report = Report::new(table);
    report.note("snr_db", snr);
    report.note("threshold", gamma);
    report.note("n50_rao_empirical", n50(&pd_rao));
    report.note("n50_glrt_empirical", n50(&pd_glrt));
    report.note("n_ratio_empirical", n50(&pd_rao) / n50(&pd_glrt));
    report.note("n50_rao_theory", n50(&rao_theory));
    report.note("n50_glrt_theory", n50(&glrt_theory));
    report.note("n_ratio_theory", n50(&rao_theory) / n50(&glrt_theory));
    report.note("max_abs_pd_rao_minus_shifted", mismatch);
    report.note("sample_compensation_factor", sample_compensation_factor());
    Ok(report)
}

pub fn cmd_gof(cfg: &ExperimentConfig) -> CliResult<Report> {
    let scene = Scene::lfm(cfg.scene(cfg.n, None)?)?;
    let mut table = Table::new(&["snr_db", "cvm_rao_imhof", "cvm_rao_lowsnr", "cvm_glrt_wilks"]);
    // The first row is the null hypothesis, with an empty SNR cell.
    let mut points = vec![None];
    points.extend(cfg.snr_db.iter().copied().map(Some));
    for snr in points {
        let [imhof, low, glrt] = fit_errors(cfg, &scene, snr)?;
        table.push(vec![snr.unwrap_or(f64::NAN), imhof, low, glrt]);
    }
    Ok(Report::new(table))
}

pub fn cmd_loss() -> Report {
    let mut table = Table::new(&["loss_db", "sample_factor", "log2_sample_factor"]);
    let factor = sample_compensation_factor();
    table.push(vec![loss_db(), factor, factor.log2()]);
    let mut report = Report::new(table);
    report.note("loss_db", loss_db());
    report.note("sample_factor", factor);
    report.note("log2_sample_factor", factor.log2());
    report
}

/// Human-readable lines printed by `loss`.
pub fn loss_text() -> String {
    let factor = sample_compensation_factor();
    format!(
        "{:.4} dB, ×{:.4} samples\n\
         loss_db: 10·log10(π/2), the ratio of the ∞-bit Fisher information (2/σ²)·tr(ZZᴴ) to the one-bit Fisher information (2/π)(2/σ²)·tr(ZZᴴ) at β = 0\n\
         sample_factor: π/2, the block-length multiplier that restores the low-SNR non-centrality 2N|β|²/π to the GLRT value N|β|²\n\
         log2_sample_factor: {:.4}, the same shift on a log₂ n axis\n",
        loss_db(),
        factor,
        factor.log2()
    )
}

fn fraction_above(samples: &[f64], threshold: f64) -> f64 {
    samples.iter().filter(|&&t| t > threshold).count() as f64 / samples.len() as f64
}

/// First upward crossing of `level` by `ys` over ascending `xs`, linearly
/// interpolated; NaN when the curve never crosses.
pub fn crossing(xs: &[f64], ys: &[f64], level: f64) -> f64 {
    for i in 1..xs.len().min(ys.len()) {
        let (y0, y1) = (ys[i - 1], ys[i]);
        if y0 < level && y1 >= level {
            return xs[i - 1] + (level - y0) / (y1 - y0) * (xs[i] - xs[i - 1]);
        }
    }
    f64::NAN
}

/// Piecewise-linear interpolation on ascending `xs`; NaN outside the range.
pub fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let (Some(&first), Some(&last)) = (xs.first(), xs.last()) else {
        return f64::NAN;
    };
    if !(x >= first && x <= last) {
        return f64::NAN;
    }
    let i = xs.partition_point(|&v| v < x);
    if i == 0 {
        return ys[0];
    }
    let t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    ys[i - 1] + t * (ys[i] - ys[i - 1])
}

/// Point where an increasing `f` reaches `level` inside `bracket`, to 1e−6;
/// NaN when the bracket does not contain it.
pub fn bisect_increasing(
    f: impl Fn(f64) -> CliResult<f64>,
    bracket: (f64, f64),
    level: f64,
) -> CliResult<f64> {
    let (mut lo, mut hi) = bracket;
    if f(lo)? >= level || f(hi)? < level {
        return Ok(f64::NAN);
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_interpolates() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(crossing(&xs, &[0.1, 0.3, 0.7, 0.9], 0.5), 1.5);
        assert!(crossing(&xs, &[0.6, 0.7, 0.8, 0.9], 0.5).is_nan());
        assert!(crossing(&xs, &[0.1, f64::NAN, 0.2, 0.3], 0.5).is_nan());
        assert!(crossing(&[2.0], &[0.9], 0.5).is_nan());
    }

    #[test]
    fn interpolation_inside_and_outside() {
        let xs = [1.0, 2.0, 4.0];
        let ys = [0.0, 1.0, 3.0];
        assert_eq!(interpolate(&xs, &ys, 3.0), 2.0);
        assert_eq!(interpolate(&xs, &ys, 1.0), 0.0);
        assert_eq!(interpolate(&xs, &ys, 4.0), 3.0);
        assert!(interpolate(&xs, &ys, 0.5).is_nan());
        assert!(interpolate(&xs, &ys, 4.5).is_nan());
    }

    #[test]
    fn bisection_finds_root() {
        let r = bisect_increasing(|x| Ok(x * x * x), (-2.0, 3.0), 1.0).unwrap();
        assert!((r - 1.0).abs() < 1e-6);
        assert!(bisect_increasing(Ok, (2.0, 3.0), 1.0).unwrap().is_nan());
    }

    #[test]
    fn loss_report() {
        let r = cmd_loss();
        assert!((r.get("loss_db").unwrap() - 1.9612).abs() < 5e-5);
        assert!(loss_text().starts_with("1.9612 dB, ×1.5708 samples"));
    }
}
