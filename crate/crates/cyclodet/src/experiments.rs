//! Threshold calibration, Monte Carlo false-alarm / detection estimation,
//! ROC curves, and Pd-vs-SNR sweeps.
//!
//! Trials run in parallel; every trial owns an RNG derived from
//! `(master seed, purpose, trial index)` and aggregation preserves trial
//! order, so results are bit-identical for any worker count.

use std::time::{Duration, Instant};

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detectors::{compute_statistic, glrt_cyclo_from_batch, sample_covariance, DetectorKind};
use crate::error::{Error, Result};
use crate::rng::{derive_rng, standard_complex};
use crate::scenario::{
    stack_snapshots_with_plan, synth_observation, Hypothesis, ScenarioConfig, SnapshotBatch,
};
use crate::transforms::{DftReorder, DimSpec};

// Purpose tags keeping every Monte Carlo stream disjoint.
const DOMAIN_WHITE_NULL: u64 = 0x11;
const DOMAIN_FULL_NULL_CAL: u64 = 0x12;
const DOMAIN_RATES_H0: u64 = 0x21;
const DOMAIN_RATES_H1: u64 = 0x22;
const DOMAIN_ROC_H0: u64 = 0x31;
const DOMAIN_ROC_H1: u64 = 0x32;
const DOMAIN_SWEEP_CAL: u64 = 0x41;
const DOMAIN_SWEEP_H1: u64 = 0x42;

/// How null-hypothesis data for threshold calibration is produced.
///
/// The statistic of the structured-covariance detector is invariant to any
/// gain with the null covariance structure, so a white process stands in
/// for arbitrary noise there; the full-pipeline mode exists to validate
/// that shortcut and to calibrate detectors without the invariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NullModel {
    WhiteGaussian,
    FullPipeline,
}

/// Calibrated thresholds for a list of false-alarm targets.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdTable {
    pub detector: DetectorKind,
    pub dims: DimSpec,
    pub pfa_targets: Vec<f64>,
    pub thresholds: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub null_model: NullModel,
}

impl ThresholdTable {
    /// Threshold for one of the calibrated targets.
    pub fn threshold_for(&self, pfa: f64) -> Option<f64> {
        self.pfa_targets
            .iter()
            .position(|&t| t == pfa)
            .map(|i| self.thresholds[i])
    }
}

/// Exceedance-rate estimates with binomial standard errors.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateEstimate {
    pub pfa: f64,
    pub pfa_stderr: f64,
    pub pd: f64,
    pub pd_stderr: f64,
    pub trials: usize,
}

/// Per-trial statistics of one detector under both hypotheses.
#[derive(Debug, Clone, Serialize)]
pub struct DetectorStats {
    pub detector: DetectorKind,
    pub h0: Vec<f64>,
    pub h1: Vec<f64>,
}

/// One point of an empirical ROC curve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RocPoint {
    pub pfa: f64,
    pub pd: f64,
    pub pd_stderr: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DetectorRoc {
    pub detector: DetectorKind,
    pub points: Vec<RocPoint>,
}

/// Detection probability read off the ROC at a false-alarm target.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PdAtPfa {
    pub detector: DetectorKind,
    pub pfa: f64,
    pub pd: f64,
    pub pd_stderr: f64,
}

/// One point of a Pd-vs-SNR sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepPoint {
    pub detector: DetectorKind,
    pub snr_db: f64,
    pub pd: f64,
    pub pd_stderr: f64,
    pub threshold: f64,
}

/// Everything one experiment produced.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResult {
    pub scenario: ScenarioConfig,
    pub trials: usize,
    pub seed: u64,
    pub per_trial_stats: Vec<DetectorStats>,
    pub roc: Vec<DetectorRoc>,
    pub pd_at_pfa: Vec<PdAtPfa>,
    pub sweep: Vec<SweepPoint>,
    #[serde(skip)]
    pub wall_clock: Duration,
}

/// False-alarm targets the ROC summary reports by default.
pub const DEFAULT_PFA_GRID: [f64; 6] = [0.01, 0.02, 0.05, 0.1, 0.2, 0.5];

fn binomial_stderr(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Statistics of every requested detector for one batch. A lone
/// likelihood-ratio request takes the block-only path and skips the full
/// covariance.
fn batch_statistics(detectors: &[DetectorKind], batch: &SnapshotBatch) -> Result<Vec<f64>> {
    if detectors == [DetectorKind::GlrtCyclo] {
        return Ok(vec![glrt_cyclo_from_batch(batch)?.statistic]);
    }
    let cov = sample_covariance(batch)?;
    detectors
        .iter()
        .map(|&d| compute_statistic(d, &cov).map(|o| o.statistic))
        .collect()
}

fn exceedance(stats: &[f64], threshold: f64) -> f64 {
    stats.iter().filter(|&&s| s > threshold).count() as f64 / stats.len() as f64
}

/// Empirical quantile with linear interpolation between order statistics.
pub fn empirical_quantile(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 < sorted.len() {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[sorted.len() - 1]
    }
}

/// Statistics of `detectors` over `trials` white-Gaussian null batches:
/// each snapshot is i.i.d. standard circular Gaussian of the full stacked
/// dimension, no synthesis involved.
pub fn white_null_statistics(
    detectors: &[DetectorKind],
    dims: &DimSpec,
    trials: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let dims = *dims;
    let per_trial: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = derive_rng(seed, DOMAIN_WHITE_NULL, t as u64);
            let dim = dims.dim();
            let snapshots = (0..dims.windows)
                .map(|_| DVector::from_fn(dim, |_, _| standard_complex(&mut rng)))
                .collect();
            let batch = SnapshotBatch { dims, snapshots };
            batch_statistics(detectors, &batch)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(transpose(per_trial, detectors.len()))
}

/// Statistics of `detectors` over `trials` full-pipeline trials under one
/// hypothesis, fresh source, channels and noise per trial.
pub fn full_pipeline_statistics(
    cfg: &ScenarioConfig,
    detectors: &[DetectorKind],
    hypothesis: Hypothesis,
    trials: usize,
    seed: u64,
    domain: u64,
    index_base: u64,
) -> Result<Vec<Vec<f64>>> {
    let dims = cfg.dims()?;
    let plan = DftReorder::new(dims.antennas, dims.cycles_per_window, dims.cycle_period);
    let per_trial: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = derive_rng(seed, domain, index_base + t as u64);
            let obs = synth_observation(cfg, hypothesis, &mut rng)?;
            let batch = stack_snapshots_with_plan(&obs, &dims, &plan)?;
            batch_statistics(detectors, &batch)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(transpose(per_trial, detectors.len()))
}

fn transpose(per_trial: Vec<Vec<f64>>, width: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::with_capacity(per_trial.len()); width];
    for row in per_trial {
        for (d, v) in row.into_iter().enumerate() {
            out[d].push(v);
        }
    }
    out
}

fn check_calibration_feasible(pfa_targets: &[f64], trials: usize) -> Result<f64> {
    if pfa_targets.is_empty() {
        return Err(Error::InvalidConfig("no pfa targets given".into()));
    }
    let mut min_pfa = f64::INFINITY;
    for &pfa in pfa_targets {
        if !(0.0..1.0).contains(&pfa) || pfa == 0.0 {
            return Err(Error::InvalidConfig(format!(
                "pfa target {pfa} must lie in (0, 1)"
            )));
        }
        min_pfa = min_pfa.min(pfa);
    }
    let needed = (10.0 / min_pfa).ceil() as usize;
    if trials < needed {
        return Err(Error::InsufficientTrials {
            trials,
            min_pfa,
            needed,
        });
    }
    Ok(min_pfa)
}

fn thresholds_from_null(stats: &mut [f64], pfa_targets: &[f64]) -> Vec<f64> {
    stats.sort_by(|a, b| a.partial_cmp(b).expect("statistics must not be NaN"));
    pfa_targets
        .iter()
        .map(|&pfa| empirical_quantile(stats, 1.0 - pfa))
        .collect()
}

/// Calibrates thresholds from white-Gaussian null trials.
pub fn calibrate_threshold(
    detector: DetectorKind,
    dims: &DimSpec,
    pfa_targets: &[f64],
    trials: usize,
    seed: u64,
) -> Result<ThresholdTable> {
    check_calibration_feasible(pfa_targets, trials)?;
    let mut stats = white_null_statistics(&[detector], dims, trials, seed)?.remove(0);
    let thresholds = thresholds_from_null(&mut stats, pfa_targets);
    Ok(ThresholdTable {
        detector,
        dims: *dims,
        pfa_targets: pfa_targets.to_vec(),
        thresholds,
        trials,
        seed,
        null_model: NullModel::WhiteGaussian,
    })
}

/// Calibrates thresholds from full-pipeline null trials of `cfg`.
pub fn calibrate_threshold_full(
    detector: DetectorKind,
    cfg: &ScenarioConfig,
    pfa_targets: &[f64],
    trials: usize,
    seed: u64,
) -> Result<ThresholdTable> {
    check_calibration_feasible(pfa_targets, trials)?;
    let mut stats = full_pipeline_statistics(
        cfg,
        &[detector],
        Hypothesis::H0,
        trials,
        seed,
        DOMAIN_FULL_NULL_CAL,
        0,
    )?
    .remove(0);
    let thresholds = thresholds_from_null(&mut stats, pfa_targets);
    Ok(ThresholdTable {
        detector,
        dims: cfg.dims()?,
        pfa_targets: pfa_targets.to_vec(),
        thresholds,
        trials,
        seed,
        null_model: NullModel::FullPipeline,
    })
}

/// Monte Carlo false-alarm and detection rates of one detector at a fixed
/// threshold, over fresh full-pipeline trials of both hypotheses.
pub fn estimate_rates(
    cfg: &ScenarioConfig,
    detector: DetectorKind,
    threshold: f64,
    trials: usize,
    seed: u64,
) -> Result<RateEstimate> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be >= 1".into()));
    }
    let h0 = full_pipeline_statistics(
        cfg,
        &[detector],
        Hypothesis::H0,
        trials,
        seed,
        DOMAIN_RATES_H0,
        0,
    )?
    .remove(0);
    let h1 = full_pipeline_statistics(
        cfg,
        &[detector],
        Hypothesis::H1,
        trials,
        seed,
        DOMAIN_RATES_H1,
        0,
    )?
    .remove(0);
    let pfa = exceedance(&h0, threshold);
    let pd = exceedance(&h1, threshold);
    Ok(RateEstimate {
        pfa,
        pfa_stderr: binomial_stderr(pfa, trials),
        pd,
        pd_stderr: binomial_stderr(pd, trials),
        trials,
    })
}

/// Builds the stepwise empirical ROC from pooled per-trial statistics by
/// sweeping a threshold over every observed value; no re-simulation.
pub fn roc_from_stats(h0: &[f64], h1: &[f64]) -> Vec<RocPoint> {
    let n0 = h0.len();
    let n1 = h1.len();
    let mut h0_desc = h0.to_vec();
    let mut h1_desc = h1.to_vec();
    let desc = |a: &f64, b: &f64| b.partial_cmp(a).expect("statistics must not be NaN");
    h0_desc.sort_by(desc);
    h1_desc.sort_by(desc);
    let mut pooled = Vec::with_capacity(n0 + n1);
    pooled.extend_from_slice(&h0_desc);
    pooled.extend_from_slice(&h1_desc);
    pooled.sort_by(desc);
    pooled.dedup();

    let mut points = Vec::with_capacity(pooled.len() + 2);
    points.push(RocPoint {
        pfa: 0.0,
        pd: 0.0,
        pd_stderr: 0.0,
    });
    let mut i0 = 0;
    let mut i1 = 0;
    for &v in &pooled {
        while i0 < n0 && h0_desc[i0] >= v {
            i0 += 1;
        }
        while i1 < n1 && h1_desc[i1] >= v {
            i1 += 1;
        }
        let pd = i1 as f64 / n1 as f64;
        points.push(RocPoint {
            pfa: i0 as f64 / n0 as f64,
            pd,
            pd_stderr: binomial_stderr(pd, n1),
        });
    }
    if points.last().map(|p| (p.pfa, p.pd)) != Some((1.0, 1.0)) {
        points.push(RocPoint {
            pfa: 1.0,
            pd: 1.0,
            pd_stderr: 0.0,
        });
    }
    points
}

/// Evaluates the stepwise ROC at a false-alarm target: the point with the
/// largest pfa not exceeding the target.
pub fn pd_at_pfa(points: &[RocPoint], target: f64) -> RocPoint {
    let mut best = points[0];
    for &p in points {
        if p.pfa <= target + 1e-12 {
            best = p;
        } else {
            break;
        }
    }
    best
}

/// Full ROC experiment: per-trial statistics under both hypotheses, then a
/// threshold sweep per detector.
pub fn roc_curve(
    cfg: &ScenarioConfig,
    detectors: &[DetectorKind],
    trials: usize,
    seed: u64,
) -> Result<ExperimentResult> {
    if trials < 100 {
        return Err(Error::InvalidConfig(format!(
            "ROC estimation needs at least 100 trials, got {trials}"
        )));
    }
    let start = Instant::now();
    let h0_all = full_pipeline_statistics(
        cfg,
        detectors,
        Hypothesis::H0,
        trials,
        seed,
        DOMAIN_ROC_H0,
        0,
    )?;
    let h1_all = full_pipeline_statistics(
        cfg,
        detectors,
        Hypothesis::H1,
        trials,
        seed,
        DOMAIN_ROC_H1,
        0,
    )?;

    let mut per_trial_stats = Vec::with_capacity(detectors.len());
    let mut roc = Vec::with_capacity(detectors.len());
    let mut pd_grid = Vec::new();
    for (i, &detector) in detectors.iter().enumerate() {
        let points = roc_from_stats(&h0_all[i], &h1_all[i]);
        for &target in &DEFAULT_PFA_GRID {
            let p = pd_at_pfa(&points, target);
            pd_grid.push(PdAtPfa {
                detector,
                pfa: target,
                pd: p.pd,
                pd_stderr: p.pd_stderr,
            });
        }
        roc.push(DetectorRoc { detector, points });
        per_trial_stats.push(DetectorStats {
            detector,
            h0: h0_all[i].clone(),
            h1: h1_all[i].clone(),
        });
    }

    Ok(ExperimentResult {
        scenario: cfg.clone(),
        trials,
        seed,
        per_trial_stats,
        roc,
        pd_at_pfa: pd_grid,
        sweep: Vec::new(),
        wall_clock: start.elapsed(),
    })
}

/// Options for [`pd_vs_snr`].
#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    pub pfa: f64,
    pub trials_per_point: usize,
    pub cal_trials: usize,
    pub null_model: NullModel,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            pfa: 0.01,
            trials_per_point: 1000,
            cal_trials: 10_000,
            null_model: NullModel::FullPipeline,
        }
    }
}

/// Detection probability versus SNR with `snr_s = snr_r` on an ascending
/// grid, at a fixed false-alarm target.
///
/// White-null calibration is SNR-independent and reused across the grid;
/// full-pipeline calibration depends on the reference-channel SNR and is
/// redone per point.
pub fn pd_vs_snr(
    cfg: &ScenarioConfig,
    detectors: &[DetectorKind],
    snr_grid_db: &[f64],
    opts: &SweepOptions,
    seed: u64,
) -> Result<ExperimentResult> {
    if snr_grid_db.is_empty() {
        return Err(Error::InvalidConfig("empty SNR grid".into()));
    }
    if snr_grid_db.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidConfig(
            "SNR grid must be sorted ascending".into(),
        ));
    }
    let start = Instant::now();
    let dims = cfg.dims()?;
    let pfa_targets = [opts.pfa];
    check_calibration_feasible(&pfa_targets, opts.cal_trials)?;

    // Thresholds shared across the grid for the white null.
    let white_thresholds: Option<Vec<f64>> = match opts.null_model {
        NullModel::WhiteGaussian => Some(
            detectors
                .iter()
                .map(|&d| {
                    calibrate_threshold(d, &dims, &pfa_targets, opts.cal_trials, seed)
                        .map(|t| t.thresholds[0])
                })
                .collect::<Result<Vec<f64>>>()?,
        ),
        NullModel::FullPipeline => None,
    };

    let mut sweep = Vec::with_capacity(snr_grid_db.len() * detectors.len());
    for (point, &snr_db) in snr_grid_db.iter().enumerate() {
        let mut point_cfg = cfg.clone();
        point_cfg.snr_s_db = snr_db;
        point_cfg.snr_r_db = snr_db;

        let thresholds: Vec<f64> = match &white_thresholds {
            Some(t) => t.clone(),
            None => {
                let mut null_stats = full_pipeline_statistics(
                    &point_cfg,
                    detectors,
                    Hypothesis::H0,
                    opts.cal_trials,
                    seed,
                    DOMAIN_SWEEP_CAL,
                    (point as u64) << 32,
                )?;
                null_stats
                    .iter_mut()
                    .map(|stats| thresholds_from_null(stats, &pfa_targets)[0])
                    .collect()
            }
        };

        let h1 = full_pipeline_statistics(
            &point_cfg,
            detectors,
            Hypothesis::H1,
            opts.trials_per_point,
            seed,
            DOMAIN_SWEEP_H1,
            (point as u64) << 32,
        )?;
        for (i, &detector) in detectors.iter().enumerate() {
            let pd = exceedance(&h1[i], thresholds[i]);
            sweep.push(SweepPoint {
                detector,
                snr_db,
                pd,
                pd_stderr: binomial_stderr(pd, opts.trials_per_point),
                threshold: thresholds[i],
            });
        }
    }

    Ok(ExperimentResult {
        scenario: cfg.clone(),
        trials: opts.trials_per_point,
        seed,
        per_trial_stats: Vec::new(),
        roc: Vec::new(),
        pd_at_pfa: Vec::new(),
        sweep,
        wall_clock: start.elapsed(),
    })
}

/// Runs one synthesis trial and reports every detector's statistic under
/// both hypotheses.
pub fn single_trial(
    cfg: &ScenarioConfig,
    detectors: &[DetectorKind],
    seed: u64,
) -> Result<Vec<DetectorStats>> {
    let h0 = full_pipeline_statistics(cfg, detectors, Hypothesis::H0, 1, seed, DOMAIN_RATES_H0, 0)?;
    let h1 = full_pipeline_statistics(cfg, detectors, Hypothesis::H1, 1, seed, DOMAIN_RATES_H1, 0)?;
    Ok(detectors
        .iter()
        .enumerate()
        .map(|(i, &detector)| DetectorStats {
            detector,
            h0: h0[i].clone(),
            h1: h1[i].clone(),
        })
        .collect())
}
