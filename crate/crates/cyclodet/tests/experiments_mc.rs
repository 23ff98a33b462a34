//! Monte Carlo behavior of calibration and rate estimation.

mod common;

use cyclodet::detectors::DetectorKind;
use cyclodet::experiments::{
    calibrate_threshold, empirical_quantile, estimate_rates, full_pipeline_statistics, pd_vs_snr,
    white_null_statistics, NullModel, SweepOptions,
};
use cyclodet::scenario::{
    stack_snapshots_with_plan, synth_observation_with_streams, Hypothesis, ScenarioConfig,
    SynthStreams,
};
use cyclodet::transforms::{DftReorder, DimSpec};
use cyclodet::{glrt_cyclo, sample_covariance};
use rayon::prelude::*;

fn exceedance(stats: &[f64], eta: f64) -> f64 {
    stats.iter().filter(|&&s| s > eta).count() as f64 / stats.len() as f64
}

/// Calibrating on one white-null sample and re-testing on a fresh one must
/// reproduce the target false-alarm rate.
#[test]
fn white_null_calibration_is_self_consistent() {
    let dims = DimSpec::new(1, 1, 1, 16).unwrap();
    let trials = 100_000;
    let table =
        calibrate_threshold(DetectorKind::GlrtCyclo, &dims, &[0.01], trials, 0xCA11).unwrap();
    let eta = table.thresholds[0];
    let fresh = white_null_statistics(&[DetectorKind::GlrtCyclo], &dims, trials, 0xF4E5).unwrap();
    let pfa = exceedance(&fresh[0], eta);
    assert!(
        (0.008..=0.012).contains(&pfa),
        "empirical pfa {pfa} outside [0.008, 0.012]"
    );
}

/// Thresholds for several targets hit their targets within three binomial
/// standard deviations on fresh data.
#[test]
fn threshold_consistency_across_targets() {
    let dims = DimSpec::new(1, 2, 8, 16).unwrap();
    let targets = [0.1, 0.05, 0.01];
    let table =
        calibrate_threshold(DetectorKind::GlrtCyclo, &dims, &targets, 100_000, 0xBEE5).unwrap();
    let val_trials = 10_000;
    let fresh =
        white_null_statistics(&[DetectorKind::GlrtCyclo], &dims, val_trials, 0x0DD5).unwrap();
    for (i, &target) in targets.iter().enumerate() {
        let pfa = exceedance(&fresh[0], table.thresholds[i]);
        let sigma = (target * (1.0 - target) / val_trials as f64).sqrt();
        assert!(
            (pfa - target).abs() <= 3.0 * sigma,
            "target {target}: empirical {pfa}, band +-{}",
            3.0 * sigma
        );
    }
}

fn ks_distance(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    d
}

/// The null distribution of the likelihood-ratio statistic must not depend
/// on the reference-channel realization: swapping the channel substream
/// leaves it unchanged up to sampling noise.
#[test]
fn h0_statistic_independent_of_reference_channel_seed() {
    let cfg = ScenarioConfig {
        cycles_per_window: 8,
        ..ScenarioConfig::default()
    };
    let dims = cfg.dims().unwrap();
    let plan = DftReorder::new(dims.antennas, dims.cycles_per_window, dims.cycle_period);
    let trials = 3000usize;
    let stat_for = |channel_domain: u64| -> Vec<f64> {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let sub = |d: u64| {
                    use rand::RngCore;
                    cyclodet::rng::derive_rng(0x5EED, d, t as u64).next_u64()
                };
                let streams = SynthStreams {
                    source: sub(1),
                    channel_s: sub(2),
                    channel_r: sub(channel_domain),
                    noise_s: sub(4),
                    noise_r: sub(5),
                };
                let obs = synth_observation_with_streams(&cfg, Hypothesis::H0, streams).unwrap();
                let batch = stack_snapshots_with_plan(&obs, &dims, &plan).unwrap();
                glrt_cyclo(&sample_covariance(&batch).unwrap())
                    .unwrap()
                    .statistic
            })
            .collect()
    };
    let a = stat_for(3);
    let b = stat_for(30);
    let d = ks_distance(a, b);
    assert!(d < 0.05, "KS distance {d} between channel-seed variants");
}

/// At +20 dB on both channels the detector saturates: detection rate above
/// 0.99 at a 1% false-alarm threshold.
#[test]
fn high_snr_rates_saturate() {
    let cfg = ScenarioConfig {
        snr_s_db: 20.0,
        snr_r_db: 20.0,
        ..ScenarioConfig::default()
    };
    let dims = cfg.dims().unwrap();
    let table = calibrate_threshold(DetectorKind::GlrtCyclo, &dims, &[0.01], 2000, 0xAB).unwrap();
    let rates = estimate_rates(
        &cfg,
        DetectorKind::GlrtCyclo,
        table.thresholds[0],
        500,
        0xCD,
    )
    .unwrap();
    assert!(rates.pd > 0.99, "pd {} at +20 dB", rates.pd);
}

/// The median alternative-hypothesis statistic at high SNR clears the
/// 99.9th percentile of the null distribution.
#[test]
fn h1_statistics_clear_deep_null_quantile() {
    let cfg = ScenarioConfig {
        snr_s_db: 20.0,
        snr_r_db: 20.0,
        ..ScenarioConfig::default()
    };
    let dims = cfg.dims().unwrap();
    let mut null = white_null_statistics(&[DetectorKind::GlrtCyclo], &dims, 5000, 0x99)
        .unwrap()
        .remove(0);
    null.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let deep = empirical_quantile(&null, 0.999);

    let mut h1 = full_pipeline_statistics(
        &cfg,
        &[DetectorKind::GlrtCyclo],
        Hypothesis::H1,
        100,
        0x77,
        0xE0,
        0,
    )
    .unwrap()
    .remove(0);
    h1.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = h1[h1.len() / 2];
    assert!(
        median > deep,
        "median H1 statistic {median} below 99.9% null quantile {deep}"
    );
}

/// Sweep smoke test: detection probability grows from the noise floor to
/// saturation across a coarse SNR grid.
#[test]
fn sweep_is_monotone_on_coarse_grid() {
    let cfg = ScenarioConfig {
        antennas: 1,
        tx_antennas: 1,
        cycles_per_window: 8,
        windows: 16,
        ..ScenarioConfig::default()
    };
    let opts = SweepOptions {
        pfa: 0.05,
        trials_per_point: 300,
        cal_trials: 2000,
        null_model: NullModel::WhiteGaussian,
    };
    let result = pd_vs_snr(
        &cfg,
        &[DetectorKind::GlrtCyclo],
        &[-30.0, 0.0, 20.0],
        &opts,
        0x5EED,
    )
    .unwrap();
    let pds: Vec<f64> = result.sweep.iter().map(|p| p.pd).collect();
    // Same white threshold reused across the grid.
    assert!(result
        .sweep
        .windows(2)
        .all(|w| w[0].threshold == w[1].threshold));
    // Noise floor near pfa, saturation near one, monotone within 2 sigma.
    assert!(
        (pds[0] - opts.pfa).abs() < 0.05,
        "floor pd {} vs pfa {}",
        pds[0],
        opts.pfa
    );
    assert!(pds[2] > 0.99, "saturated pd {}", pds[2]);
    for w in result.sweep.windows(2) {
        let slack = 2.0 * (w[0].pd_stderr.powi(2) + w[1].pd_stderr.powi(2)).sqrt();
        assert!(w[1].pd >= w[0].pd - slack);
    }
}
