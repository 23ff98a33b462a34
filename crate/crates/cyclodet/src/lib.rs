//! Two-channel passive detection of cyclostationary signals.
//!
//! A surveillance array and a reference array observe an illuminator of
//! opportunity whose digital transmission is cyclostationary with a known
//! cycle period. Stacking each window, moving to a DFT-reordered coordinate
//! system and exploiting the block-diagonal covariance structure that
//! emerges under each hypothesis yields closed-form covariance estimates
//! and a determinant-ratio likelihood statistic.
//!
//! The crate provides:
//! - [`transforms`]: permutation maps, the unitary DFT-reorder coordinate
//!   change, diagonal-block extraction, and log-determinants;
//! - [`scenario`]: a synthetic QPSK / raised-cosine passive-radar scenario
//!   with Rayleigh channels and colored noise;
//! - [`detectors`]: the structured-covariance likelihood-ratio detector and
//!   a cross-correlation benchmark;
//! - [`experiments`]: threshold calibration, Monte Carlo rate estimation,
//!   ROC curves and Pd-vs-SNR sweeps, deterministic for any worker count.

pub mod detectors;
pub mod error;
pub mod experiments;
pub mod rng;
pub mod scenario;
pub mod transforms;

pub use detectors::{
    compute_statistic, cross_correlation_from_cov, cross_correlation_stat, glrt_cyclo,
    glrt_cyclo_loaded, mle_h0, mle_h1, sample_covariance, DetectorKind, DetectorOutput,
    SampleCovariance,
};
pub use error::{Error, Result};
pub use experiments::{
    calibrate_threshold, calibrate_threshold_full, estimate_rates, pd_vs_snr, roc_curve,
    single_trial, ExperimentResult, NullModel, SweepOptions, ThresholdTable,
};
pub use scenario::{Hypothesis, ScenarioConfig, SnapshotBatch};
pub use transforms::DimSpec;
