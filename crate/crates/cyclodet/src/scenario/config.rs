//! Scenario dimensions and physical parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transforms::DimSpec;

/// Full description of one synthetic two-channel experiment.
///
/// Defaults reproduce the reference scenario: QPSK at two samples per
/// symbol, two antennas at transmitter and both arrays, 32-stack windows,
/// 16 windows, Rayleigh channels spanning 10 symbols, order-20
/// moving-average noise with spatial correlation 0.5, and surveillance /
/// reference SNRs of -10 dB / 0 dB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Receive antennas per array (`L`).
    #[serde(rename = "L")]
    pub antennas: usize,
    /// Transmit antennas at the illuminator (`rho`), at least `L`.
    #[serde(rename = "rho")]
    pub tx_antennas: usize,
    /// Samples per symbol; the cycle period equals this.
    pub sps: usize,
    /// Cycle-period stacks per window (`N`).
    #[serde(rename = "N")]
    pub cycles_per_window: usize,
    /// Number of windows (`M`).
    #[serde(rename = "M")]
    pub windows: usize,
    /// Per-antenna SNR at the surveillance array, in dB.
    pub snr_s_db: f64,
    /// Per-antenna SNR at the reference array, in dB.
    pub snr_r_db: f64,
    /// Channel delay spread in symbol durations.
    pub channel_span_symbols: usize,
    /// Moving-average order of the colored noise (0 = white).
    pub ma_order: usize,
    /// Inter-antenna noise correlation coefficient, in `[0, 1)`.
    pub spatial_corr: f64,
    /// Raised-cosine roll-off factor, in `[0, 1]`.
    pub rc_rolloff: f64,
    /// Raised-cosine truncation span in symbols.
    pub rc_span_symbols: usize,
    /// Master RNG seed.
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            antennas: 2,
            tx_antennas: 2,
            sps: 2,
            cycles_per_window: 32,
            windows: 16,
            snr_s_db: -10.0,
            snr_r_db: 0.0,
            channel_span_symbols: 10,
            ma_order: 20,
            spatial_corr: 0.5,
            rc_rolloff: 1.0,
            rc_span_symbols: 8,
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    /// Cycle period in samples (`P`), tied to the oversampling factor.
    pub fn cycle_period(&self) -> usize {
        self.sps
    }

    /// The detection-stage dimensions implied by this scenario.
    pub fn dims(&self) -> Result<DimSpec> {
        self.validate()?;
        DimSpec::new(
            self.antennas,
            self.cycle_period(),
            self.cycles_per_window,
            self.windows,
        )
    }

    /// Checks every structural constraint, naming the violated one.
    pub fn validate(&self) -> Result<()> {
        if self.antennas == 0 || self.tx_antennas == 0 || self.sps == 0 {
            return Err(Error::InvalidConfig(
                "L, rho and sps must all be >= 1".into(),
            ));
        }
        if self.cycles_per_window == 0 {
            return Err(Error::InvalidConfig("N must be >= 1".into()));
        }
        if self.tx_antennas < self.antennas {
            return Err(Error::InvalidConfig(format!(
                "rho ({}) must be >= L ({}) so the signal covariance is full rank",
                self.tx_antennas, self.antennas
            )));
        }
        let min_windows = 2 * self.antennas * self.sps;
        if self.windows < min_windows {
            return Err(Error::InvalidConfig(format!(
                "M ({}) must be >= 2*L*P = {} so the interleaved covariance blocks are positive definite",
                self.windows, min_windows
            )));
        }
        if !(0.0..1.0).contains(&self.spatial_corr) {
            return Err(Error::InvalidConfig(format!(
                "spatial_corr ({}) must lie in [0, 1)",
                self.spatial_corr
            )));
        }
        if !(0.0..=1.0).contains(&self.rc_rolloff) {
            return Err(Error::InvalidConfig(format!(
                "rc_rolloff ({}) must lie in [0, 1]",
                self.rc_rolloff
            )));
        }
        if self.rc_span_symbols == 0 {
            return Err(Error::InvalidConfig("rc_span_symbols must be >= 1".into()));
        }
        if self.channel_span_symbols == 0 {
            return Err(Error::InvalidConfig(
                "channel_span_symbols must be >= 1".into(),
            ));
        }
        if !self.snr_s_db.is_finite() || !self.snr_r_db.is_finite() {
            return Err(Error::InvalidConfig("SNRs must be finite".into()));
        }
        Ok(())
    }
}
