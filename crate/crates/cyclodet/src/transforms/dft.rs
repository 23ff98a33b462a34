//! The DFT-based coordinate change that block-diagonalizes block-circulant
//! covariance matrices.
//!
//! Each antenna stream is put through a unitary inverse DFT over the window,
//! then the frequency bins are regrouped so that group `g` (one of `N`
//! groups of `L*P` entries) holds bins `{g, g+N, .., g+(P-1)N}`. The map is
//! unitary; applied to both halves of a stacked two-array vector it turns
//! the structured covariances of both hypotheses into block-diagonal ones.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Reusable transform plan for one `(antennas, cycles_per_window, cycle_period)`
/// geometry. Instances are cheap to share across threads.
pub struct DftReorder {
    antennas: usize,
    cycles_per_window: usize,
    cycle_period: usize,
    fft: Arc<dyn Fft<f64>>,
    norm: f64,
}

impl DftReorder {
    pub fn new(antennas: usize, cycles_per_window: usize, cycle_period: usize) -> Self {
        assert!(antennas >= 1 && cycles_per_window >= 1 && cycle_period >= 1);
        let window_len = cycles_per_window * cycle_period;
        let fft = FftPlanner::new().plan_fft_inverse(window_len);
        Self {
            antennas,
            cycles_per_window,
            cycle_period,
            fft,
            norm: 1.0 / (window_len as f64).sqrt(),
        }
    }

    /// Input/output length: `antennas * cycles_per_window * cycle_period`.
    pub fn len(&self) -> usize {
        self.antennas * self.cycles_per_window * self.cycle_period
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Transforms one stacked single-array vector organized as `N*P` time
    /// samples of `antennas`-sized chunks.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "expected vector of length {}, got {}",
                self.len(),
                v.len()
            )));
        }
        let mut out = vec![Complex64::ZERO; v.len()];
        self.apply_into(v, &mut out);
        Ok(out)
    }

    /// Transforms both halves of a two-array stacked vector `[y_s; y_r]`.
    pub fn apply_pair(&self, w: &[Complex64]) -> Result<Vec<Complex64>> {
        let half = self.len();
        if w.len() != 2 * half {
            return Err(Error::DimensionMismatch(format!(
                "expected stacked pair of length {}, got {}",
                2 * half,
                w.len()
            )));
        }
        let mut out = vec![Complex64::ZERO; w.len()];
        self.apply_into(&w[..half], &mut out[..half]);
        self.apply_into(&w[half..], &mut out[half..]);
        Ok(out)
    }

    fn apply_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        let l = self.antennas;
        let n = self.cycles_per_window;
        let p = self.cycle_period;
        let window_len = n * p;
        let mut stream = vec![Complex64::ZERO; window_len];
        for a in 0..l {
            for t in 0..window_len {
                stream[t] = v[t * l + a];
            }
            self.fft.process(&mut stream);
            for group in 0..n {
                for phase in 0..p {
                    let bin = group + phase * n;
                    let pos = phase + group * p;
                    out[pos * l + a] = stream[bin] * self.norm;
                }
            }
        }
    }
}

/// One-shot convenience for [`DftReorder::apply`].
pub fn dft_reorder_transform(
    v: &[Complex64],
    antennas: usize,
    cycles_per_window: usize,
    cycle_period: usize,
) -> Result<Vec<Complex64>> {
    DftReorder::new(antennas, cycles_per_window, cycle_period).apply(v)
}
