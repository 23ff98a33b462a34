//! Frequency-selective Rayleigh MIMO channels with a flat power-delay
//! profile.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use super::config::ScenarioConfig;
use crate::rng::standard_complex;

/// One draw of the tapped channel matrix sequence.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    /// One `L x rho` matrix per delay tap.
    pub taps: Vec<DMatrix<Complex64>>,
}

impl ChannelRealization {
    pub fn tap_count(&self) -> usize {
        self.taps.len()
    }

    /// Sum of squared tap magnitudes; expectation is `L * rho`.
    pub fn total_energy(&self) -> f64 {
        self.taps.iter().map(|t| t.norm_squared()).sum()
    }
}

/// Draws a fresh Rayleigh channel: `channel_span_symbols * sps` taps of
/// i.i.d. circular complex Gaussian entries, scaled so the expected total
/// tap energy per (receive, transmit) antenna pair is exactly one.
pub fn gen_channel<R: Rng>(cfg: &ScenarioConfig, rng: &mut R) -> ChannelRealization {
    let tap_count = cfg.channel_span_symbols * cfg.sps;
    // CN(0, 1/tap_count) per entry.
    let scale = (1.0 / tap_count as f64).sqrt();
    let taps = (0..tap_count)
        .map(|_| {
            DMatrix::from_fn(cfg.antennas, cfg.tx_antennas, |_, _| {
                standard_complex(rng) * scale
            })
        })
        .collect();
    ChannelRealization { taps }
}

/// Causal convolution of the channel with the per-antenna source streams.
/// `y_l[n] = sum_k sum_t taps[k][(l,t)] * src[t][n-k]`; samples before the
/// start are treated as zero, so the first `tap_count` outputs are
/// transient.
pub fn apply_channel(channel: &ChannelRealization, src: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let rx = channel.taps[0].nrows();
    let tx = channel.taps[0].ncols();
    debug_assert_eq!(src.len(), tx);
    let len = src[0].len();
    let mut out = vec![vec![Complex64::ZERO; len]; rx];
    for (k, tap) in channel.taps.iter().enumerate() {
        for t in 0..tx {
            let stream = &src[t];
            for (l, out_l) in out.iter_mut().enumerate() {
                let gain = tap[(l, t)];
                for n in k..len {
                    out_l[n] += gain * stream[n - k];
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn tap_count_is_span_times_sps() {
        let cfg = ScenarioConfig::default();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let ch = gen_channel(&cfg, &mut rng);
        assert_eq!(ch.tap_count(), 20);
        assert_eq!(ch.taps[0].nrows(), 2);
        assert_eq!(ch.taps[0].ncols(), 2);
    }

    #[test]
    fn tap_magnitudes_are_rayleigh() {
        // Kolmogorov-Smirnov test of |h| against the Rayleigh CDF implied by
        // CN(0, 1/tap_count) entries, at the 1% level.
        let cfg = ScenarioConfig {
            antennas: 1,
            tx_antennas: 1,
            ..ScenarioConfig::default()
        };
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let n = 100_000;
        let tap_count = (cfg.channel_span_symbols * cfg.sps) as f64;
        let sigma2 = 1.0 / tap_count; // per-entry complex variance
        let mut mags: Vec<f64> = Vec::with_capacity(n);
        let realizations = n / (tap_count as usize);
        for _ in 0..realizations {
            let ch = gen_channel(&cfg, &mut rng);
            for t in &ch.taps {
                mags.push(t[(0, 0)].norm());
            }
        }
        mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let m = mags.len() as f64;
        let mut d: f64 = 0.0;
        for (i, &x) in mags.iter().enumerate() {
            let cdf = 1.0 - (-x * x / sigma2).exp();
            let lo = i as f64 / m;
            let hi = (i + 1) as f64 / m;
            d = d.max((cdf - lo).abs()).max((hi - cdf).abs());
        }
        // critical value for alpha = 0.01
        let crit = 1.628 / m.sqrt();
        assert!(d < crit, "KS statistic {d} exceeds {crit}");
    }

    #[test]
    fn expected_total_energy_is_antenna_product() {
        let cfg = ScenarioConfig::default();
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let reps = 10_000;
        let mean: f64 = (0..reps)
            .map(|_| gen_channel(&cfg, &mut rng).total_energy())
            .sum::<f64>()
            / reps as f64;
        let expect = (cfg.antennas * cfg.tx_antennas) as f64;
        assert!(
            (mean - expect).abs() / expect < 0.02,
            "mean energy {mean} vs {expect}"
        );
    }

    #[test]
    fn convolution_matches_direct_sum() {
        let cfg = ScenarioConfig {
            antennas: 2,
            tx_antennas: 2,
            channel_span_symbols: 2,
            sps: 2,
            ..ScenarioConfig::default()
        };
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let ch = gen_channel(&cfg, &mut rng);
        let src: Vec<Vec<Complex64>> = (0..2)
            .map(|a| {
                (0..12)
                    .map(|n| Complex64::new((n + a) as f64, (n * a) as f64 * 0.5))
                    .collect()
            })
            .collect();
        let out = apply_channel(&ch, &src);
        for l in 0..2 {
            for n in 0..12 {
                let mut want = Complex64::ZERO;
                for (k, tap) in ch.taps.iter().enumerate() {
                    if n >= k {
                        for t in 0..2 {
                            want += tap[(l, t)] * src[t][n - k];
                        }
                    }
                }
                assert!((out[l][n] - want).norm() < 1e-12);
            }
        }
    }
}
