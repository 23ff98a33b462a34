//! Cyclostationary source synthesis: QPSK symbols, raised-cosine pulse
//! shaping, oversampling.

use num_complex::Complex64;
use rand::Rng;

use super::config::ScenarioConfig;

/// Unit-energy QPSK symbols, i.i.d. uniform over the four constellation
/// points `(+-1 +-j)/sqrt(2)`.
pub fn qpsk_symbols<R: Rng>(count: usize, rng: &mut R) -> Vec<Complex64> {
    const SCALE: f64 = std::f64::consts::FRAC_1_SQRT_2;
    (0..count)
        .map(|_| {
            let bits: u8 = rng.random_range(0..4);
            let re = if bits & 1 == 0 { SCALE } else { -SCALE };
            let im = if bits & 2 == 0 { SCALE } else { -SCALE };
            Complex64::new(re, im)
        })
        .collect()
}

/// Truncated raised-cosine impulse response sampled at `sps` samples per
/// symbol, spanning `span_symbols` symbols, normalized to unit energy.
///
/// Tap count is `span_symbols * sps + 1`; the two removable singularities
/// (t = 0 and |2*rolloff*t| = 1) are filled with their limits.
pub fn raised_cosine_taps(rolloff: f64, span_symbols: usize, sps: usize) -> Vec<f64> {
    let half = (span_symbols * sps) / 2;
    let count = span_symbols * sps + 1;
    let mut taps: Vec<f64> = (0..count)
        .map(|k| {
            let t = (k as f64 - half as f64) / sps as f64;
            raised_cosine_value(t, rolloff)
        })
        .collect();
    let energy: f64 = taps.iter().map(|h| h * h).sum();
    let scale = 1.0 / energy.sqrt();
    for h in &mut taps {
        *h *= scale;
    }
    taps
}

fn raised_cosine_value(t: f64, rolloff: f64) -> f64 {
    let sinc = |x: f64| {
        if x.abs() < 1e-12 {
            1.0
        } else {
            (std::f64::consts::PI * x).sin() / (std::f64::consts::PI * x)
        }
    };
    if t.abs() < 1e-12 {
        return 1.0;
    }
    let denom = 1.0 - (2.0 * rolloff * t).powi(2);
    if denom.abs() < 1e-9 {
        // limit at |t| = 1/(2*rolloff)
        return std::f64::consts::FRAC_PI_4 * sinc(1.0 / (2.0 * rolloff));
    }
    sinc(t) * (std::f64::consts::PI * rolloff * t).cos() / denom
}

/// Upsamples the symbol stream by `sps` and filters with `taps`.
/// Output index `n` carries `sum_m sym[m] * taps[n - m*sps]`.
fn shape(symbols: &[Complex64], taps: &[f64], sps: usize, length: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::ZERO; length];
    for (m, &sym) in symbols.iter().enumerate() {
        let base = m * sps;
        if base >= length {
            break;
        }
        let reach = (length - base).min(taps.len());
        for (k, &h) in taps[..reach].iter().enumerate() {
            out[base + k] += sym * h;
        }
    }
    out
}

/// Generates `length` samples for each of the transmitter's antennas.
///
/// Streams are independent across antennas, each a raised-cosine-shaped
/// QPSK waveform, cyclostationary with cycle period equal to `sps`.
pub fn gen_cs_source<R: Rng>(
    cfg: &ScenarioConfig,
    length: usize,
    rng: &mut R,
) -> Vec<Vec<Complex64>> {
    let taps = raised_cosine_taps(cfg.rc_rolloff, cfg.rc_span_symbols, cfg.sps);
    let num_symbols = (length + taps.len()) / cfg.sps + 2;
    (0..cfg.tx_antennas)
        .map(|_| {
            let symbols = qpsk_symbols(num_symbols, rng);
            shape(&symbols, &taps, cfg.sps, length)
        })
        .collect()
}
