//! Temporally colored, spatially correlated Gaussian noise.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use super::config::ScenarioConfig;
use crate::rng::standard_complex;

/// Lower Cholesky factor of the exponential spatial correlation matrix
/// `[corr^|i-j|]`, used to mix antenna streams.
fn spatial_mixing(antennas: usize, corr: f64) -> DMatrix<f64> {
    let sigma = DMatrix::from_fn(antennas, antennas, |i, j| {
        corr.powi((i as i32 - j as i32).abs())
    });
    nalgebra::Cholesky::new(sigma)
        .expect("exponential correlation matrix is positive definite for |corr| < 1")
        .l()
}

/// Generates `length` steady-state samples of colored noise for one array.
///
/// A single random unit-energy MA filter is drawn per call and applied to
/// every antenna's white innovations; spatial correlation is imposed
/// afterwards by the Cholesky factor of the exponential profile. Per-antenna
/// average power is one by construction.
pub fn gen_colored_noise<R: Rng>(
    cfg: &ScenarioConfig,
    length: usize,
    rng: &mut R,
) -> Vec<Vec<Complex64>> {
    let order = cfg.ma_order;
    let antennas = cfg.antennas;

    // One temporal filter per call, shared across antennas.
    let mut filter: Vec<Complex64> = (0..=order).map(|_| standard_complex(rng)).collect();
    let energy: f64 = filter.iter().map(|g| g.norm_sqr()).sum();
    let scale = 1.0 / energy.sqrt();
    for g in &mut filter {
        *g *= scale;
    }

    // Full-overlap MA outputs only: innovations run `order` samples early.
    let filtered: Vec<Vec<Complex64>> = (0..antennas)
        .map(|_| {
            let innov: Vec<Complex64> =
                (0..length + order).map(|_| standard_complex(rng)).collect();
            (0..length)
                .map(|n| {
                    filter
                        .iter()
                        .enumerate()
                        .map(|(k, &g)| g * innov[n + order - k])
                        .sum()
                })
                .collect()
        })
        .collect();

    if antennas == 1 {
        return filtered;
    }
    let mix = spatial_mixing(antennas, cfg.spatial_corr);
    (0..antennas)
        .map(|l| {
            (0..length)
                .map(|n| {
                    (0..=l)
                        .map(|k| filtered[k][n] * mix[(l, k)])
                        .sum::<Complex64>()
                })
                .collect()
        })
        .collect()
}
