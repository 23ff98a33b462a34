//! Dense-matrix oracles shared by integration tests. Everything here is
//! built directly from definitions (explicit DFT sums, indicator-placed
//! permutation entries), independent of the library's fast paths.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha12Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn standard_complex<R: Rng>(rng: &mut R) -> Complex64 {
    use rand_distr::{Distribution, StandardNormal};
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_vector(rng: &mut ChaCha12Rng, len: usize) -> DVector<Complex64> {
    DVector::from_fn(len, |_, _| standard_complex(rng))
}

pub fn random_matrix(rng: &mut ChaCha12Rng, rows: usize, cols: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| standard_complex(rng))
}

/// Hermitian positive-definite matrix from an averaged outer product plus a
/// small ridge.
pub fn random_pd(rng: &mut ChaCha12Rng, dim: usize) -> DMatrix<Complex64> {
    let a = random_matrix(rng, dim, dim);
    &a * a.adjoint() + DMatrix::identity(dim, dim) * c(0.1, 0.0)
}

/// The commutation matrix satisfying `vec(A) = K vec(A^T)` for a
/// `rows x cols` matrix `A` in column-major convention, placed entry by
/// entry from that identity.
pub fn dense_commutation(rows: usize, cols: usize) -> DMatrix<Complex64> {
    let dim = rows * cols;
    let mut k = DMatrix::zeros(dim, dim);
    for i in 0..rows {
        for j in 0..cols {
            k[(i + j * rows, j + i * cols)] = c(1.0, 0.0);
        }
    }
    k
}

/// Unitary DFT matrix: `F[j, k] = exp(-2 pi i j k / n) / sqrt(n)`.
pub fn dense_dft(n: usize) -> DMatrix<Complex64> {
    let scale = 1.0 / (n as f64).sqrt();
    DMatrix::from_fn(n, n, |j, k| {
        let angle = -2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64;
        c(angle.cos(), angle.sin()) * scale
    })
}

pub fn identity(n: usize) -> DMatrix<Complex64> {
    DMatrix::identity(n, n)
}

/// Dense single-array transform: the bin-regrouping commutation Kroneckered
/// with the antenna identity, times the adjoint of the DFT Kroneckered with
/// the antenna identity.
pub fn dense_half_transform(antennas: usize, n: usize, p: usize) -> DMatrix<Complex64> {
    let np = n * p;
    let regroup = dense_commutation(p, n).kronecker(&identity(antennas));
    let dft = dense_dft(np).kronecker(&identity(antennas));
    regroup * dft.adjoint()
}

/// Dense two-array transform: block-diagonal with one half-transform per
/// array.
pub fn dense_pair_transform(antennas: usize, n: usize, p: usize) -> DMatrix<Complex64> {
    identity(2).kronecker(&dense_half_transform(antennas, n, p))
}

/// Dense interleaving permutation: commutation of the `2 x NP` chunk grid
/// Kroneckered with the antenna identity.
pub fn dense_interleave(antennas: usize, np: usize) -> DMatrix<Complex64> {
    dense_commutation(2, np).kronecker(&identity(antennas))
}

/// Zeroes everything outside the diagonal blocks of the given size.
pub fn dense_block_diag(a: &DMatrix<Complex64>, block: usize) -> DMatrix<Complex64> {
    let dim = a.nrows();
    assert_eq!(dim % block, 0);
    let mut out = DMatrix::zeros(dim, dim);
    for k in 0..dim / block {
        for i in 0..block {
            for j in 0..block {
                out[(k * block + i, k * block + j)] = a[(k * block + i, k * block + j)];
            }
        }
    }
    out
}

/// log det through the eigenvalues of a Hermitian matrix; independent of
/// the library's Cholesky route.
pub fn eigen_logdet(a: &DMatrix<Complex64>) -> f64 {
    a.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|&l| l.ln())
        .sum()
}

/// Frobenius mass outside the diagonal blocks of the given size.
pub fn off_block_diag_mass(a: &DMatrix<Complex64>, block: usize) -> f64 {
    let dim = a.nrows();
    let mut sum = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            if i / block != j / block {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Stacks window `m` of an observation into `[y_s; y_r]`.
pub fn stack_window(
    obs: &cyclodet::scenario::ObservationPair,
    dims: &cyclodet::DimSpec,
    m: usize,
) -> DVector<Complex64> {
    let l = dims.antennas;
    let window = dims.window_len();
    let half = dims.half_dim();
    let mut w = DVector::from_element(dims.dim(), c(0.0, 0.0));
    for t in 0..window {
        for a in 0..l {
            w[t * l + a] = obs.u_s[a][m * window + t];
            w[half + t * l + a] = obs.u_r[a][m * window + t];
        }
    }
    w
}

/// Brute-force likelihood-ratio statistic: materializes the DFT matrix,
/// both commutation matrices, the connecting permutation and the full
/// block-diagonal covariance estimates, then takes eigenvalue
/// log-determinants of the dense estimates.
pub fn dense_glr(obs: &cyclodet::scenario::ObservationPair, dims: &cyclodet::DimSpec) -> f64 {
    let dim = dims.dim();
    let half = dims.half_dim();
    let transform = dense_pair_transform(dims.antennas, dims.cycles_per_window, dims.cycle_period);

    let mut q = DMatrix::<Complex64>::zeros(dim, dim);
    for m in 0..dims.windows {
        let z = &transform * stack_window(obs, dims, m);
        q += &z * z.adjoint();
    }
    q /= c(dims.windows as f64, 0.0);

    let qs = q.view((0, 0), (half, half)).into_owned();
    let qr = q.view((half, half), (half, half)).into_owned();
    let mut s0 = DMatrix::<Complex64>::zeros(dim, dim);
    s0.view_mut((0, 0), (half, half))
        .copy_from(&dense_block_diag(&qs, dims.antennas));
    s0.view_mut((half, half), (half, half))
        .copy_from(&dense_block_diag(&qr, dims.stack_dim()));

    let t = dense_interleave(dims.antennas, dims.window_len()).transpose();
    let q_tilde = t.transpose() * &q * &t;
    let s1_tilde = dense_block_diag(&q_tilde, 2 * dims.stack_dim());
    let s1 = &t * s1_tilde * t.transpose();

    eigen_logdet(&s0) - eigen_logdet(&s1)
}

/// A random invertible block-diagonal gain with antenna-sized blocks on the
/// surveillance half and stack-sized blocks on the reference half, applied
/// to every snapshot of the batch.
pub fn apply_structured_gain(
    batch: &cyclodet::SnapshotBatch,
    rng: &mut ChaCha12Rng,
) -> cyclodet::SnapshotBatch {
    let dims = batch.dims;
    let half = dims.half_dim();
    let l = dims.antennas;
    let lp = dims.stack_dim();
    let mut random_block = |size: usize| -> DMatrix<Complex64> {
        DMatrix::from_fn(size, size, |i, j| {
            let g = standard_complex(rng) * 0.5;
            if i == j {
                g + c(2.0, 0.0)
            } else {
                g
            }
        })
    };
    let s_gains: Vec<DMatrix<Complex64>> =
        (0..dims.window_len()).map(|_| random_block(l)).collect();
    let r_gains: Vec<DMatrix<Complex64>> = (0..dims.cycles_per_window)
        .map(|_| random_block(lp))
        .collect();
    let snapshots = batch
        .snapshots
        .iter()
        .map(|z| {
            let mut out = DVector::from_element(z.len(), c(0.0, 0.0));
            for (k, g) in s_gains.iter().enumerate() {
                for i in 0..l {
                    let mut acc = c(0.0, 0.0);
                    for j in 0..l {
                        acc += g[(i, j)] * z[k * l + j];
                    }
                    out[k * l + i] = acc;
                }
            }
            for (k, g) in r_gains.iter().enumerate() {
                for i in 0..lp {
                    let mut acc = c(0.0, 0.0);
                    for j in 0..lp {
                        acc += g[(i, j)] * z[half + k * lp + j];
                    }
                    out[half + k * lp + i] = acc;
                }
            }
            out
        })
        .collect();
    cyclodet::SnapshotBatch { dims, snapshots }
}

/// Gaussian snapshot batch with i.i.d. standard circular entries.
pub fn gaussian_batch(dims: cyclodet::DimSpec, rng: &mut ChaCha12Rng) -> cyclodet::SnapshotBatch {
    let dim = dims.dim();
    let snapshots = (0..dims.windows).map(|_| random_vector(rng, dim)).collect();
    cyclodet::SnapshotBatch { dims, snapshots }
}
