//! Index-map permutations for the Kronecker-structured coordinate changes.
//!
//! Commutation matrices and their Kronecker products with identities are
//! never materialized on the hot path; they are stored as index maps and
//! applied in O(n). Dense permutation matrices appear only in test oracles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation of `{0, .., size-1}` stored as source indices:
/// applying the map yields `out[k] = in[forward[k]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationMap {
    forward: Vec<usize>,
}

impl PermutationMap {
    /// The identity map on `size` elements.
    pub fn identity(size: usize) -> Self {
        Self {
            forward: (0..size).collect(),
        }
    }

    /// Builds a map from explicit source indices, rejecting non-bijections.
    pub fn from_forward(forward: Vec<usize>) -> Result<Self> {
        let size = forward.len();
        let mut seen = vec![false; size];
        for &src in &forward {
            if src >= size || seen[src] {
                return Err(Error::InvalidConfig(format!(
                    "forward map of length {size} is not a bijection"
                )));
            }
            seen[src] = true;
        }
        Ok(Self { forward })
    }

    pub fn size(&self) -> usize {
        self.forward.len()
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    /// The inverse map, satisfying `p.inverse().apply(&p.apply(x)) == x`.
    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.forward.len()];
        for (dst, &src) in self.forward.iter().enumerate() {
            inv[src] = dst;
        }
        Self { forward: inv }
    }

    /// Applies the permutation: `out[k] = in[forward[k]]`.
    pub fn apply<T: Copy>(&self, input: &[T]) -> Vec<T> {
        assert_eq!(
            input.len(),
            self.forward.len(),
            "permutation size {} does not match input length {}",
            self.forward.len(),
            input.len()
        );
        self.forward.iter().map(|&src| input[src]).collect()
    }
}

/// Problem dimensions shared by the transform and detector stages.
///
/// `windows >= 2 * antennas * cycle_period` keeps the double-stack diagonal
/// blocks of the interleaved sample covariance positive definite almost
/// surely.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimSpec {
    /// Receive antennas per array (`L`).
    pub antennas: usize,
    /// Cycle period in samples (`P`).
    pub cycle_period: usize,
    /// Cycle-period stacks per window (`N`).
    pub cycles_per_window: usize,
    /// Number of windows treated as i.i.d. snapshots (`M`).
    pub windows: usize,
}

impl DimSpec {
    pub fn new(
        antennas: usize,
        cycle_period: usize,
        cycles_per_window: usize,
        windows: usize,
    ) -> Result<Self> {
        if antennas == 0 || cycle_period == 0 || cycles_per_window == 0 {
            return Err(Error::InvalidConfig(
                "antennas, cycle_period and cycles_per_window must all be >= 1".into(),
            ));
        }
        let min_windows = 2 * antennas * cycle_period;
        if windows < min_windows {
            return Err(Error::InvalidConfig(format!(
                "windows ({windows}) must be >= 2 * antennas * cycle_period ({min_windows})"
            )));
        }
        Ok(Self {
            antennas,
            cycle_period,
            cycles_per_window,
            windows,
        })
    }

    /// Samples per window (`N * P`).
    pub fn window_len(&self) -> usize {
        self.cycles_per_window * self.cycle_period
    }

    /// Length of one stacked single-array vector (`L * N * P`).
    pub fn half_dim(&self) -> usize {
        self.antennas * self.window_len()
    }

    /// Length of one two-array snapshot (`2 * L * N * P`).
    pub fn dim(&self) -> usize {
        2 * self.half_dim()
    }

    /// Size of one cycle-period stack (`L * P`).
    pub fn stack_dim(&self) -> usize {
        self.antennas * self.cycle_period
    }

    /// Total samples across all windows (`M * N * P`).
    pub fn total_samples(&self) -> usize {
        self.windows * self.window_len()
    }
}

/// The commutation permutation: for any `rows x cols` matrix `A` in
/// column-major vec convention, `vec(A) = perm.apply(vec(A^T))`.
///
/// Index form: `out[i + j*rows] = in[j + i*cols]` for `i < rows`, `j < cols`.
pub fn commutation_permutation(rows: usize, cols: usize) -> PermutationMap {
    assert!(rows >= 1 && cols >= 1);
    let mut forward = vec![0; rows * cols];
    for j in 0..cols {
        for i in 0..rows {
            forward[i + j * rows] = j + i * cols;
        }
    }
    PermutationMap { forward }
}

/// Realizes `P (x) I_b` as a chunk-wise permutation: contiguous chunks of
/// `block_size` elements move according to `p`.
pub fn expand_kron_identity(p: &PermutationMap, block_size: usize) -> PermutationMap {
    assert!(block_size >= 1);
    let mut forward = Vec::with_capacity(p.size() * block_size);
    for &src_chunk in p.forward() {
        let base = src_chunk * block_size;
        forward.extend(base..base + block_size);
    }
    PermutationMap { forward }
}

/// Maps the half-stacked two-array vector `[y_s; y_r]` to the interleaved
/// vector holding the surveillance and reference antenna chunks of each
/// time sample in alternating order.
///
/// As a dense matrix this is the Kronecker product of the `2 x NP`
/// commutation matrix with the antenna-sized identity; its transpose is the
/// permutation connecting the interleaved and stacked transform domains.
pub fn interleave_map(dims: &DimSpec) -> PermutationMap {
    expand_kron_identity(
        &commutation_permutation(2, dims.window_len()),
        dims.antennas,
    )
}
