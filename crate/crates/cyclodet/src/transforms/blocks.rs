//! Diagonal-block extraction and numerically stable log-determinants.
//!
//! Determinants are only ever evaluated in the log domain through a
//! Cholesky factorization; at realistic SNRs the raw product of
//! stack-sized block determinants underflows double precision.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// An ordered list of Hermitian diagonal blocks cut from a larger matrix.
#[derive(Debug, Clone)]
pub struct BlockDiagEstimate {
    block_size: usize,
    blocks: Vec<DMatrix<Complex64>>,
}

impl BlockDiagEstimate {
    pub fn new(block_size: usize, blocks: Vec<DMatrix<Complex64>>) -> Self {
        debug_assert!(blocks
            .iter()
            .all(|b| b.nrows() == block_size && b.ncols() == block_size));
        Self { block_size, blocks }
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn blocks(&self) -> &[DMatrix<Complex64>] {
        &self.blocks
    }

    pub fn total_dim(&self) -> usize {
        self.block_size * self.blocks.len()
    }

    /// Sum of block log-determinants, i.e. the log-determinant of the
    /// block-diagonal matrix the blocks describe.
    pub fn log_det(&self, loading: f64) -> Result<f64> {
        let mut sum = 0.0;
        for block in &self.blocks {
            sum += hermitian_logdet_loaded(block, loading)?;
        }
        Ok(sum)
    }

    /// Largest relative Hermitian asymmetry across all blocks.
    pub fn hermitian_defect(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                let scale = b.norm().max(f64::MIN_POSITIVE);
                ((b - b.adjoint()).norm()) / scale
            })
            .fold(0.0, f64::max)
    }

    /// Assembles the dense block-diagonal matrix. Test-oracle convenience;
    /// the detectors never materialize this.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = self.total_dim();
        let mut out = DMatrix::zeros(dim, dim);
        for (k, block) in self.blocks.iter().enumerate() {
            let base = k * self.block_size;
            out.view_mut((base, base), (self.block_size, self.block_size))
                .copy_from(block);
        }
        out
    }
}

/// Cuts the ordered diagonal blocks of size `block_size` out of `a`.
pub fn block_diag_extract(a: &DMatrix<Complex64>, block_size: usize) -> Result<BlockDiagEstimate> {
    let dim = a.nrows();
    if a.ncols() != dim || block_size == 0 || !dim.is_multiple_of(block_size) {
        return Err(Error::IndivisibleBlocks { dim, block_size });
    }
    let count = dim / block_size;
    let blocks = (0..count)
        .map(|k| {
            a.view((k * block_size, k * block_size), (block_size, block_size))
                .into_owned()
        })
        .collect();
    Ok(BlockDiagEstimate::new(block_size, blocks))
}

/// log det of a Hermitian positive-definite matrix via Cholesky.
pub fn hermitian_logdet(b: &DMatrix<Complex64>) -> Result<f64> {
    hermitian_logdet_loaded(b, 0.0)
}

/// log det of `b + loading * I`. `loading = 0` reports failure instead of
/// regularizing, so dimension bugs surface rather than being masked.
///
/// The lower Hermitian Cholesky factor is built in place with an explicit
/// positivity check on every pivot; a pivot that is not strictly positive
/// (or not finite) signals [`Error::NotPositiveDefinite`].
pub fn hermitian_logdet_loaded(b: &DMatrix<Complex64>, loading: f64) -> Result<f64> {
    debug_assert_eq!(b.nrows(), b.ncols());
    let n = b.nrows();
    let mut m = b.clone_owned();
    let mut log_det = 0.0;
    for j in 0..n {
        let mut pivot = m[(j, j)].re + loading;
        for k in 0..j {
            pivot -= m[(j, k)].norm_sqr();
        }
        if !pivot.is_finite() || pivot <= 0.0 {
            return Err(Error::NotPositiveDefinite);
        }
        let d = pivot.sqrt();
        log_det += pivot.ln();
        for i in j + 1..n {
            let mut v = m[(i, j)];
            for k in 0..j {
                v -= m[(i, k)] * m[(j, k)].conj();
            }
            m[(i, j)] = v / d;
        }
    }
    Ok(log_det)
}

/// Builds the block-circulant matrix whose first block row is `first_block_row`.
pub fn build_block_circulant(first_block_row: &[DMatrix<Complex64>]) -> Result<DMatrix<Complex64>> {
    let count = first_block_row.len();
    if count == 0 {
        return Err(Error::DimensionMismatch("empty block row".into()));
    }
    let size = first_block_row[0].nrows();
    for b in first_block_row {
        if b.nrows() != size || b.ncols() != size {
            return Err(Error::DimensionMismatch(format!(
                "all blocks must be {size}x{size}"
            )));
        }
    }
    let dim = count * size;
    let mut out = DMatrix::zeros(dim, dim);
    for r in 0..count {
        for c in 0..count {
            let block = &first_block_row[(count + c - r) % count];
            out.view_mut((r * size, c * size), (size, size))
                .copy_from(block);
        }
    }
    Ok(out)
}
