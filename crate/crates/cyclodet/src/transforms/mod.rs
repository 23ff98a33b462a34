//! Structured linear-algebra machinery: index-map permutations, the
//! DFT-based coordinate change, diagonal-block extraction, and stable
//! log-determinants.

mod blocks;
mod dft;
mod perm;

pub use blocks::{
    block_diag_extract, build_block_circulant, hermitian_logdet, hermitian_logdet_loaded,
    BlockDiagEstimate,
};
pub use dft::{dft_reorder_transform, DftReorder};
pub use perm::{
    commutation_permutation, expand_kron_identity, interleave_map, DimSpec, PermutationMap,
};
