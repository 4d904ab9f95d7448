//! Dense real tensors, the higher-order SVD, and the tensor von Neumann
//! inequality `⟨X, Y⟩ ≤ ⟨σ⁽ᵈ⁾(X), σ⁽ᵈ⁾(Y)⟩`.
//!
//! Modes and multi-indices are 1-based throughout the public API.

pub mod cli;
pub mod error;
pub mod io;
pub mod matrix;
pub mod random;
pub mod spectral;
pub mod tensor;
pub mod vn;

pub use error::{Error, Result};
pub use matrix::{kron_chain, Matrix};
pub use spectral::{
    core_orthogonality_defect, hosvd, hosvd_with_rank_tol, matrix_svd, mode_ranks, mode_spectrum,
    reconstruct, sigma_map, HosvdFactors, SvdResult, DEFAULT_RANK_TOL,
};
pub use tensor::{DenseTensor, MultiIndex};
pub use vn::{
    build_block_diagonal, construct_equality_pair, extract_equality_structure, ratio_classes,
    vn_check, BlockDiagonalSpec, EqualityWitness, Permutation, RatioClasses, VnReport,
};
