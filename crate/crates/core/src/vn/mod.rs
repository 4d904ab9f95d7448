//! The tensor von Neumann inequality `⟨X, Y⟩ ≤ ⟨σ⁽ᵈ⁾(X), σ⁽ᵈ⁾(Y)⟩`:
//! checking it, building pairs that attain equality in every mode, and
//! recovering the block structure of such pairs.

mod blocks;
mod check;
mod classes;
mod extract;

pub use blocks::{
    build_block_diagonal, construct_equality_pair, BlockDiagonalSpec, EqualityWitness, Permutation,
    SPECTRAL_SEPARATION,
};
pub use check::{vn_check, VnReport};
pub use classes::{ratio_classes, RatioClasses};
pub use extract::{extract_equality_structure, grouping_tolerance};
