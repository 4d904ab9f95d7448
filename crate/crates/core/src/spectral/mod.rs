//! Matrix SVD and the higher-order SVD.

mod hosvd;
mod svd;

pub use hosvd::{
    core_orthogonality_defect, hosvd, hosvd_with_rank_tol, mode_ranks, mode_spectrum, reconstruct,
    sigma_map, HosvdFactors, DEFAULT_RANK_TOL,
};
pub use svd::{matrix_svd, SvdResult};
