//! Recovery of the equality structure from a pair that attains equality
//! in every mode.
//!
//! Equality forces `X_(d)` and `Y_(d)` to share ordered singular vectors.
//! One SVD basis per mode is taken from the tensor with the larger rank
//! there, both cores are formed in that basis, and the consequences are
//! verified numerically instead of assumed: rows `k` of the two mode-`d`
//! core matricizations must be proportional with factors `σ_k(X)`,
//! `σ_k(Y)`, and after sorting indices into ratio classes all mass inside
//! the rank box must sit in the diagonal blocks.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::spectral::{matrix_svd, HosvdFactors, SvdResult, DEFAULT_RANK_TOL};
use crate::tensor::DenseTensor;
use crate::vn::blocks::{BlockLayout, EqualityWitness, Permutation};
use crate::vn::{ratio_classes, vn_check};

/// Relative tolerance used to group spectrum ratios, derived from the
/// equality tolerance.
pub fn grouping_tolerance(tol: f64) -> f64 {
    tol.sqrt().max(tol)
}

pub fn extract_equality_structure(
    x: &DenseTensor,
    y: &DenseTensor,
    tol: f64,
) -> Result<EqualityWitness> {
    let report = vn_check(x, y, tol)?;
    if x.is_zero() || y.is_zero() {
        return Err(Error::Precondition(
            "both tensors must be nonzero to recover a structure".into(),
        ));
    }
    if !report.equality_all_modes {
        return Err(Error::Precondition(format!(
            "equality does not hold at tol {tol:e}: relative gaps {:?}",
            report
                .gap_per_mode
                .iter()
                .map(|g| g / report.scale)
                .collect::<Vec<_>>()
        )));
    }
    let ndim = x.ndim();
    let scale = report.scale;

    let mut factors = Vec::with_capacity(ndim);
    let mut spectra_x = Vec::with_capacity(ndim);
    let mut spectra_y = Vec::with_capacity(ndim);
    let mut ranks_x = Vec::with_capacity(ndim);
    let mut ranks_y = Vec::with_capacity(ndim);
    for d in 1..=ndim {
        let n = x.shape()[d - 1];
        let sx = matrix_svd(&x.matricize(d)?);
        let sy = matrix_svd(&y.matricize(d)?);
        let (rx, ry) = (rank(&sx.sigma), rank(&sy.sigma));
        let basis =
            if rx > ry || (rx == ry && min_relative_gap(&sx, rx) >= min_relative_gap(&sy, ry)) {
                sx.u.clone()
            } else {
                sy.u.clone()
            };
        factors.push(basis);
        spectra_x.push(padded(sx.sigma, n));
        spectra_y.push(padded(sy.sigma, n));
        ranks_x.push(rx);
        ranks_y.push(ry);
    }

    let transposed: Vec<Matrix> = factors.iter().map(Matrix::transpose).collect();
    let core_x = x.multiply_all_modes(&transposed)?;
    let core_y = y.multiply_all_modes(&transposed)?;

    check_row_proportionality(&core_x, &core_y, &spectra_x, &spectra_y, tol * scale)?;

    let fx = HosvdFactors {
        core: core_x,
        factors: factors.clone(),
        spectra: spectra_x,
        ranks: ranks_x.clone(),
    };
    let fy = HosvdFactors {
        core: core_y,
        factors: factors.clone(),
        spectra: spectra_y,
        ranks: ranks_y.clone(),
    };
    let classes = ratio_classes(&fx, &fy, grouping_tolerance(tol))?;

    let permutations: Vec<Permutation> = classes
        .index_sets
        .iter()
        .zip(x.shape())
        .map(|(sets, &n)| class_permutation(sets, n))
        .collect::<Result<_>>()?;
    let pi: Vec<Matrix> = permutations.iter().map(Permutation::to_matrix).collect();
    let dx = fx.core.multiply_all_modes(&pi)?;
    let dy = fy.core.multiply_all_modes(&pi)?;
    let factors_w: Vec<Matrix> = factors
        .iter()
        .zip(&pi)
        .map(|(u, p)| u.matmul(&p.transpose()))
        .collect::<Result<_>>()?;

    let counts = classes.counts();
    let block_shapes: Vec<Vec<usize>> = (0..classes.len())
        .map(|l| counts.iter().map(|mode| mode[l]).collect())
        .collect();
    let witness = EqualityWitness {
        factors_w,
        dx,
        dy,
        block_shapes,
        ratios: classes.ratios,
        permutations: Some(permutations),
        seed: None,
    };

    let rank_box: Vec<usize> = ranks_x
        .iter()
        .zip(&ranks_y)
        .map(|(a, b)| *a.max(b))
        .collect();
    check_block_structure(
        &witness,
        &rank_box,
        tol * x.frobenius_norm(),
        tol * y.frobenius_norm(),
    )?;
    Ok(witness)
}

fn rank(sigma: &[f64]) -> usize {
    let lead = sigma.first().copied().unwrap_or(0.0);
    if lead == 0.0 {
        0
    } else {
        sigma
            .iter()
            .filter(|&&s| s > DEFAULT_RANK_TOL * lead)
            .count()
    }
}

fn padded(mut sigma: Vec<f64>, n: usize) -> Vec<f64> {
    sigma.resize(n, 0.0);
    sigma
}

/// Smallest `(σ_k - σ_{k+1}) / σ_1` among the leading `r` values. Larger
/// gaps give better-determined singular vectors.
fn min_relative_gap(svd: &SvdResult, r: usize) -> f64 {
    let sigma = &svd.sigma;
    if r == 0 {
        return 0.0;
    }
    (0..r - 1)
        .map(|k| (sigma[k] - sigma[k + 1]) / sigma[0])
        .fold(f64::INFINITY, f64::min)
}

/// `σ_{i_d}(Y)·Sx[i] = σ_{i_d}(X)·Sy[i]` for every entry and mode.
fn check_row_proportionality(
    core_x: &DenseTensor,
    core_y: &DenseTensor,
    spectra_x: &[Vec<f64>],
    spectra_y: &[Vec<f64>],
    threshold: f64,
) -> Result<()> {
    for d in 0..core_x.ndim() {
        let mut worst: Option<(f64, Vec<usize>)> = None;
        for (flat, index) in core_x.indices().enumerate() {
            let k = index.0[d] - 1;
            let residual = (spectra_y[d][k] * core_x.data()[flat]
                - spectra_x[d][k] * core_y.data()[flat])
                .abs();
            if residual > threshold && worst.as_ref().is_none_or(|(w, _)| residual > *w) {
                worst = Some((residual, index.0));
            }
        }
        if let Some((residual, indices)) = worst {
            return Err(Error::Degeneracy {
                mode: d + 1,
                indices,
                detail: format!(
                    "core rows are not proportional: residual {residual:e} exceeds {threshold:e}"
                ),
            });
        }
    }
    Ok(())
}

/// `π(I_{d,1}) = {1..m_1}`, `π(I_{d,2}) = {m_1+1..}`, …; indices outside
/// every class follow in ascending order.
fn class_permutation(sets: &[Vec<usize>], n: usize) -> Result<Permutation> {
    let mut images = vec![0; n];
    let mut next = 1;
    for &k in sets.iter().flatten() {
        images[k - 1] = next;
        next += 1;
    }
    for image in images.iter_mut().filter(|i| **i == 0) {
        *image = next;
        next += 1;
    }
    Permutation::from_images(images)
}

fn check_block_structure(
    w: &EqualityWitness,
    rank_box: &[usize],
    threshold_x: f64,
    threshold_y: f64,
) -> Result<()> {
    let layout = BlockLayout::new(&w.block_shapes);
    for (flat, index) in w.dx.indices().enumerate() {
        let a = w.dx.data()[flat];
        let b = w.dy.data()[flat];
        match layout.block_of(&index.0) {
            Some(l) => {
                let residual = (a - w.ratios[l] * b).abs();
                if residual > threshold_x {
                    return Err(Error::Degeneracy {
                        mode: 1,
                        indices: index.0,
                        detail: format!(
                            "block {} is not proportional with ratio {}: residual {residual:e}",
                            l + 1,
                            w.ratios[l]
                        ),
                    });
                }
            }
            None => {
                let inside = index.0.iter().zip(rank_box).all(|(&i, &r)| i <= r);
                if inside && (a.abs() > threshold_x || b.abs() > threshold_y) {
                    let mode = (0..index.0.len())
                        .find(|&d| {
                            layout.block_in_mode(d, index.0[d])
                                != layout.block_in_mode(0, index.0[0])
                        })
                        .unwrap_or(0);
                    return Err(Error::Degeneracy {
                        mode: mode + 1,
                        indices: index.0,
                        detail: format!("mass outside the diagonal blocks: DX = {a:e}, DY = {b:e}"),
                    });
                }
            }
        }
    }
    Ok(())
}
