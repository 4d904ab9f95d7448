use crate::error::{Error, Result};
use crate::spectral::HosvdFactors;

/// Spectrum indices grouped by the common value of `σ⁽ᵈ⁾_k(X) / σ⁽ᵈ⁾_k(Y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioClasses {
    /// Class values, strictly decreasing.
    pub ratios: Vec<f64>,
    /// `index_sets[d][l]`: 1-based mode-`d` indices whose ratio falls in
    /// class `l`, ascending. May be empty.
    pub index_sets: Vec<Vec<Vec<usize>>>,
}

impl RatioClasses {
    pub fn len(&self) -> usize {
        self.ratios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratios.is_empty()
    }

    /// `counts[d][l] = |I_{d,l}|`.
    pub fn counts(&self) -> Vec<Vec<usize>> {
        self.index_sets
            .iter()
            .map(|mode| mode.iter().map(Vec::len).collect())
            .collect()
    }
}

/// Clusters the per-index spectrum ratios of two decompositions.
///
/// Only indices `k ≤ min(r_x, r_y)` take part. Ratios are visited in
/// decreasing order; a ratio joins the current class while it lies
/// within `group_tol` (relative) of the class's first member. Each
/// class value is the mean of its members.
pub fn ratio_classes(fx: &HosvdFactors, fy: &HosvdFactors, group_tol: f64) -> Result<RatioClasses> {
    if fx.core.shape() != fy.core.shape() {
        return Err(Error::Shape(format!(
            "decompositions of shapes {:?} and {:?}",
            fx.core.shape(),
            fy.core.shape()
        )));
    }
    if !(group_tol > 0.0 && group_tol.is_finite()) {
        return Err(Error::Validation(format!(
            "grouping tolerance must be positive, got {group_tol}"
        )));
    }
    let ndim = fx.core.ndim();
    let mut entries: Vec<(f64, usize, usize)> = Vec::new();
    for d in 0..ndim {
        let (rx, ry) = (fx.ranks[d], fy.ranks[d]);
        if rx > ry {
            return Err(Error::RankMismatch {
                mode: d + 1,
                detail: format!(
                    "sigma_{}(Y) vanishes while sigma_{}(X) = {:e} (ranks {rx} vs {ry})",
                    ry + 1,
                    ry + 1,
                    fx.spectra[d][ry]
                ),
            });
        }
        for k in 0..rx {
            entries.push((fx.spectra[d][k] / fy.spectra[d][k], d, k));
        }
    }
    entries.sort_by(|a, b| b.0.total_cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));

    let mut members: Vec<Vec<(f64, usize, usize)>> = Vec::new();
    for entry in entries {
        match members.last_mut() {
            Some(class) if class[0].0 - entry.0 <= group_tol * class[0].0 => class.push(entry),
            _ => members.push(vec![entry]),
        }
    }

    let ratios = members
        .iter()
        .map(|class| class.iter().map(|e| e.0).sum::<f64>() / class.len() as f64)
        .collect();
    let mut index_sets = vec![vec![Vec::new(); members.len()]; ndim];
    for (l, class) in members.iter().enumerate() {
        for &(_, d, k) in class {
            index_sets[d][l].push(k + 1);
        }
    }
    for mode in &mut index_sets {
        for set in mode.iter_mut() {
            set.sort_unstable();
        }
    }
    Ok(RatioClasses { ratios, index_sets })
}
