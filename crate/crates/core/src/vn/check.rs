use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::mode_spectrum;
use crate::tensor::DenseTensor;

/// Outcome of checking `⟨X, Y⟩ ≤ ⟨σ⁽ᵈ⁾(X), σ⁽ᵈ⁾(Y)⟩` in every mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VnReport {
    pub lhs: f64,
    pub rhs_per_mode: Vec<f64>,
    /// `rhs - lhs`, one per mode.
    pub gap_per_mode: Vec<f64>,
    pub equality_per_mode: Vec<bool>,
    pub equality_all_modes: bool,
    pub tol: f64,
    /// `‖X‖·‖Y‖`, or 1 when either tensor is zero.
    pub scale: f64,
}

impl VnReport {
    /// True when no mode's gap is more negative than `-tol·scale`.
    pub fn inequality_holds(&self) -> bool {
        self.gap_per_mode
            .iter()
            .all(|&g| g >= -self.tol * self.scale)
    }
}

pub fn vn_check(x: &DenseTensor, y: &DenseTensor, tol: f64) -> Result<VnReport> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Validation(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let lhs = x.inner_product(y)?;
    let nx = x.frobenius_norm();
    let ny = y.frobenius_norm();
    let scale = if nx == 0.0 || ny == 0.0 { 1.0 } else { nx * ny };

    let mut rhs_per_mode = Vec::with_capacity(x.ndim());
    for d in 1..=x.ndim() {
        let sx = mode_spectrum(x, d)?;
        let sy = mode_spectrum(y, d)?;
        rhs_per_mode.push(sx.iter().zip(&sy).map(|(a, b)| a * b).sum::<f64>());
    }
    let gap_per_mode: Vec<f64> = rhs_per_mode.iter().map(|r| r - lhs).collect();
    let equality_per_mode: Vec<bool> = gap_per_mode
        .iter()
        .map(|g| g.abs() <= tol * scale)
        .collect();
    let equality_all_modes = equality_per_mode.iter().all(|&e| e);
    Ok(VnReport {
        lhs,
        rhs_per_mode,
        gap_per_mode,
        equality_per_mode,
        equality_all_modes,
        tol,
        scale,
    })
}
