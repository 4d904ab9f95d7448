use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::spectral::svd::matrix_svd;
use crate::tensor::DenseTensor;

/// Relative threshold (against the leading singular value) for mode ranks.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// `X = core ×_1 U⁽¹⁾ … ×_D U⁽ᴰ⁾` with orthogonal factors and an
/// all-orthogonal core.
#[derive(Clone, Debug)]
pub struct HosvdFactors {
    pub core: DenseTensor,
    pub factors: Vec<Matrix>,
    /// Mode spectra, each of length `n_d`, descending.
    pub spectra: Vec<Vec<f64>>,
    pub ranks: Vec<usize>,
}

pub fn hosvd(x: &DenseTensor) -> HosvdFactors {
    hosvd_with_rank_tol(x, DEFAULT_RANK_TOL)
}

pub fn hosvd_with_rank_tol(x: &DenseTensor, rank_tol: f64) -> HosvdFactors {
    let mut factors = Vec::with_capacity(x.ndim());
    let mut spectra = Vec::with_capacity(x.ndim());
    for d in 1..=x.ndim() {
        let svd = matrix_svd(&x.matricize(d).expect("mode in range"));
        spectra.push(padded(svd.sigma, x.shape()[d - 1]));
        factors.push(svd.u);
    }
    let transposed: Vec<Matrix> = factors.iter().map(Matrix::transpose).collect();
    let core = x
        .multiply_all_modes(&transposed)
        .expect("factor shapes match");
    let ranks = ranks_of(&spectra, rank_tol);
    HosvdFactors {
        core,
        factors,
        spectra,
        ranks,
    }
}

fn padded(mut sigma: Vec<f64>, n: usize) -> Vec<f64> {
    sigma.resize(n, 0.0);
    sigma
}

/// Singular values of the mode-`d` matricization, zero-padded to `n_d`.
pub fn mode_spectrum(x: &DenseTensor, d: usize) -> Result<Vec<f64>> {
    let m = x.matricize(d)?;
    Ok(padded(matrix_svd(&m).sigma, m.rows()))
}

/// `(σ⁽¹⁾, …, σ⁽ᴰ⁾) / √D`, concatenated in mode order. Its Euclidean norm
/// equals the Frobenius norm of `x`.
pub fn sigma_map(x: &DenseTensor) -> Vec<f64> {
    let scale = 1.0 / (x.ndim() as f64).sqrt();
    (1..=x.ndim())
        .flat_map(|d| mode_spectrum(x, d).expect("mode in range"))
        .map(|s| s * scale)
        .collect()
}

pub fn reconstruct(f: &HosvdFactors) -> Result<DenseTensor> {
    let shape = f.core.shape();
    if f.factors.len() != shape.len() {
        return Err(Error::Shape(format!(
            "{} factors for a {}-mode core",
            f.factors.len(),
            shape.len()
        )));
    }
    for (d, (u, &n)) in f.factors.iter().zip(shape).enumerate() {
        if u.rows() != n || u.cols() != n {
            return Err(Error::Shape(format!(
                "factor {} is {}x{}, core mode size is {n}",
                d + 1,
                u.rows(),
                u.cols()
            )));
        }
    }
    f.core.multiply_all_modes(&f.factors)
}

/// Largest normalized inner product between two distinct slices
/// `S_{i_d=k}`, `S_{i_d=k'}` over all modes.
pub fn core_orthogonality_defect(s: &DenseTensor) -> f64 {
    let norm_sq = s.inner_product(s).expect("same shape").max(f64::EPSILON);
    let mut worst = 0.0f64;
    for d in 1..=s.ndim() {
        let m = s.matricize(d).expect("mode in range");
        for k in 0..m.rows() {
            for kp in k + 1..m.rows() {
                let ip: f64 = m.row(k).iter().zip(m.row(kp)).map(|(a, b)| a * b).sum();
                worst = worst.max(ip.abs() / norm_sq);
            }
        }
    }
    worst
}

/// `r⁽ᵈ⁾ = #{k : σ⁽ᵈ⁾_k > rank_tol·σ⁽ᵈ⁾_1}`.
pub fn mode_ranks(f: &HosvdFactors, rank_tol: f64) -> Vec<usize> {
    ranks_of(&f.spectra, rank_tol)
}

pub(crate) fn ranks_of(spectra: &[Vec<f64>], rank_tol: f64) -> Vec<usize> {
    spectra
        .iter()
        .map(|sigma| {
            let lead = sigma.first().copied().unwrap_or(0.0);
            if lead == 0.0 {
                0
            } else {
                sigma.iter().filter(|&&s| s > rank_tol * lead).count()
            }
        })
        .collect()
}
