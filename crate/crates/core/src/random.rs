//! Seeded random draws shared by the constructors and the test suites.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::matrix::Matrix;
use crate::spectral::matrix_svd;
use crate::tensor::DenseTensor;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(rng: &mut Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

/// Standard normal entries. Panics on an invalid shape.
pub fn gaussian_tensor(rng: &mut Rng, shape: &[usize]) -> DenseTensor {
    let len = shape.iter().product();
    DenseTensor::from_parts(shape.to_vec(), gaussian_vec(rng, len)).expect("valid shape")
}

pub fn gaussian_matrix(rng: &mut Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_row_major(rows, cols, gaussian_vec(rng, rows * cols)).expect("valid shape")
}

/// Orthogonal `n × n` matrix: left singular vectors of a Gaussian matrix.
pub fn orthogonal(rng: &mut Rng, n: usize) -> Matrix {
    matrix_svd(&gaussian_matrix(rng, n, n)).u
}
