//! Test-only oracles. Nothing here calls the matricization, SVD or
//! block-placement code it is used to check.
#![allow(dead_code)]

use rand::Rng as _;
use tvn::random::{self, Rng};
use tvn::{BlockDiagonalSpec, DenseTensor, Matrix};

/// Row and column of a 1-based multi-index in the mode-`d` matricization,
/// by direct enumeration of the cyclic mode order.
pub fn matricize_position(shape: &[usize], index: &[usize], d: usize) -> (usize, usize) {
    let ndim = shape.len();
    let d0 = d - 1;
    let order: Vec<usize> = (1..ndim).map(|j| (d0 + j) % ndim).collect();
    let mut col = 0;
    for &e in &order {
        col = col * shape[e] + (index[e] - 1);
    }
    (index[d0] - 1, col)
}

/// Builds the matricization entry by entry from the index map.
pub fn matricize_oracle(x: &DenseTensor, d: usize) -> Matrix {
    let shape = x.shape();
    let rows = shape[d - 1];
    let cols = x.len() / rows;
    let mut data = vec![f64::NAN; rows * cols];
    for index in all_indices(shape) {
        let (r, c) = matricize_position(shape, &index, d);
        data[r * cols + c] = x.get(&tvn::MultiIndex(index)).unwrap();
    }
    Matrix::from_row_major(rows, cols, data).expect("every position filled exactly once")
}

/// Every 1-based multi-index, last index fastest.
pub fn all_indices(shape: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &n in shape {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (1..=n).map(move |i| {
                    let mut p = prefix.clone();
                    p.push(i);
                    p
                })
            })
            .collect();
    }
    out
}

/// Product of `n` Householder reflections from Gaussian vectors.
pub fn householder_orthogonal(rng: &mut Rng, n: usize) -> Matrix {
    let mut q = Matrix::identity(n);
    for _ in 0..n {
        let v = random::gaussian_vec(rng, n);
        let vv: f64 = v.iter().map(|a| a * a).sum();
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                h[i * n + j] = if i == j { 1.0 } else { 0.0 } - 2.0 * v[i] * v[j] / vv;
            }
        }
        q = q.matmul(&Matrix::from_row_major(n, n, h).unwrap()).unwrap();
    }
    q
}

/// Eigenvalues of a symmetric matrix by cyclic two-sided Jacobi rotations.
pub fn symmetric_eigenvalues(a: &Matrix) -> Vec<f64> {
    let n = a.rows();
    let mut m: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        let diag: f64 = (0..n).map(|i| m[i][i] * m[i][i]).sum();
        if off <= 1e-32 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q] == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in m.iter_mut() {
                    let (mkp, mkq) = (row[p], row[q]);
                    row[p] = c * mkp - s * mkq;
                    row[q] = s * mkp + c * mkq;
                }
                let (head, tail) = m.split_at_mut(q);
                for (a, b) in head[p].iter_mut().zip(tail[0].iter_mut()) {
                    let (mpk, mqk) = (*a, *b);
                    *a = c * mpk - s * mqk;
                    *b = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    eig
}

/// Singular values via the eigenvalues of the smaller Gram matrix,
/// descending, length `min(rows, cols)`.
pub fn singular_values_oracle(a: &Matrix) -> Vec<f64> {
    let gram = if a.rows() <= a.cols() {
        a.matmul(&a.transpose()).unwrap()
    } else {
        a.transpose().matmul(a).unwrap()
    };
    symmetric_eigenvalues(&gram)
        .into_iter()
        .map(|e| e.max(0.0).sqrt())
        .collect()
}

pub fn rel_diff(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(f64::MIN_POSITIVE)
}

pub fn tensor_rel_err(a: &DenseTensor, b: &DenseTensor) -> f64 {
    a.sub(b).unwrap().frobenius_norm() / b.frobenius_norm().max(f64::MIN_POSITIVE)
}

pub fn random_shape(rng: &mut Rng, max_modes: usize, max_dim: usize) -> Vec<usize> {
    let ndim = rng.random_range(1..=max_modes);
    (0..ndim).map(|_| rng.random_range(1..=max_dim)).collect()
}

/// Deterministic family of block-diagonal specs cycling through
/// `D ∈ {2,3,4}` and `L ∈ {1,2,3}`. Ratios are spaced by a factor of at
/// least 1.2, so consecutive ratios differ by at least 0.1 absolutely
/// and relatively.
pub fn acceptance_spec(i: u64) -> BlockDiagonalSpec {
    let ndim = 2 + (i % 3) as usize;
    let nblocks = 1 + ((i / 3) % 3) as usize;
    let mut rng = random::seeded(0x5eed_0000 + i);
    let max_block = if ndim == 4 { 2 } else { 3 };
    let block_shapes: Vec<Vec<usize>> = (0..nblocks)
        .map(|_| (0..ndim).map(|_| rng.random_range(1..=max_block)).collect())
        .collect();
    let ambient_shape = (0..ndim)
        .map(|d| block_shapes.iter().map(|s| s[d]).sum::<usize>() + rng.random_range(0..=1))
        .collect();
    let mut ratios = vec![rng.random_range(0.5..2.0)];
    for _ in 1..nblocks {
        let next = ratios[0] * rng.random_range(1.2..2.0);
        ratios.insert(0, next);
    }
    BlockDiagonalSpec {
        ambient_shape,
        block_shapes,
        ratios,
        seed: 1000 + i,
    }
}

/// Mode-d rank of a generic Gaussian block: `min(m_d, Π_{e≠d} m_e)`.
pub fn generic_block_rank(shape: &[usize], d: usize) -> usize {
    let rest: usize = shape
        .iter()
        .enumerate()
        .filter(|&(e, _)| e != d)
        .map(|(_, &m)| m)
        .product();
    shape[d].min(rest)
}
