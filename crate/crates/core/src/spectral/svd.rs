//! One-sided (Hestenes) Jacobi SVD.
//!
//! The matrix is oriented so that it is at least as tall as it is wide,
//! then pairs of columns are rotated until every pair is orthogonal to
//! working precision. Column norms are the singular values, the
//! accumulated rotations are `V`, and the normalized columns give the
//! leading part of `U`. The remaining columns of `U` come from an
//! orthonormal completion so that both factors are square.

use crate::matrix::Matrix;

const MAX_SWEEPS: usize = 30;
/// Rotate while `|a_p·a_q| > ORTH_TOL·‖a_p‖‖a_q‖`.
const ORTH_TOL: f64 = 1e-15;

#[derive(Clone, Debug)]
pub struct SvdResult {
    /// `m × m` orthogonal.
    pub u: Matrix,
    /// `min(m, n)` values, descending, nonnegative.
    pub sigma: Vec<f64>,
    /// `n × n` orthogonal.
    pub v: Matrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> Matrix {
        let s = Matrix::diag(self.u.cols(), self.v.cols(), &self.sigma);
        self.u
            .matmul(&s)
            .and_then(|us| us.matmul(&self.v.transpose()))
            .expect("conformable factors")
    }
}

/// Full SVD `A = U·diag(σ)·Vᵀ`.
///
/// Deterministic for a given input: fixed cyclic sweep order, stable sort
/// of the singular values, and each column of `U` normalized so that its
/// first non-negligible entry is positive (the matching column of `V` is
/// flipped with it).
pub fn matrix_svd(a: &Matrix) -> SvdResult {
    if a.rows() >= a.cols() {
        tall_svd(a)
    } else {
        let t = tall_svd(&a.transpose());
        // Aᵀ = U'ΣV'ᵀ  ⇒  A = V'ΣU'ᵀ
        let mut out = SvdResult {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        };
        fix_signs(&mut out);
        out
    }
}

fn tall_svd(a: &Matrix) -> SvdResult {
    let m = a.rows();
    let n = a.cols();
    debug_assert!(m >= n);

    // column-major working copies
    let mut cols: Vec<Vec<f64>> = (0..n).map(|c| a.column(c)).collect();
    let mut vcols: Vec<Vec<f64>> = (0..n)
        .map(|c| (0..n).map(|r| if r == c { 1.0 } else { 0.0 }).collect())
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= ORTH_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                if c == 1.0 && s == 0.0 {
                    continue;
                }
                rotated = true;
                rotate(&mut cols, p, q, c, s);
                rotate(&mut vcols, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal values keep their column order
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let sigma: Vec<f64> = order.iter().map(|&i| norms[i]).collect();
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let negligible = sigma_max * (m.max(n) as f64) * f64::EPSILON;

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    for (&i, &s) in order.iter().zip(&sigma) {
        if s <= negligible || s == 0.0 {
            break;
        }
        let mut u: Vec<f64> = cols[i].iter().map(|x| x / s).collect();
        if orthonormalize_against(&mut u, &basis) {
            basis.push(u);
        } else {
            break;
        }
    }
    complete_basis(&mut basis, m);

    let mut u = Matrix::zeros(m, m);
    for (c, col) in basis.iter().enumerate() {
        for (r, &x) in col.iter().enumerate() {
            u.set(r, c, x);
        }
    }
    let mut v = Matrix::zeros(n, n);
    for (c, &i) in order.iter().enumerate() {
        for (r, &x) in vcols[i].iter().enumerate() {
            v.set(r, c, x);
        }
    }
    let mut out = SvdResult { u, sigma, v };
    fix_signs(&mut out);
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    let cp = &mut head[p];
    let cq = &mut tail[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *x;
        let xq = *y;
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Two passes of modified Gram–Schmidt, then normalization. Returns
/// false when `v` is (numerically) in the span of `basis`.
fn orthonormalize_against(v: &mut [f64], basis: &[Vec<f64>]) -> bool {
    let start = dot(v, v).sqrt();
    for _ in 0..2 {
        for b in basis {
            let proj = dot(v, b);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= proj * y;
            }
        }
    }
    let norm = dot(v, v).sqrt();
    if norm <= 1e-8 * start.max(f64::MIN_POSITIVE) {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    true
}

/// Extends an orthonormal set to a basis of `R^m`, each time taking the
/// standard basis vector with the largest residual (lowest index on ties).
fn complete_basis(basis: &mut Vec<Vec<f64>>, m: usize) {
    while basis.len() < m {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..m {
            let mut residual_sq = 1.0;
            for b in basis.iter() {
                residual_sq -= b[i] * b[i];
            }
            if best.is_none_or(|(_, r)| residual_sq > r + 1e-12) {
                best = Some((i, residual_sq));
            }
        }
        let (i, _) = best.expect("m > 0");
        let mut e = vec![0.0; m];
        e[i] = 1.0;
        let ok = orthonormalize_against(&mut e, basis);
        debug_assert!(ok, "completion candidate collapsed");
        basis.push(e);
    }
}

fn fix_signs(svd: &mut SvdResult) {
    let m = svd.u.rows();
    let n = svd.v.rows();
    for c in 0..m {
        let Some(lead) = (0..m).map(|r| svd.u.get(r, c)).find(|x| x.abs() > 1e-10) else {
            continue;
        };
        if lead < 0.0 {
            for r in 0..m {
                svd.u.set(r, c, -svd.u.get(r, c));
            }
            if c < n {
                for r in 0..n {
                    svd.v.set(r, c, -svd.v.get(r, c));
                }
            }
        }
    }
}
