//! Dense real tensors with 1-based multi-indices.
//!
//! Storage is last-index-fastest. The mode-`d` matricization has `n_d`
//! rows; its columns enumerate the remaining modes in the cyclic order
//! `d+1, …, D, 1, …, d-1`, first listed mode slowest. This is the order
//! under which
//!
//! ```text
//! X_(d) = U⁽ᵈ⁾ · S_(d) · (U⁽ᵈ⁺¹⁾ ⊗ … ⊗ U⁽ᴰ⁾ ⊗ U⁽¹⁾ ⊗ … ⊗ U⁽ᵈ⁻¹⁾)ᵀ
//! ```
//!
//! holds with the standard Kronecker product. Note that it differs from
//! the reversed-order unfolding common elsewhere in the tensor literature.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

/// A 1-based position `(i_1, …, i_D)`.
///
/// Ordered component-wise: `a <= b` iff every `a_d <= b_d`; two indices
/// that disagree in direction are incomparable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub Vec<usize>);

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.0.len() != other.0.len() {
            return None;
        }
        let mut less = false;
        let mut greater = false;
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.cmp(b) {
                Ordering::Less => less = true,
                Ordering::Greater => greater = true,
                Ordering::Equal => {}
            }
        }
        match (less, greater) {
            (false, false) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (true, true) => None,
        }
    }
}

pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; shape.len()];
    for d in (0..shape.len().saturating_sub(1)).rev() {
        strides[d] = strides[d + 1] * shape[d + 1];
    }
    strides
}

/// Mode order used for matricization columns, zero-based: `d+1..D, 0..d`.
pub(crate) fn cyclic_order(d: usize, ndim: usize) -> impl Iterator<Item = usize> {
    (d + 1..ndim).chain(0..d)
}

impl DenseTensor {
    pub fn from_parts(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if shape.is_empty() {
            return Err(Error::InvalidShape("tensor needs at least one mode".into()));
        }
        if let Some(d) = shape.iter().position(|&n| n == 0) {
            return Err(Error::InvalidShape(format!(
                "mode {} has size 0; every mode must be at least 1",
                d + 1
            )));
        }
        let expected = shape
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| Error::InvalidShape(format!("shape {shape:?} overflows")))?;
        if data.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: data.len(),
            });
        }
        if let Some((position, &value)) = data.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { position, value });
        }
        Ok(DenseTensor { shape, data })
    }

    pub(crate) fn from_raw(shape: Vec<usize>, data: Vec<f64>) -> Self {
        debug_assert_eq!(shape.iter().product::<usize>(), data.len());
        DenseTensor { shape, data }
    }

    pub fn zeros(shape: &[usize]) -> Result<Self> {
        let len = shape.iter().product();
        DenseTensor::from_parts(shape.to_vec(), vec![0.0; len])
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn ndim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    fn check_mode(&self, d: usize) -> Result<usize> {
        if d == 0 || d > self.ndim() {
            return Err(Error::Index(format!(
                "mode {d} out of range for a {}-mode tensor",
                self.ndim()
            )));
        }
        Ok(d - 1)
    }

    pub fn offset(&self, index: &MultiIndex) -> Result<usize> {
        if index.0.len() != self.ndim() {
            return Err(Error::Index(format!(
                "{}-component index for a {}-mode tensor",
                index.0.len(),
                self.ndim()
            )));
        }
        let mut offset = 0;
        for (d, (&i, &n)) in index.0.iter().zip(&self.shape).enumerate() {
            if i == 0 || i > n {
                return Err(Error::Index(format!(
                    "index {i} out of range 1..={n} in mode {}",
                    d + 1
                )));
            }
            offset = offset * n + (i - 1);
        }
        Ok(offset)
    }

    pub fn get(&self, index: &MultiIndex) -> Result<f64> {
        Ok(self.data[self.offset(index)?])
    }

    /// The subtensor with mode `d` fixed to `k` (both 1-based), as a
    /// `(D-1)`-mode tensor. For a vector this is the shape-`[1]` scalar.
    pub fn subtensor_fix(&self, d: usize, k: usize) -> Result<DenseTensor> {
        let d0 = self.check_mode(d)?;
        let n = self.shape[d0];
        if k == 0 || k > n {
            return Err(Error::Index(format!(
                "slice {k} out of range 1..={n} in mode {d}"
            )));
        }
        let outer: usize = self.shape[..d0].iter().product();
        let inner: usize = self.shape[d0 + 1..].iter().product();
        let mut data = Vec::with_capacity(outer * inner);
        for o in 0..outer {
            let start = (o * n + (k - 1)) * inner;
            data.extend_from_slice(&self.data[start..start + inner]);
        }
        let mut shape: Vec<usize> = self
            .shape
            .iter()
            .enumerate()
            .filter(|&(e, _)| e != d0)
            .map(|(_, &s)| s)
            .collect();
        if shape.is_empty() {
            shape.push(1);
        }
        Ok(DenseTensor::from_raw(shape, data))
    }

    /// Mode-`d` fibers in matricization column order.
    pub fn mode_fibers(&self, d: usize) -> Result<Vec<Vec<f64>>> {
        let m = self.matricize(d)?;
        Ok((0..m.cols()).map(|c| m.column(c)).collect())
    }

    /// Reorders axes so that output axis `j` is input axis `perm[j]`.
    fn permute_axes(&self, perm: &[usize]) -> DenseTensor {
        let in_strides = strides(&self.shape);
        let out_shape: Vec<usize> = perm.iter().map(|&a| self.shape[a]).collect();
        let src_strides: Vec<usize> = perm.iter().map(|&a| in_strides[a]).collect();
        let mut data = Vec::with_capacity(self.data.len());
        let mut counter = vec![0usize; out_shape.len()];
        let mut src = 0usize;
        for _ in 0..self.data.len() {
            data.push(self.data[src]);
            // odometer increment over the output shape
            for j in (0..counter.len()).rev() {
                counter[j] += 1;
                src += src_strides[j];
                if counter[j] < out_shape[j] {
                    break;
                }
                src -= src_strides[j] * out_shape[j];
                counter[j] = 0;
            }
        }
        DenseTensor::from_raw(out_shape, data)
    }

    /// Mode-`d` matricization (`d` is 1-based): an `n_d × Π_{e≠d} n_e`
    /// matrix whose row `k` holds the entries of `X_{i_d=k}`.
    pub fn matricize(&self, d: usize) -> Result<Matrix> {
        let d0 = self.check_mode(d)?;
        let perm: Vec<usize> = std::iter::once(d0)
            .chain(cyclic_order(d0, self.ndim()))
            .collect();
        let rows = self.shape[d0];
        let cols = self.data.len() / rows;
        Ok(Matrix::from_raw(rows, cols, self.permute_axes(&perm).data))
    }

    /// Inverse of [`DenseTensor::matricize`].
    pub fn dematricize(m: &Matrix, d: usize, shape: &[usize]) -> Result<DenseTensor> {
        if shape.is_empty() || shape.contains(&0) {
            return Err(Error::Shape(format!("invalid target shape {shape:?}")));
        }
        if d == 0 || d > shape.len() {
            return Err(Error::Index(format!(
                "mode {d} out of range for a {}-mode shape",
                shape.len()
            )));
        }
        let d0 = d - 1;
        let rest: usize = shape
            .iter()
            .enumerate()
            .filter(|&(e, _)| e != d0)
            .map(|(_, &n)| n)
            .product();
        if m.rows() != shape[d0] || m.cols() != rest {
            return Err(Error::Shape(format!(
                "a {}x{} matrix is not the mode-{d} matricization of shape {shape:?} (needs {}x{rest})",
                m.rows(),
                m.cols(),
                shape[d0]
            )));
        }
        let perm: Vec<usize> = std::iter::once(d0)
            .chain(cyclic_order(d0, shape.len()))
            .collect();
        let permuted_shape: Vec<usize> = perm.iter().map(|&a| shape[a]).collect();
        let permuted = DenseTensor::from_raw(permuted_shape, m.as_slice().to_vec());
        let mut inverse = vec![0; perm.len()];
        for (j, &a) in perm.iter().enumerate() {
            inverse[a] = j;
        }
        Ok(permuted.permute_axes(&inverse))
    }

    /// Mode-`d` product `X ×_d U`, contracting mode `d` against the
    /// columns of `U`.
    pub fn mode_multiply(&self, d: usize, u: &Matrix) -> Result<DenseTensor> {
        let d0 = self.check_mode(d)?;
        if u.cols() != self.shape[d0] {
            return Err(Error::Shape(format!(
                "mode-{d} product needs a matrix with {} columns, got {}x{}",
                self.shape[d0],
                u.rows(),
                u.cols()
            )));
        }
        // contract directly on the natural layout: outer × n_d × inner
        let outer: usize = self.shape[..d0].iter().product();
        let inner: usize = self.shape[d0 + 1..].iter().product();
        let n = self.shape[d0];
        let n_out = u.rows();
        let mut data = vec![0.0; outer * n_out * inner];
        for o in 0..outer {
            let src = &self.data[o * n * inner..(o + 1) * n * inner];
            let dst = &mut data[o * n_out * inner..(o + 1) * n_out * inner];
            for r in 0..n_out {
                let dst_row = &mut dst[r * inner..(r + 1) * inner];
                for k in 0..n {
                    let w = u.get(r, k);
                    if w == 0.0 {
                        continue;
                    }
                    for (t, &s) in dst_row.iter_mut().zip(&src[k * inner..(k + 1) * inner]) {
                        *t += w * s;
                    }
                }
            }
        }
        let mut shape = self.shape.clone();
        shape[d0] = n_out;
        Ok(DenseTensor::from_raw(shape, data))
    }

    /// `X ×_1 U⁽¹⁾ ×_2 … ×_D U⁽ᴰ⁾`.
    pub fn multiply_all_modes(&self, factors: &[Matrix]) -> Result<DenseTensor> {
        if factors.len() != self.ndim() {
            return Err(Error::Shape(format!(
                "{} factors for a {}-mode tensor",
                factors.len(),
                self.ndim()
            )));
        }
        factors
            .iter()
            .enumerate()
            .try_fold(self.clone(), |t, (d, u)| t.mode_multiply(d + 1, u))
    }

    pub fn inner_product(&self, other: &DenseTensor) -> Result<f64> {
        if self.shape != other.shape {
            return Err(Error::Shape(format!(
                "inner product of shapes {:?} and {:?}",
                self.shape, other.shape
            )));
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scale(&self, factor: f64) -> DenseTensor {
        DenseTensor::from_raw(
            self.shape.clone(),
            self.data.iter().map(|v| v * factor).collect(),
        )
    }

    pub fn sub(&self, other: &DenseTensor) -> Result<DenseTensor> {
        if self.shape != other.shape {
            return Err(Error::Shape(format!(
                "difference of shapes {:?} and {:?}",
                self.shape, other.shape
            )));
        }
        Ok(DenseTensor::from_raw(
            self.shape.clone(),
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        ))
    }

    /// Iterates over every 1-based multi-index in storage order.
    pub fn indices(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        let strides = strides(&self.shape);
        (0..self.data.len()).map(move |flat| {
            MultiIndex(
                strides
                    .iter()
                    .zip(&self.shape)
                    .map(|(&s, &n)| flat / s % n + 1)
                    .collect(),
            )
        })
    }
}
