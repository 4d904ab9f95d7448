use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::random;
use crate::spectral::{mode_spectrum, DEFAULT_RANK_TOL};
use crate::tensor::{strides, DenseTensor};

/// Consecutive blocks are rescaled until every positive mode-d singular
/// value of block l is at least this factor above those of block l+1.
pub const SPECTRAL_SEPARATION: f64 = 1.1;

/// Layout and ratios of a pair of block-wise diagonal tensors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockDiagonalSpec {
    pub ambient_shape: Vec<usize>,
    pub block_shapes: Vec<Vec<usize>>,
    /// One per block, positive, strictly decreasing.
    pub ratios: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
}

impl BlockDiagonalSpec {
    pub fn validate(&self) -> Result<()> {
        let ndim = self.ambient_shape.len();
        if ndim == 0 || self.ambient_shape.contains(&0) {
            return Err(Error::Validation(format!(
                "ambient shape {:?} must be nonempty with positive sizes",
                self.ambient_shape
            )));
        }
        if self.block_shapes.is_empty() {
            return Err(Error::Validation("at least one block is required".into()));
        }
        if self.ratios.len() != self.block_shapes.len() {
            return Err(Error::Validation(format!(
                "{} ratios for {} blocks",
                self.ratios.len(),
                self.block_shapes.len()
            )));
        }
        if let Some(r) = self.ratios.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return Err(Error::Validation(format!(
                "ratios must be positive and finite, got {r}"
            )));
        }
        if let Some(w) = self.ratios.windows(2).find(|w| w[0] <= w[1]) {
            return Err(Error::Validation(format!(
                "ratios must be strictly decreasing, got {} then {}",
                w[0], w[1]
            )));
        }
        for (l, shape) in self.block_shapes.iter().enumerate() {
            if shape.len() != ndim {
                return Err(Error::Validation(format!(
                    "block {} has {} modes, ambient has {ndim}",
                    l + 1,
                    shape.len()
                )));
            }
            if shape.contains(&0) {
                return Err(Error::Validation(format!(
                    "block {} has an empty mode: {shape:?}",
                    l + 1
                )));
            }
        }
        if self
            .ambient_shape
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .is_none()
        {
            return Err(Error::Validation(format!(
                "ambient shape {:?} overflows",
                self.ambient_shape
            )));
        }
        for d in 0..ndim {
            let used = self
                .block_shapes
                .iter()
                .try_fold(0usize, |acc, s| acc.checked_add(s[d]))
                .unwrap_or(usize::MAX);
            if used > self.ambient_shape[d] {
                return Err(Error::Validation(format!(
                    "blocks need {used} indices in mode {}, ambient size is {}",
                    d + 1,
                    self.ambient_shape[d]
                )));
            }
        }
        Ok(())
    }
}

/// A permutation `π` of `{1, …, n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    /// `images[k-1] = π(k)`, 1-based.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i == 0 || i > n || std::mem::replace(&mut seen[i - 1], true) {
                return Err(Error::Validation(format!(
                    "{images:?} is not a permutation of 1..={n}"
                )));
            }
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// `π(k)`, 1-based.
    pub fn apply(&self, k: usize) -> usize {
        self.0[k - 1]
    }

    /// `Π` with `Π[π(k), k] = 1`, so that `(S ×_d Π)` moves slice `k` to
    /// position `π(k)`.
    pub fn to_matrix(&self) -> Matrix {
        let n = self.0.len();
        let mut m = Matrix::zeros(n, n);
        for (k, &image) in self.0.iter().enumerate() {
            m.set(image - 1, k, 1.0);
        }
        m
    }
}

/// Certificate that `X = DX ×_1 W⁽¹⁾ … ×_D W⁽ᴰ⁾` and likewise for `Y`,
/// with `DX`, `DY` block-wise diagonal and block `l` of `DX` equal to
/// `ρ_l` times block `l` of `DY`.
#[derive(Clone, Debug)]
pub struct EqualityWitness {
    pub factors_w: Vec<Matrix>,
    pub dx: DenseTensor,
    pub dy: DenseTensor,
    pub block_shapes: Vec<Vec<usize>>,
    pub ratios: Vec<f64>,
    /// Present for witnesses recovered by extraction.
    pub permutations: Option<Vec<Permutation>>,
    /// Present for witnesses built from a seeded spec.
    pub seed: Option<u64>,
}

impl EqualityWitness {
    pub fn reconstruct_x(&self) -> Result<DenseTensor> {
        self.dx.multiply_all_modes(&self.factors_w)
    }

    pub fn reconstruct_y(&self) -> Result<DenseTensor> {
        self.dy.multiply_all_modes(&self.factors_w)
    }

    /// Largest `|DX - ρ_l·DY|` over entries of block `l`, and largest
    /// magnitude of either tensor outside every block.
    pub fn block_residuals(&self) -> (f64, f64) {
        let layout = BlockLayout::new(&self.block_shapes);
        let mut proportional = 0.0f64;
        let mut outside = 0.0f64;
        for (flat, index) in self.dx.indices().enumerate() {
            let a = self.dx.data()[flat];
            let b = self.dy.data()[flat];
            match layout.block_of(&index.0) {
                Some(l) => proportional = proportional.max((a - self.ratios[l] * b).abs()),
                None => outside = outside.max(a.abs()).max(b.abs()),
            }
        }
        (proportional, outside)
    }
}

/// Cumulative offsets of consecutive diagonal blocks.
pub(crate) struct BlockLayout {
    /// `starts[d][l]` is the zero-based first index of block `l` in mode `d`;
    /// `starts[d][L]` is the end of the last block.
    starts: Vec<Vec<usize>>,
}

impl BlockLayout {
    pub(crate) fn new(block_shapes: &[Vec<usize>]) -> Self {
        let ndim = block_shapes.first().map_or(0, Vec::len);
        let starts = (0..ndim)
            .map(|d| {
                let mut acc = 0;
                let mut s = vec![0];
                for shape in block_shapes {
                    acc += shape[d];
                    s.push(acc);
                }
                s
            })
            .collect();
        BlockLayout { starts }
    }

    /// Block holding mode-`d` position `i` (1-based), if any.
    pub(crate) fn block_in_mode(&self, d: usize, i: usize) -> Option<usize> {
        let s = &self.starts[d];
        (0..s.len() - 1).find(|&l| i > s[l] && i <= s[l + 1])
    }

    /// Block containing the 1-based multi-index, if all modes agree.
    pub(crate) fn block_of(&self, index: &[usize]) -> Option<usize> {
        let first = self.block_in_mode(0, index[0])?;
        index
            .iter()
            .enumerate()
            .skip(1)
            .all(|(d, &i)| self.block_in_mode(d, i) == Some(first))
            .then_some(first)
    }

    pub(crate) fn start(&self, d: usize, l: usize) -> usize {
        self.starts[d][l]
    }
}

/// Places block `l` at mode-`d` positions `(Σ_{j<l} m_{d,j}, Σ_{j≤l} m_{d,j}]`,
/// zero elsewhere.
pub fn build_block_diagonal(
    spec: &BlockDiagonalSpec,
    blocks: &[DenseTensor],
) -> Result<DenseTensor> {
    spec.validate()?;
    if blocks.len() != spec.block_shapes.len() {
        return Err(Error::Shape(format!(
            "{} blocks supplied, spec declares {}",
            blocks.len(),
            spec.block_shapes.len()
        )));
    }
    for (l, (block, shape)) in blocks.iter().zip(&spec.block_shapes).enumerate() {
        if block.shape() != shape.as_slice() {
            return Err(Error::Shape(format!(
                "block {} has shape {:?}, spec declares {shape:?}",
                l + 1,
                block.shape()
            )));
        }
    }
    let layout = BlockLayout::new(&spec.block_shapes);
    let ambient = &spec.ambient_shape;
    let ambient_strides = strides(ambient);
    let mut data = vec![0.0; ambient.iter().product()];
    for (l, block) in blocks.iter().enumerate() {
        for (flat, index) in block.indices().enumerate() {
            let target: usize = index
                .0
                .iter()
                .enumerate()
                .map(|(d, &i)| (layout.start(d, l) + i - 1) * ambient_strides[d])
                .sum();
            data[target] = block.data()[flat];
        }
    }
    DenseTensor::from_parts(ambient.clone(), data)
}

/// Builds `(X, Y, witness)` with `⟨X,Y⟩ = ⟨σ⁽ᵈ⁾(X), σ⁽ᵈ⁾(Y)⟩` in every mode.
///
/// Blocks of `DY` are Gaussian, rescaled so that each block's positive
/// mode spectra sit strictly above the next block's in every mode, and
/// normalized so that `‖DY‖ = 1`. Block `l` of `DX` is `ρ_l` times block
/// `l` of `DY`. With decreasing ratios this keeps the sorted spectra of
/// `X` and `Y` aligned block by block.
pub fn construct_equality_pair(
    spec: &BlockDiagonalSpec,
) -> Result<(DenseTensor, DenseTensor, EqualityWitness)> {
    spec.validate()?;
    let ndim = spec.ambient_shape.len();
    let mut rng = random::seeded(spec.seed);
    let raw: Vec<DenseTensor> = spec
        .block_shapes
        .iter()
        .map(|shape| random::gaussian_tensor(&mut rng, shape))
        .collect();

    // (largest, smallest positive) singular value per block and mode
    let extremes: Vec<Vec<(f64, f64)>> = raw
        .iter()
        .map(|block| {
            (1..=ndim)
                .map(|d| {
                    let sigma = mode_spectrum(block, d).expect("mode in range");
                    let lead = sigma[0];
                    let tail = sigma
                        .iter()
                        .copied()
                        .filter(|&s| s > DEFAULT_RANK_TOL * lead)
                        .fold(lead, f64::min);
                    (lead, tail)
                })
                .collect()
        })
        .collect();

    let nblocks = raw.len();
    let mut scales = vec![1.0; nblocks];
    for l in (0..nblocks.saturating_sub(1)).rev() {
        let needed = (0..ndim)
            .map(|d| extremes[l + 1][d].0 / extremes[l][d].1)
            .fold(0.0, f64::max);
        scales[l] = scales[l + 1] * SPECTRAL_SEPARATION * needed.max(1.0);
    }
    let total: f64 = raw
        .iter()
        .zip(&scales)
        .map(|(b, s)| (s * b.frobenius_norm()).powi(2))
        .sum::<f64>()
        .sqrt();

    let y_blocks: Vec<DenseTensor> = raw
        .iter()
        .zip(&scales)
        .map(|(b, s)| b.scale(s / total))
        .collect();
    let x_blocks: Vec<DenseTensor> = y_blocks
        .iter()
        .zip(&spec.ratios)
        .map(|(b, rho)| b.scale(*rho))
        .collect();
    let dy = build_block_diagonal(spec, &y_blocks)?;
    let dx = build_block_diagonal(spec, &x_blocks)?;

    let factors_w: Vec<Matrix> = spec
        .ambient_shape
        .iter()
        .map(|&n| random::orthogonal(&mut rng, n))
        .collect();
    let x = dx.multiply_all_modes(&factors_w)?;
    let y = dy.multiply_all_modes(&factors_w)?;
    let witness = EqualityWitness {
        factors_w,
        dx,
        dy,
        block_shapes: spec.block_shapes.clone(),
        ratios: spec.ratios.clone(),
        permutations: None,
        seed: Some(spec.seed),
    };
    Ok((x, y, witness))
}
