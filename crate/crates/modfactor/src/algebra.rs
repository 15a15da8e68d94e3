//! Finite-dimensional C*-algebras as direct sums of matrix blocks.
//!
//! An [`AlgebraSpec`] is the list of block sizes `[n_1, ..., n_s]` of an
//! algebra `M_{n_1} ⊕ ... ⊕ M_{n_s}`; an [`AlgebraElement`] stores one
//! dense matrix per block. The canonical vector-space basis consists of
//! the matrix units of each block, enumerated block by block and row-major
//! inside each block. Coordinates with respect to that basis are literally
//! the matrix entries, which keeps every basis computation exact.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{psd_check, ComplexMatrix, NumericConfig};

/// Block sizes of a finite-dimensional C*-algebra `⊕_i M_{n_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgebraSpec {
    block_dims: Vec<usize>,
}

impl AlgebraSpec {
    /// Requires at least one block and every block of size at least one,
    /// so the algebra is unital.
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() {
            return Err(Error::InvalidInput(
                "algebra needs at least one block".to_string(),
            ));
        }
        if block_dims.contains(&0) {
            return Err(Error::InvalidInput(
                "every block must have size at least 1".to_string(),
            ));
        }
        Ok(AlgebraSpec { block_dims })
    }

    /// The scalars, a single 1x1 block.
    pub fn scalars() -> Self {
        AlgebraSpec {
            block_dims: vec![1],
        }
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn num_blocks(&self) -> usize {
        self.block_dims.len()
    }

    /// Vector-space dimension `N = Σ n_i²`.
    pub fn dim(&self) -> usize {
        self.block_dims.iter().map(|n| n * n).sum()
    }

    /// Dimension `D = Σ n_i` of the block-diagonal representation space.
    pub fn rep_dim(&self) -> usize {
        self.block_dims.iter().sum()
    }

    /// Offset of a block inside the representation space.
    pub fn rep_offset(&self, block: usize) -> usize {
        self.block_dims[..block].iter().sum()
    }

    /// Offset of a block's matrix units inside the canonical basis.
    pub fn basis_offset(&self, block: usize) -> usize {
        self.block_dims[..block].iter().map(|n| n * n).sum()
    }

    /// Canonical index of the matrix unit `E_{jk}` of a block.
    pub fn basis_index(&self, block: usize, j: usize, k: usize) -> usize {
        self.basis_offset(block) + j * self.block_dims[block] + k
    }

    /// Maps a canonical basis index back to `(block, row, col)`.
    pub fn basis_position(&self, index: usize) -> (usize, usize, usize) {
        let mut rest = index;
        for (b, &n) in self.block_dims.iter().enumerate() {
            if rest < n * n {
                return (b, rest / n, rest % n);
            }
            rest -= n * n;
        }
        panic!("basis index {index} out of range for {self:?}");
    }
}

/// An element of a finite-dimensional C*-algebra, one matrix per block.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    spec: AlgebraSpec,
    blocks: Vec<ComplexMatrix>,
}

impl AlgebraElement {
    pub fn from_blocks(spec: &AlgebraSpec, blocks: Vec<ComplexMatrix>) -> Result<Self> {
        if blocks.len() != spec.num_blocks() {
            return Err(Error::InvalidInput(format!(
                "expected {} blocks, got {}",
                spec.num_blocks(),
                blocks.len()
            )));
        }
        for (i, (b, &n)) in blocks.iter().zip(spec.block_dims()).enumerate() {
            if b.rows() != n || b.cols() != n {
                return Err(Error::InvalidInput(format!(
                    "block {i} must be {n}x{n}, got {}x{}",
                    b.rows(),
                    b.cols()
                )));
            }
            if !b.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "block {i} has non-finite entries"
                )));
            }
        }
        Ok(AlgebraElement {
            spec: spec.clone(),
            blocks,
        })
    }

    pub fn zero(spec: &AlgebraSpec) -> Self {
        AlgebraElement {
            spec: spec.clone(),
            blocks: spec
                .block_dims()
                .iter()
                .map(|&n| ComplexMatrix::zeros(n, n))
                .collect(),
        }
    }

    pub fn unit(spec: &AlgebraSpec) -> Self {
        AlgebraElement {
            spec: spec.clone(),
            blocks: spec
                .block_dims()
                .iter()
                .map(|&n| ComplexMatrix::identity(n))
                .collect(),
        }
    }

    /// A scalar algebra element `z · 1`.
    pub fn scalar(spec: &AlgebraSpec, z: Complex64) -> Self {
        Self::unit(spec).scale(z)
    }

    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    pub fn block(&self, i: usize) -> &ComplexMatrix {
        &self.blocks[i]
    }

    fn check_same_spec(&self, rhs: &Self) -> Result<()> {
        if self.spec != rhs.spec {
            return Err(Error::InvalidInput(format!(
                "algebra mismatch: {:?} vs {:?}",
                self.spec.block_dims(),
                rhs.spec.block_dims()
            )));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_same_spec(rhs)?;
        Ok(AlgebraElement {
            spec: self.spec.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&rhs.blocks)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_same_spec(rhs)?;
        Ok(AlgebraElement {
            spec: self.spec.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&rhs.blocks)
                .map(|(a, b)| a.sub(b))
                .collect(),
        })
    }

    /// Blockwise matrix product.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_same_spec(rhs)?;
        Ok(AlgebraElement {
            spec: self.spec.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&rhs.blocks)
                .map(|(a, b)| a.mul(b))
                .collect(),
        })
    }

    pub fn scale(&self, z: Complex64) -> Self {
        AlgebraElement {
            spec: self.spec.clone(),
            blocks: self.blocks.iter().map(|b| b.scale(z)).collect(),
        }
    }

    /// The involution: blockwise conjugate transpose.
    pub fn adjoint(&self) -> Self {
        AlgebraElement {
            spec: self.spec.clone(),
            blocks: self.blocks.iter().map(ComplexMatrix::adjoint).collect(),
        }
    }

    /// Unnormalized trace, summed over blocks. Faithful and positive, so
    /// `trace(a* a) = 0` exactly when `a = 0`.
    pub fn trace(&self) -> Complex64 {
        self.blocks.iter().map(ComplexMatrix::trace).sum()
    }

    pub fn max_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(ComplexMatrix::max_norm)
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.blocks
            .iter()
            .all(|b| b.hermitian_defect() <= tol * (1.0 + b.max_norm()))
    }

    /// Coordinates in the canonical matrix-unit basis; these are exactly
    /// the matrix entries, block-major and row-major within each block.
    pub fn coords(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.spec.dim());
        for (b, &n) in self.blocks.iter().zip(self.spec.block_dims()) {
            for j in 0..n {
                for k in 0..n {
                    out.push(b[(j, k)]);
                }
            }
        }
        out
    }

    pub fn from_coords(spec: &AlgebraSpec, coords: &[Complex64]) -> Result<Self> {
        if coords.len() != spec.dim() {
            return Err(Error::InvalidInput(format!(
                "expected {} coordinates, got {}",
                spec.dim(),
                coords.len()
            )));
        }
        let mut blocks = Vec::with_capacity(spec.num_blocks());
        let mut at = 0;
        for &n in spec.block_dims() {
            blocks.push(ComplexMatrix::from_fn(n, n, |j, k| coords[at + j * n + k]));
            at += n * n;
        }
        Self::from_blocks(spec, blocks)
    }

    /// Block-diagonal representation as a `D x D` matrix.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let d = self.spec.rep_dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for (b, block) in self.blocks.iter().enumerate() {
            let off = self.spec.rep_offset(b);
            let n = self.spec.block_dims()[b];
            for j in 0..n {
                for k in 0..n {
                    m[(off + j, off + k)] = block[(j, k)];
                }
            }
        }
        m
    }
}

/// The canonical matrix-unit basis, in coordinate order.
pub fn canonical_basis(spec: &AlgebraSpec) -> Vec<AlgebraElement> {
    let mut out = Vec::with_capacity(spec.dim());
    for (b, &n) in spec.block_dims().iter().enumerate() {
        for j in 0..n {
            for k in 0..n {
                let mut e = AlgebraElement::zero(spec);
                e.blocks[b][(j, k)] = Complex64::new(1.0, 0.0);
                out.push(e);
            }
        }
    }
    out
}

/// Positivity in the C*-sense: Hermitian with every block positive
/// semidefinite. Non-Hermitian elements simply return `false`.
pub fn is_positive(a: &AlgebraElement, cfg: &NumericConfig) -> bool {
    if !a.is_hermitian(cfg.verify_tol) {
        return false;
    }
    a.blocks.iter().all(|b| psd_check(b, cfg).unwrap_or(false))
}

/// Left-multiplication operator `L(b)` on coordinates: column `α` holds
/// the coordinates of `b · b_α`. Exact, since products of matrix units
/// are matrix units.
pub fn structure_constants(b: &AlgebraElement) -> ComplexMatrix {
    let spec = b.spec();
    let n = spec.dim();
    let basis = canonical_basis(spec);
    let mut m = ComplexMatrix::zeros(n, n);
    for (alpha, e) in basis.iter().enumerate() {
        let prod = b.mul(e).expect("same spec by construction");
        for (row, z) in prod.coords().into_iter().enumerate() {
            m[(row, alpha)] = z;
        }
    }
    m
}

/// Compression of a `D x D` matrix onto the block-diagonal subalgebra:
/// keeps the diagonal blocks, discards the rest. This is the
/// trace-preserving conditional expectation, and it maps positive
/// matrices to positive elements.
pub fn conditional_expectation(m: &ComplexMatrix, spec: &AlgebraSpec) -> Result<AlgebraElement> {
    let d = spec.rep_dim();
    if m.rows() != d || m.cols() != d {
        return Err(Error::InvalidInput(format!(
            "expected a {d}x{d} matrix for {:?}, got {}x{}",
            spec.block_dims(),
            m.rows(),
            m.cols()
        )));
    }
    let blocks = spec
        .block_dims()
        .iter()
        .enumerate()
        .map(|(b, &n)| {
            let off = spec.rep_offset(b);
            ComplexMatrix::from_fn(n, n, |j, k| m[(off + j, off + k)])
        })
        .collect();
    AlgebraElement::from_blocks(spec, blocks)
}
