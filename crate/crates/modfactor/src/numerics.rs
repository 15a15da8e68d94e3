//! Dense complex linear algebra with explicit tolerance policy.
//!
//! Everything downstream funnels its numerics through this module: one
//! matrix type, one Hermitian eigensolver, and tolerance decisions made in
//! exactly one place. Eigendecomposition is the single rank oracle; no
//! other code path decides whether a value "is zero".
//!
//! Tolerances are relative, anchored at `max(1, λ_max)`, so zero matrices
//! and small-scale data are not spuriously rejected.
//!
//! The eigensolver and the least-squares solver are backed by `nalgebra`
//! (`SymmetricEigen` on the Hermitian part, SVD for least squares); both
//! are pure Rust and platform-deterministic.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance bundle threaded through every verification.
///
/// * `psd_tol` — relative threshold on negative eigenvalues when deciding
///   positive semidefiniteness;
/// * `rank_tol` — relative threshold separating zero from nonzero
///   eigenvalues (and singular values) in rank decisions;
/// * `verify_tol` — acceptance threshold for identity defects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericConfig {
    pub psd_tol: f64,
    pub rank_tol: f64,
    pub verify_tol: f64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig {
            psd_tol: 1e-9,
            rank_tol: 1e-9,
            verify_tol: 1e-8,
        }
    }
}

impl NumericConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("psd_tol", self.psd_tol),
            ("rank_tol", self.rank_tol),
            ("verify_tol", self.verify_tol),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Same tolerances with `verify_tol` replaced; used by the CLI `--tol`
    /// flag.
    pub fn with_verify_tol(mut self, tol: f64) -> Self {
        self.verify_tol = tol;
        self
    }
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        ComplexMatrix {
            rows,
            cols,
            entries,
        }
    }

    /// Builds from row-major entry data; rejects wrong lengths and
    /// non-finite entries.
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        let m = ComplexMatrix {
            rows,
            cols,
            entries,
        };
        if !m.is_finite() {
            return Err(Error::InvalidInput(
                "matrix entries must be finite".to_string(),
            ));
        }
        Ok(m)
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged row lengths".to_string()));
        }
        Self::from_entries(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_columns(cols: &[Vec<Complex64>]) -> Result<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|col| col.len() != r) {
            return Err(Error::InvalidInput("ragged column lengths".to_string()));
        }
        Ok(Self::from_fn(r, c, |i, j| cols[j][i]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * c)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + rhs[(i, j)])
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - rhs[(i, j)])
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn kron(&self, rhs: &Self) -> Self {
        Self::from_fn(self.rows * rhs.rows, self.cols * rhs.cols, |i, j| {
            self[(i / rhs.rows, j / rhs.cols)] * rhs[(i % rhs.rows, j % rhs.cols)]
        })
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn fro_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `max |M - M*|` entrywise; zero exactly for Hermitian matrices.
    pub fn hermitian_defect(&self) -> f64 {
        assert!(self.is_square());
        let mut d: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                d = d.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        d
    }

    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub(crate) fn to_na(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }

    pub(crate) fn from_na(m: &DMatrix<Complex64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

fn check_hermitian_input(m: &ComplexMatrix, cfg: &NumericConfig) -> Result<()> {
    cfg.validate()?;
    if !m.is_square() {
        return Err(Error::InvalidInput(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::InvalidInput(
            "matrix entries must be finite".to_string(),
        ));
    }
    let defect = m.hermitian_defect();
    if defect > cfg.verify_tol * (1.0 + m.max_norm()) {
        return Err(Error::InvalidInput(format!(
            "matrix is not Hermitian (defect {defect:.3e})"
        )));
    }
    Ok(())
}

/// Hermitian eigendecomposition: ascending real eigenvalues and a unitary
/// matrix of corresponding eigenvector columns.
///
/// The input must be Hermitian within `verify_tol * (1 + max_norm)`; the
/// decomposition is computed on the Hermitian part `(M + M*)/2` so that
/// representation roundoff cannot leak into the spectrum.
pub fn herm_eig(m: &ComplexMatrix, cfg: &NumericConfig) -> Result<(Vec<f64>, ComplexMatrix)> {
    check_hermitian_input(m, cfg)?;
    let n = m.rows();
    if n == 0 {
        return Ok((Vec::new(), ComplexMatrix::zeros(0, 0)));
    }
    let eig = nalgebra::SymmetricEigen::new(m.hermitian_part().to_na());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Positive semidefiniteness: `λ_min >= -psd_tol * max(1, λ_max)`.
pub fn psd_check(m: &ComplexMatrix, cfg: &NumericConfig) -> Result<bool> {
    let (values, _) = herm_eig(m, cfg)?;
    match (values.first(), values.last()) {
        (Some(&lo), Some(&hi)) => Ok(lo >= -cfg.psd_tol * hi.max(1.0)),
        _ => Ok(true),
    }
}

/// Positive square root of a positive semidefinite matrix.
///
/// Eigenvalues in the negative tolerance band are clamped to zero before
/// taking square roots, so the result is Hermitian positive semidefinite
/// by construction and `R * R` reproduces the input to solver accuracy.
pub fn psd_sqrt(m: &ComplexMatrix, cfg: &NumericConfig) -> Result<ComplexMatrix> {
    if !psd_check(m, cfg)? {
        return Err(Error::NotPositive(
            "matrix has a negative eigenvalue beyond tolerance".to_string(),
        ));
    }
    let (values, u) = herm_eig(m, cfg)?;
    let n = m.rows();
    let mut scaled = u.clone();
    for (j, &lambda) in values.iter().enumerate() {
        let root = Complex64::new(lambda.max(0.0).sqrt(), 0.0);
        for i in 0..n {
            scaled[(i, j)] *= root;
        }
    }
    Ok(scaled.mul(&u.adjoint()).hermitian_part())
}

/// Rank and kernel of a positive semidefinite Gram matrix.
#[derive(Debug, Clone)]
pub struct RankKernel {
    pub rank: usize,
    /// Orthonormal kernel basis, one column per kernel direction
    /// (`n - rank` columns).
    pub kernel: ComplexMatrix,
}

/// Splits the spectrum of a PSD matrix at `rank_tol * max(1, λ_max)`:
/// eigenvalues above are counted into the rank, eigenvectors at or below
/// form the kernel basis.
pub fn rank_kernel(g: &ComplexMatrix, cfg: &NumericConfig) -> Result<RankKernel> {
    if !psd_check(g, cfg)? {
        return Err(Error::NotPositive(
            "rank/kernel split needs a positive semidefinite input".to_string(),
        ));
    }
    let (values, u) = herm_eig(g, cfg)?;
    let lambda_max = values.last().copied().unwrap_or(0.0);
    let threshold = cfg.rank_tol * lambda_max.max(1.0);
    let rank = values.iter().filter(|&&v| v > threshold).count();
    let n = g.rows();
    // ascending order puts the kernel in the leading columns
    let kernel = ComplexMatrix::from_fn(n, n - rank, |i, j| u[(i, j)]);
    Ok(RankKernel { rank, kernel })
}

/// Least-squares solve of `A X = B` via SVD; returns the minimizer of the
/// Frobenius residual together with `‖A X − B‖_F`. Singular values at or
/// below `rank_tol * σ_max` are treated as zero.
pub fn lstsq(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    cfg: &NumericConfig,
) -> Result<(ComplexMatrix, f64)> {
    cfg.validate()?;
    if a.rows() != b.rows() {
        return Err(Error::InvalidInput(format!(
            "row counts differ: A has {}, B has {}",
            a.rows(),
            b.rows()
        )));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInput(
            "matrix entries must be finite".to_string(),
        ));
    }
    if a.cols() == 0 {
        let x = ComplexMatrix::zeros(0, b.cols());
        return Ok((x, b.fro_norm()));
    }
    let svd = nalgebra::SVD::new(a.to_na(), true, true);
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let eps = cfg.rank_tol * sigma_max;
    let x_na = svd
        .solve(&b.to_na(), eps)
        .map_err(|e| Error::Internal(format!("svd solve failed: {e}")))?;
    let x = ComplexMatrix::from_na(&x_na);
    let residual = a.mul(&x).sub(b).fro_norm();
    Ok((x, residual))
}

/// Stacks vectors as columns and returns the rank of their span, using the
/// same eigenvalue split as [`rank_kernel`] on the Gram `S* S`.
pub fn span_rank(vectors: &[Vec<Complex64>], cfg: &NumericConfig) -> Result<usize> {
    if vectors.is_empty() {
        return Ok(0);
    }
    let s = ComplexMatrix::from_columns(vectors)?;
    let gram = s.adjoint().mul(&s);
    Ok(rank_kernel(&gram, cfg)?.rank)
}
