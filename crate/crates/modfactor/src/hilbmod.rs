//! Hilbert C*-modules in presented form, correspondences, and interior
//! tensor products.
//!
//! A module over an algebra `C` is presented by `k` abstract generators
//! `e_1, ..., e_k` together with a `k x k` Gram matrix of algebra elements
//! `G_ij = <e_i, e_j>`; a concrete element is a coefficient tuple
//! `x = Σ e_i c_i`. The presentation is never reduced: null vectors (those
//! with `<x, x> = 0`) stay representable, and equality of elements means
//! the difference is null. Inner products are conjugate-linear in the
//! first slot.
//!
//! All rank questions are delegated to the scalar Gram: the Gram of the
//! free coefficient family `{e_i c_β}` under the trace pairing
//! `(u, v) ↦ trace <u, v>`. Its kernel consists exactly of the
//! coefficient tuples of null vectors because the trace is faithful.
//!
//! A [`Correspondence`] adds a left action of a second algebra, stored as
//! one coefficient matrix per canonical basis element. The interior tensor
//! product [`interior_tensor`] balances the right coefficients of the
//! first factor against the left action on the second.

use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::{canonical_basis, AlgebraElement, AlgebraSpec};
use crate::error::{Error, Result};
use crate::numerics::{herm_eig, psd_check, psd_sqrt, rank_kernel, ComplexMatrix, NumericConfig};

#[derive(Debug)]
struct ModuleData {
    algebra: AlgebraSpec,
    k: usize,
    /// Row-major `k x k` Gram of algebra elements.
    gram: Vec<AlgebraElement>,
}

/// A finitely generated right Hilbert C*-module in presented form.
///
/// Cloning is cheap (the presentation is shared); elements hold a handle
/// to their module.
#[derive(Debug, Clone)]
pub struct PresentedModule {
    data: Arc<ModuleData>,
}

impl PresentedModule {
    /// Validates the presentation: the Gram must be Hermitian
    /// (`G_ij = G_ji*`) and positive semidefinite as a matrix over the
    /// algebra, which is checked blockwise on the rearranged scalar form.
    pub fn new(
        algebra: &AlgebraSpec,
        k: usize,
        gram: Vec<AlgebraElement>,
        cfg: &NumericConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        if gram.len() != k * k {
            return Err(Error::InvalidInput(format!(
                "Gram for {k} generators needs {} entries, got {}",
                k * k,
                gram.len()
            )));
        }
        let mut scale = 1.0_f64;
        for (idx, g) in gram.iter().enumerate() {
            if g.spec() != algebra {
                return Err(Error::InvalidInput(format!(
                    "Gram entry {idx} lives in a different algebra"
                )));
            }
            scale = scale.max(g.max_norm());
        }
        for i in 0..k {
            for j in 0..k {
                let defect = gram[i * k + j].sub(&gram[j * k + i].adjoint())?.max_norm();
                if defect > cfg.verify_tol * scale {
                    return Err(Error::InvalidInput(format!(
                        "Gram is not Hermitian at ({i},{j}) (defect {defect:.3e})"
                    )));
                }
            }
        }
        let module = PresentedModule {
            data: Arc::new(ModuleData {
                algebra: algebra.clone(),
                k,
                gram,
            }),
        };
        for (t, block) in module.rearranged_blocks().iter().enumerate() {
            if !psd_check(block, cfg)? {
                return Err(Error::NotPositive(format!(
                    "Gram is not positive semidefinite (algebra block {t})"
                )));
            }
        }
        Ok(module)
    }

    /// The free module `C^k`: Gram `δ_ij · 1`.
    pub fn free(algebra: &AlgebraSpec, k: usize) -> Self {
        let mut gram = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                gram.push(if i == j {
                    AlgebraElement::unit(algebra)
                } else {
                    AlgebraElement::zero(algebra)
                });
            }
        }
        PresentedModule {
            data: Arc::new(ModuleData {
                algebra: algebra.clone(),
                k,
                gram,
            }),
        }
    }

    pub fn algebra(&self) -> &AlgebraSpec {
        &self.data.algebra
    }

    pub fn generators(&self) -> usize {
        self.data.k
    }

    pub fn gram(&self, i: usize, j: usize) -> &AlgebraElement {
        &self.data.gram[i * self.data.k + j]
    }

    /// Dimension of the free coefficient space `k · dim(C)`.
    pub fn coeff_dim(&self) -> usize {
        self.data.k * self.data.algebra.dim()
    }

    /// Same coefficient space: identical algebra and generator count.
    /// Element operations use this as their compatibility test.
    pub fn compatible_with(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.data, &other.data)
            || (self.data.algebra == other.data.algebra && self.data.k == other.data.k)
    }

    /// Entrywise distance between two Gram matrices of compatible modules.
    pub fn gram_distance(&self, other: &Self) -> Result<f64> {
        if !self.compatible_with(other) {
            return Err(Error::InvalidInput(
                "modules have different coefficient spaces".to_string(),
            ));
        }
        let mut d = 0.0_f64;
        for (a, b) in self.data.gram.iter().zip(&other.data.gram) {
            d = d.max(a.sub(b)?.max_norm());
        }
        Ok(d)
    }

    /// The Gram rearranged per algebra block: block `t` becomes the
    /// `(k n_t) x (k n_t)` scalar matrix with `(i,j)` sub-block
    /// `G_ij.block(t)`. Positivity of the Gram over the algebra is
    /// equivalent to every rearranged block being PSD, and the
    /// rearrangement is multiplicative, so square roots can be taken here.
    pub fn rearranged_blocks(&self) -> Vec<ComplexMatrix> {
        let k = self.data.k;
        self.data
            .algebra
            .block_dims()
            .iter()
            .enumerate()
            .map(|(t, &n)| {
                ComplexMatrix::from_fn(k * n, k * n, |r, c| {
                    self.gram(r / n, c / n).block(t)[(r % n, c % n)]
                })
            })
            .collect()
    }

    /// Gram of the free family `{e_i c_β}` under the trace pairing, a
    /// `(k·N) x (k·N)` PSD matrix whose kernel is exactly the coefficient
    /// tuples of null vectors. Row index is `i·N + β`.
    pub fn scalar_gram(&self) -> ComplexMatrix {
        let n_alg = self.data.algebra.dim();
        let dim = self.data.k * n_alg;
        let spec = &self.data.algebra;
        ComplexMatrix::from_fn(dim, dim, |row, col| {
            let (i, beta) = (row / n_alg, row % n_alg);
            let (j, gamma) = (col / n_alg, col % n_alg);
            let (t, p, q) = spec.basis_position(beta);
            let (u, r, s) = spec.basis_position(gamma);
            if t == u && q == s {
                // trace(E_pq* G_ij E_rs) = G_ij.block(t)[p,r] δ_qs
                self.gram(i, j).block(t)[(p, r)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Module dimension: the rank of the scalar Gram, i.e. the dimension
    /// of the module as a complex vector space after quotienting nulls.
    pub fn dim(&self, cfg: &NumericConfig) -> Result<usize> {
        Ok(rank_kernel(&self.scalar_gram(), cfg)?.rank)
    }

    pub fn element(&self, coeffs: Vec<AlgebraElement>) -> Result<ModuleElement> {
        if coeffs.len() != self.data.k {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficients, got {}",
                self.data.k,
                coeffs.len()
            )));
        }
        for (i, c) in coeffs.iter().enumerate() {
            if c.spec() != &self.data.algebra {
                return Err(Error::InvalidInput(format!(
                    "coefficient {i} lives in a different algebra"
                )));
            }
        }
        Ok(ModuleElement {
            module: self.clone(),
            coeffs,
        })
    }

    pub fn zero_element(&self) -> ModuleElement {
        ModuleElement {
            module: self.clone(),
            coeffs: (0..self.data.k)
                .map(|_| AlgebraElement::zero(&self.data.algebra))
                .collect(),
        }
    }

    /// The free basis element `e_i · b_β` (generator `i`, canonical basis
    /// element `β` of the coefficient algebra).
    pub fn basis_element(&self, i: usize, beta: usize) -> ModuleElement {
        let basis = canonical_basis(&self.data.algebra);
        let mut out = self.zero_element();
        out.coeffs[i] = basis[beta].clone();
        out
    }

    /// Element from flat complex coordinates on the free coefficient
    /// space, index `i·N + β`.
    pub fn element_from_flat(&self, flat: &[Complex64]) -> Result<ModuleElement> {
        let n_alg = self.data.algebra.dim();
        if flat.len() != self.coeff_dim() {
            return Err(Error::InvalidInput(format!(
                "expected {} coordinates, got {}",
                self.coeff_dim(),
                flat.len()
            )));
        }
        let coeffs = (0..self.data.k)
            .map(|i| {
                AlgebraElement::from_coords(&self.data.algebra, &flat[i * n_alg..(i + 1) * n_alg])
            })
            .collect::<Result<Vec<_>>>()?;
        self.element(coeffs)
    }

    /// Trace-orthonormal basis of the module extracted from the scalar
    /// Gram `S = Q Λ Q*`: `map = Λ_+^{1/2} Q_+*` sends coefficient
    /// coordinates isometrically onto `C^rank`, and `pinv = Q_+ Λ_+^{-1/2}`
    /// is its right inverse. For modules over the scalars this identifies
    /// the presented module with an honest Hilbert space.
    pub fn orthonormal_basis(&self, cfg: &NumericConfig) -> Result<OrthonormalBasis> {
        let s = self.scalar_gram();
        if !psd_check(&s, cfg)? {
            return Err(Error::Internal(
                "scalar Gram of a validated module must be PSD".to_string(),
            ));
        }
        let (values, q) = herm_eig(&s, cfg)?;
        let lambda_max = values.last().copied().unwrap_or(0.0);
        let threshold = cfg.rank_tol * lambda_max.max(1.0);
        let keep: Vec<usize> = (0..values.len())
            .filter(|&i| values[i] > threshold)
            .collect();
        let rank = keep.len();
        let n = s.rows();
        let mut map = ComplexMatrix::zeros(rank, n);
        let mut pinv = ComplexMatrix::zeros(n, rank);
        for (r, &idx) in keep.iter().enumerate() {
            let root = values[idx].sqrt();
            for c in 0..n {
                map[(r, c)] = q[(c, idx)].conj() * root;
                pinv[(c, r)] = q[(c, idx)] / root;
            }
        }
        Ok(OrthonormalBasis { rank, map, pinv })
    }
}

/// Isometric identification of a presented module with `C^rank` under the
/// trace pairing; see [`PresentedModule::orthonormal_basis`].
#[derive(Debug, Clone)]
pub struct OrthonormalBasis {
    pub rank: usize,
    /// `rank x coeff_dim`; satisfies `map* · map ≈ scalar_gram`.
    pub map: ComplexMatrix,
    /// `coeff_dim x rank` right inverse of `map`.
    pub pinv: ComplexMatrix,
}

impl OrthonormalBasis {
    /// Coordinates of an element in the orthonormal basis.
    pub fn project(&self, x: &ModuleElement) -> Vec<Complex64> {
        let flat = x.flat_coords();
        (0..self.rank)
            .map(|r| (0..flat.len()).map(|c| self.map[(r, c)] * flat[c]).sum())
            .collect()
    }
}

/// An element `Σ e_i c_i` of a presented module.
#[derive(Debug, Clone)]
pub struct ModuleElement {
    module: PresentedModule,
    coeffs: Vec<AlgebraElement>,
}

impl ModuleElement {
    pub fn module(&self) -> &PresentedModule {
        &self.module
    }

    pub fn coeffs(&self) -> &[AlgebraElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &AlgebraElement {
        &self.coeffs[i]
    }

    fn check_same_module(&self, rhs: &Self) -> Result<()> {
        if !self.module.compatible_with(&rhs.module) {
            return Err(Error::InvalidInput(
                "elements belong to different modules".to_string(),
            ));
        }
        Ok(())
    }

    /// `<self, rhs> = Σ_ij c_i* G_ij d_j`, conjugate-linear in `self`.
    pub fn inner(&self, rhs: &Self) -> Result<AlgebraElement> {
        self.check_same_module(rhs)?;
        let mut acc = AlgebraElement::zero(self.module.algebra());
        for i in 0..self.coeffs.len() {
            let ci_adj = self.coeffs[i].adjoint();
            for (j, dj) in rhs.coeffs.iter().enumerate() {
                acc = acc.add(&ci_adj.mul(self.module.gram(i, j))?.mul(dj)?)?;
            }
        }
        Ok(acc)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_same_module(rhs)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(ModuleElement {
            module: self.module.clone(),
            coeffs,
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_same_module(rhs)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(ModuleElement {
            module: self.module.clone(),
            coeffs,
        })
    }

    pub fn scale(&self, z: Complex64) -> Self {
        ModuleElement {
            module: self.module.clone(),
            coeffs: self.coeffs.iter().map(|c| c.scale(z)).collect(),
        }
    }

    /// Right module action: `(Σ e_i c_i) · c = Σ e_i (c_i c)`.
    pub fn right_mul(&self, c: &AlgebraElement) -> Result<Self> {
        if c.spec() != self.module.algebra() {
            return Err(Error::InvalidInput(
                "right coefficient lives in a different algebra".to_string(),
            ));
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|ci| ci.mul(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(ModuleElement {
            module: self.module.clone(),
            coeffs,
        })
    }

    /// `Re trace <x, x>`, the squared length in the trace pairing. Zero
    /// exactly on null vectors; element equality means the difference has
    /// `self_overlap` at most `verify_tol`.
    pub fn self_overlap(&self) -> Result<f64> {
        Ok(self.inner(self)?.trace().re)
    }

    /// `sqrt(max(0, self_overlap))`.
    pub fn trace_norm(&self) -> Result<f64> {
        Ok(self.self_overlap()?.max(0.0).sqrt())
    }

    pub fn is_null(&self, cfg: &NumericConfig) -> Result<bool> {
        Ok(self.self_overlap()? <= cfg.verify_tol)
    }

    /// Flat complex coordinates on the free coefficient space, `i·N + β`.
    pub fn flat_coords(&self) -> Vec<Complex64> {
        self.coeffs.iter().flat_map(|c| c.coords()).collect()
    }
}

/// Pairwise inner products `<x_e, x_f>` of a family of elements, returned
/// per algebra block: entry `t` is the `(len·n_t) x (len·n_t)` matrix with
/// sub-block `(e, f)` equal to block `t` of `<x_e, x_f>`. Computed as
/// `U_t* (G_t U_t)` on the rearranged Gram, which keeps large scans cheap.
pub fn pairwise_gram(
    module: &PresentedModule,
    elements: &[ModuleElement],
) -> Result<Vec<ComplexMatrix>> {
    for x in elements {
        if !module.compatible_with(x.module()) {
            return Err(Error::InvalidInput(
                "element belongs to a different module".to_string(),
            ));
        }
    }
    let k = module.generators();
    let len = elements.len();
    let mut out = Vec::new();
    for (t, g_t) in module.rearranged_blocks().iter().enumerate() {
        let n = module.algebra().block_dims()[t];
        let u = ComplexMatrix::from_fn(k * n, len * n, |row, col| {
            elements[col / n].coeff(row / n).block(t)[(row % n, col % n)]
        });
        out.push(u.adjoint().mul(&g_t.mul(&u)));
    }
    Ok(out)
}

/// Dimension of the span of a family of elements modulo null vectors: the
/// rank of their Gram under the trace pairing. The family generates the
/// module exactly when this equals [`PresentedModule::dim`].
pub fn span_dimension(
    module: &PresentedModule,
    elements: &[ModuleElement],
    cfg: &NumericConfig,
) -> Result<usize> {
    if elements.is_empty() {
        return Ok(0);
    }
    let blocks = pairwise_gram(module, elements)?;
    let len = elements.len();
    let mut s = ComplexMatrix::zeros(len, len);
    for (t, &n) in module.algebra().block_dims().iter().enumerate() {
        for e in 0..len {
            for f in 0..len {
                let mut acc = Complex64::new(0.0, 0.0);
                for p in 0..n {
                    acc += blocks[t][(e * n + p, f * n + p)];
                }
                s[(e, f)] += acc;
            }
        }
    }
    Ok(rank_kernel(&s, cfg)?.rank)
}

/// A correspondence: a presented module together with a left action of a
/// second algebra by adjointable operators, stored as one `k x k`
/// coefficient matrix `A(b_γ)` per canonical basis element of the left
/// algebra, where `b · e_j = Σ_m e_m A(b)_mj`.
#[derive(Debug, Clone)]
pub struct Correspondence {
    module: PresentedModule,
    left_algebra: AlgebraSpec,
    /// `action[γ]` is row-major `k x k`.
    action: Arc<Vec<Vec<AlgebraElement>>>,
}

impl Correspondence {
    pub fn new(
        module: PresentedModule,
        left_algebra: AlgebraSpec,
        action: Vec<Vec<AlgebraElement>>,
    ) -> Result<Self> {
        let k = module.generators();
        if action.len() != left_algebra.dim() {
            return Err(Error::InvalidInput(format!(
                "need one action matrix per basis element ({}), got {}",
                left_algebra.dim(),
                action.len()
            )));
        }
        for (gamma, m) in action.iter().enumerate() {
            if m.len() != k * k {
                return Err(Error::InvalidInput(format!(
                    "action matrix {gamma} must be {k}x{k}"
                )));
            }
            for entry in m {
                if entry.spec() != module.algebra() {
                    return Err(Error::InvalidInput(format!(
                        "action matrix {gamma} has entries outside the coefficient algebra"
                    )));
                }
            }
        }
        Ok(Correspondence {
            module,
            left_algebra,
            action: Arc::new(action),
        })
    }

    /// The algebra as a correspondence over itself: one generator with
    /// Gram `1` and left action by multiplication.
    pub fn identity(spec: &AlgebraSpec, cfg: &NumericConfig) -> Result<Self> {
        let module = PresentedModule::new(spec, 1, vec![AlgebraElement::unit(spec)], cfg)?;
        let action = canonical_basis(spec).into_iter().map(|b| vec![b]).collect();
        Correspondence::new(module, spec.clone(), action)
    }

    pub fn module(&self) -> &PresentedModule {
        &self.module
    }

    pub fn left_algebra(&self) -> &AlgebraSpec {
        &self.left_algebra
    }

    pub fn action_matrix(&self, gamma: usize) -> &[AlgebraElement] {
        &self.action[gamma]
    }

    /// The coefficient matrix of the action of a general element,
    /// assembled linearly from the basis action matrices.
    pub fn left_action_of(&self, b: &AlgebraElement) -> Result<Vec<AlgebraElement>> {
        if b.spec() != &self.left_algebra {
            return Err(Error::InvalidInput(
                "left factor lives in a different algebra".to_string(),
            ));
        }
        let k = self.module.generators();
        let mut out = vec![AlgebraElement::zero(self.module.algebra()); k * k];
        for (gamma, z) in b.coords().into_iter().enumerate() {
            if z == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (slot, entry) in out.iter_mut().zip(self.action[gamma].iter()) {
                *slot = slot.add(&entry.scale(z))?;
            }
        }
        Ok(out)
    }

    /// Left module action `b · u`.
    pub fn left_act(&self, b: &AlgebraElement, u: &ModuleElement) -> Result<ModuleElement> {
        if !self.module.compatible_with(u.module()) {
            return Err(Error::InvalidInput(
                "element belongs to a different module".to_string(),
            ));
        }
        let k = self.module.generators();
        let act = self.left_action_of(b)?;
        let mut coeffs = vec![AlgebraElement::zero(self.module.algebra()); k];
        for (m, slot) in coeffs.iter_mut().enumerate() {
            for (j, cj) in u.coeffs().iter().enumerate() {
                *slot = slot.add(&act[m * k + j].mul(cj)?)?;
            }
        }
        self.module.element(coeffs)
    }

    /// Verifies the left action laws modulo null vectors by measuring
    /// Gram-weighted defects: unital `G·A(1) = G`, multiplicative
    /// `G·A(bb') = G·A(b)·A(b')` on basis pairs, and adjointability
    /// `A(b*)†·G = G·A(b)` on basis elements.
    pub fn check_left_action(&self, cfg: &NumericConfig) -> Result<LeftActionReport> {
        cfg.validate()?;
        let k = self.module.generators();
        let gram: Vec<AlgebraElement> = {
            let mut g = Vec::with_capacity(k * k);
            for i in 0..k {
                for j in 0..k {
                    g.push(self.module.gram(i, j).clone());
                }
            }
            g
        };
        let mat_mul = |a: &[AlgebraElement], b: &[AlgebraElement]| -> Result<Vec<AlgebraElement>> {
            let mut out = vec![AlgebraElement::zero(self.module.algebra()); k * k];
            for i in 0..k {
                for l in 0..k {
                    let mut acc = AlgebraElement::zero(self.module.algebra());
                    for m in 0..k {
                        acc = acc.add(&a[i * k + m].mul(&b[m * k + l])?)?;
                    }
                    out[i * k + l] = acc;
                }
            }
            Ok(out)
        };
        let max_diff = |a: &[AlgebraElement], b: &[AlgebraElement]| -> Result<f64> {
            let mut d = 0.0_f64;
            for (x, y) in a.iter().zip(b) {
                d = d.max(x.sub(y)?.max_norm());
            }
            Ok(d)
        };
        let adjoint_mat = |a: &[AlgebraElement]| -> Vec<AlgebraElement> {
            let mut out = Vec::with_capacity(k * k);
            for i in 0..k {
                for j in 0..k {
                    out.push(a[j * k + i].adjoint());
                }
            }
            out
        };

        let one = AlgebraElement::unit(&self.left_algebra);
        let unital = max_diff(&mat_mul(&gram, &self.left_action_of(&one)?)?, &gram)?;

        let basis = canonical_basis(&self.left_algebra);
        let gram_actions: Vec<Vec<AlgebraElement>> = (0..basis.len())
            .map(|gamma| mat_mul(&gram, &self.action[gamma]))
            .collect::<Result<Vec<_>>>()?;
        let mut multiplicative = 0.0_f64;
        for bg in &basis {
            for (delta, bd) in basis.iter().enumerate() {
                let prod = bg.mul(bd)?;
                let lhs = mat_mul(&gram, &self.left_action_of(&prod)?)?;
                let rhs = mat_mul(
                    &mat_mul(&gram, &self.left_action_of(bg)?)?,
                    &self.action[delta],
                )?;
                multiplicative = multiplicative.max(max_diff(&lhs, &rhs)?);
            }
        }
        let mut adjoint = 0.0_f64;
        for (gamma, bg) in basis.iter().enumerate() {
            let lhs = mat_mul(&adjoint_mat(&self.left_action_of(&bg.adjoint())?), &gram)?;
            adjoint = adjoint.max(max_diff(&lhs, &gram_actions[gamma])?);
        }
        Ok(LeftActionReport {
            unital_defect: unital,
            multiplicative_defect: multiplicative,
            adjoint_defect: adjoint,
        })
    }
}

/// Defects of the three left-action laws, Gram-weighted so they are
/// insensitive to null-vector ambiguity.
#[derive(Debug, Clone, Copy)]
pub struct LeftActionReport {
    pub unital_defect: f64,
    pub multiplicative_defect: f64,
    pub adjoint_defect: f64,
}

impl LeftActionReport {
    pub fn max_defect(&self) -> f64 {
        self.unital_defect
            .max(self.multiplicative_defect)
            .max(self.adjoint_defect)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_defect() <= tol
    }
}

/// Interior tensor product `E ⊙ F` of a module over `B` with a
/// correspondence from `B` to `C`: generators are pairs `(i, j)` indexed
/// `i·k_F + j`, and the Gram balances inner products of `E` through the
/// left action of `F`:
/// `H_{(i,j),(k,l)} = Σ_m G^F_{j,m} · A(<x_i, x_k>_E)_{m,l}`.
pub fn interior_tensor(
    e: &PresentedModule,
    f: &Correspondence,
    cfg: &NumericConfig,
) -> Result<PresentedModule> {
    if e.algebra() != f.left_algebra() {
        return Err(Error::InvalidInput(format!(
            "tensor factors do not match: module over {:?}, left action of {:?}",
            e.algebra().block_dims(),
            f.left_algebra().block_dims()
        )));
    }
    let ke = e.generators();
    let kf = f.module().generators();
    let kt = ke * kf;
    let mut gram = vec![AlgebraElement::zero(f.module().algebra()); kt * kt];
    for i in 0..ke {
        for k in 0..ke {
            let act = f.left_action_of(e.gram(i, k))?;
            for j in 0..kf {
                for l in 0..kf {
                    let mut acc = AlgebraElement::zero(f.module().algebra());
                    for m in 0..kf {
                        acc = acc.add(&f.module().gram(j, m).mul(&act[m * kf + l])?)?;
                    }
                    gram[(i * kf + j) * kt + (k * kf + l)] = acc;
                }
            }
        }
    }
    PresentedModule::new(f.module().algebra(), kt, gram, cfg).map_err(|e| match e {
        // the tensor Gram of valid inputs is PSD; a failure here means the
        // input correspondence was not really adjointable/positive
        Error::NotPositive(msg) | Error::InvalidInput(msg) => {
            Error::Internal(format!("tensor Gram invalid: {msg}"))
        }
        other => other,
    })
}

/// The elementary tensor `x ⊙ y` as an element of `E ⊙ F`: for
/// `x = Σ e_i c_i` the coefficient at generator `(i, l)` is
/// `[A(c_i) d]_l` where `d` are the coefficients of `y`.
pub fn tensor_element(
    x: &ModuleElement,
    f: &Correspondence,
    y: &ModuleElement,
    tensor: &PresentedModule,
) -> Result<ModuleElement> {
    if x.module().algebra() != f.left_algebra() {
        return Err(Error::InvalidInput(
            "left tensor factor is not a module over the correspondence's left algebra".to_string(),
        ));
    }
    if !f.module().compatible_with(y.module()) {
        return Err(Error::InvalidInput(
            "right tensor factor does not live in the correspondence".to_string(),
        ));
    }
    let ke = x.coeffs().len();
    let kf = f.module().generators();
    if tensor.generators() != ke * kf || tensor.algebra() != f.module().algebra() {
        return Err(Error::InvalidInput(
            "target module is not the tensor product of the factors".to_string(),
        ));
    }
    let mut coeffs = vec![AlgebraElement::zero(f.module().algebra()); ke * kf];
    for (i, ci) in x.coeffs().iter().enumerate() {
        let act = f.left_action_of(ci)?;
        for l in 0..kf {
            let mut acc = AlgebraElement::zero(f.module().algebra());
            for (j, dj) in y.coeffs().iter().enumerate() {
                acc = acc.add(&act[l * kf + j].mul(dj)?)?;
            }
            coeffs[i * kf + l] = acc;
        }
    }
    tensor.element(coeffs)
}

/// Tensor product of two correspondences: the module is
/// [`interior_tensor`], and the left algebra of the first factor acts by
/// `A(a)_{(i,j),(k,l)} = [A^F(A^E(a)_{i,k})]_{j,l}`.
pub fn tensor_correspondence(
    e: &Correspondence,
    f: &Correspondence,
    cfg: &NumericConfig,
) -> Result<Correspondence> {
    let module = interior_tensor(e.module(), f, cfg)?;
    let ke = e.module().generators();
    let kf = f.module().generators();
    let kt = ke * kf;
    let mut action = Vec::with_capacity(e.left_algebra().dim());
    for gamma in 0..e.left_algebra().dim() {
        let mut mat = vec![AlgebraElement::zero(f.module().algebra()); kt * kt];
        for i in 0..ke {
            for k in 0..ke {
                let inner_act = f.left_action_of(&e.action_matrix(gamma)[i * ke + k])?;
                for j in 0..kf {
                    for l in 0..kf {
                        mat[(i * kf + j) * kt + (k * kf + l)] = inner_act[j * kf + l].clone();
                    }
                }
            }
        }
        action.push(mat);
    }
    Correspondence::new(module, e.left_algebra().clone(), action)
}

/// The module `M_{m x n}` of `m x n` matrices over `M_n`, presented by the
/// row generators `r_a = E_{a,1}` with Gram `<r_a, r_b> = δ_ab E_11`,
/// together with the dictionary between presented elements and concrete
/// matrices.
#[derive(Debug, Clone)]
pub struct MatrixModule {
    module: PresentedModule,
    m: usize,
    n: usize,
}

/// Constructs [`MatrixModule`] for `m x n` matrices over `M_n`.
pub fn matrix_module(m: usize, n: usize, cfg: &NumericConfig) -> Result<MatrixModule> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidInput(
            "matrix module needs positive dimensions".to_string(),
        ));
    }
    let algebra = AlgebraSpec::new(vec![n])?;
    let basis = canonical_basis(&algebra);
    let e11 = basis[algebra.basis_index(0, 0, 0)].clone();
    let mut gram = Vec::with_capacity(m * m);
    for a in 0..m {
        for b in 0..m {
            gram.push(if a == b {
                e11.clone()
            } else {
                AlgebraElement::zero(&algebra)
            });
        }
    }
    Ok(MatrixModule {
        module: PresentedModule::new(&algebra, m, gram, cfg)?,
        m,
        n,
    })
}

impl MatrixModule {
    pub fn module(&self) -> &PresentedModule {
        &self.module
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    /// The concrete `m x n` matrix of an element: `Σ_a E_{a,1} c_a` has
    /// row `a` equal to the first row of `c_a`.
    pub fn to_operator(&self, x: &ModuleElement) -> Result<ComplexMatrix> {
        if !self.module.compatible_with(x.module()) {
            return Err(Error::InvalidInput(
                "element belongs to a different module".to_string(),
            ));
        }
        Ok(ComplexMatrix::from_fn(self.m, self.n, |a, v| {
            x.coeff(a).block(0)[(0, v)]
        }))
    }

    /// The presented element of a concrete `m x n` matrix.
    pub fn from_operator(&self, x: &ComplexMatrix) -> Result<ModuleElement> {
        if x.rows() != self.m || x.cols() != self.n {
            return Err(Error::InvalidInput(format!(
                "expected a {}x{} matrix, got {}x{}",
                self.m,
                self.n,
                x.rows(),
                x.cols()
            )));
        }
        let coeffs = (0..self.m)
            .map(|a| {
                let block = ComplexMatrix::from_fn(self.n, self.n, |r, c| {
                    if r == 0 {
                        x[(a, c)]
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                });
                AlgebraElement::from_blocks(self.module.algebra(), vec![block])
            })
            .collect::<Result<Vec<_>>>()?;
        self.module.element(coeffs)
    }

    /// Recognizes a presented module as a matrix module: single-block
    /// coefficient algebra `[n]` and Gram `δ_ab E_11` within `verify_tol`.
    pub fn detect(module: &PresentedModule, cfg: &NumericConfig) -> Option<MatrixModule> {
        let dims = module.algebra().block_dims();
        if dims.len() != 1 {
            return None;
        }
        let n = dims[0];
        let m = module.generators();
        for a in 0..m {
            for b in 0..m {
                let g = module.gram(a, b).block(0);
                for r in 0..n {
                    for c in 0..n {
                        let want = if a == b && r == 0 && c == 0 { 1.0 } else { 0.0 };
                        if (g[(r, c)] - Complex64::new(want, 0.0)).norm() > cfg.verify_tol {
                            return None;
                        }
                    }
                }
            }
        }
        Some(MatrixModule {
            module: module.clone(),
            m,
            n,
        })
    }
}

/// The column Hilbert space `C^n` as a correspondence from `M_n` to the
/// scalars: `n` orthonormal generators, and `M_n` acting entrywise.
pub fn column_correspondence(n: usize, cfg: &NumericConfig) -> Result<Correspondence> {
    let scalars = AlgebraSpec::scalars();
    let module = PresentedModule::free(&scalars, n);
    let left = AlgebraSpec::new(vec![n])?;
    let mut action = Vec::with_capacity(left.dim());
    for j in 0..n {
        for k in 0..n {
            // E_jk e_q = δ_kq e_j
            let mut mat = vec![AlgebraElement::zero(&scalars); n * n];
            mat[j * n + k] = AlgebraElement::unit(&scalars);
            action.push(mat);
        }
    }
    let _ = cfg;
    Correspondence::new(module, left, action)
}

/// The canonical isometric embedding of a presented module into the free
/// module `C^k` given by the positive square root of the Gram: coefficient
/// tuples map through `R = G^{1/2}`, and
/// `<R c, R d>_free = Σ c_i* (R² )_ij d_j = <x, y>`.
#[derive(Debug, Clone)]
pub struct FreeEmbedding {
    source: PresentedModule,
    target: PresentedModule,
    /// Row-major `k x k` matrix over the algebra, Hermitian, `root² = G`.
    root: Vec<AlgebraElement>,
}

/// Computes [`FreeEmbedding`] by taking PSD square roots of the
/// rearranged Gram blocks, which is the square root in `M_k(C)`.
pub fn embed_free(module: &PresentedModule, cfg: &NumericConfig) -> Result<FreeEmbedding> {
    let k = module.generators();
    let algebra = module.algebra().clone();
    let mut root = vec![AlgebraElement::zero(&algebra); k * k];
    let roots_per_block: Vec<ComplexMatrix> = module
        .rearranged_blocks()
        .iter()
        .map(|b| psd_sqrt(b, cfg))
        .collect::<Result<Vec<_>>>()?;
    for i in 0..k {
        for j in 0..k {
            let blocks = algebra
                .block_dims()
                .iter()
                .enumerate()
                .map(|(t, &n)| {
                    ComplexMatrix::from_fn(n, n, |p, q| roots_per_block[t][(i * n + p, j * n + q)])
                })
                .collect();
            root[i * k + j] = AlgebraElement::from_blocks(&algebra, blocks)?;
        }
    }
    Ok(FreeEmbedding {
        source: module.clone(),
        target: PresentedModule::free(&algebra, k),
        root,
    })
}

impl FreeEmbedding {
    pub fn source(&self) -> &PresentedModule {
        &self.source
    }

    pub fn target(&self) -> &PresentedModule {
        &self.target
    }

    pub fn root(&self, i: usize, j: usize) -> &AlgebraElement {
        &self.root[i * self.source.generators() + j]
    }

    pub fn apply(&self, x: &ModuleElement) -> Result<ModuleElement> {
        if !self.source.compatible_with(x.module()) {
            return Err(Error::InvalidInput(
                "element belongs to a different module".to_string(),
            ));
        }
        let k = self.source.generators();
        let mut coeffs = vec![AlgebraElement::zero(self.source.algebra()); k];
        for (i, slot) in coeffs.iter_mut().enumerate() {
            for (j, cj) in x.coeffs().iter().enumerate() {
                *slot = slot.add(&self.root[i * k + j].mul(cj)?)?;
            }
        }
        self.target.element(coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::structure_constants;
    use rand::Rng;
    use rand::SeedableRng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cfg() -> NumericConfig {
        NumericConfig::default()
    }

    fn random_element_of(module: &PresentedModule, seed: u64) -> ModuleElement {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let flat: Vec<Complex64> = (0..module.coeff_dim())
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        module.element_from_flat(&flat).unwrap()
    }

    /// M_2 as a bimodule over itself with the trace pairing
    /// `<x, y> = tr(x* y)` taken scalar-valued: four matrix-unit
    /// generators, identity Gram over the scalars, and M_2 acting by left
    /// multiplication through its structure constants.
    fn trace_correspondence() -> Correspondence {
        let m2 = AlgebraSpec::new(vec![2]).unwrap();
        let scalars = AlgebraSpec::scalars();
        let module = PresentedModule::free(&scalars, 4);
        let mut action = Vec::new();
        for b in canonical_basis(&m2) {
            let l = structure_constants(&b);
            let mut mat = Vec::with_capacity(16);
            for r in 0..4 {
                for s in 0..4 {
                    mat.push(AlgebraElement::scalar(&scalars, l[(r, s)]));
                }
            }
            action.push(mat);
        }
        Correspondence::new(module, m2, action).unwrap()
    }

    #[test]
    fn free_module_dimensions() {
        let m2 = AlgebraSpec::new(vec![2]).unwrap();
        let free = PresentedModule::free(&m2, 1);
        // scalar Gram of C^1 over M_2 is the 4x4 identity
        assert!(
            free.scalar_gram()
                .sub(&ComplexMatrix::identity(4))
                .max_norm()
                < 1e-15
        );
        assert_eq!(free.dim(&cfg()).unwrap(), 4);
        let free3 = PresentedModule::free(&AlgebraSpec::new(vec![2, 1]).unwrap(), 3);
        assert_eq!(free3.dim(&cfg()).unwrap(), 15);
    }

    #[test]
    fn zero_gram_module_has_dimension_zero() {
        let m2 = AlgebraSpec::new(vec![2]).unwrap();
        let gram = vec![AlgebraElement::zero(&m2); 4];
        let module = PresentedModule::new(&m2, 2, gram, &cfg()).unwrap();
        assert_eq!(module.dim(&cfg()).unwrap(), 0);
        assert!(random_element_of(&module, 1).is_null(&cfg()).unwrap());
    }

    #[test]
    fn constructor_rejects_bad_grams() {
        let m2 = AlgebraSpec::new(vec![2]).unwrap();
        let neg = AlgebraElement::unit(&m2).scale(c(-1.0, 0.0));
        assert!(matches!(
            PresentedModule::new(&m2, 1, vec![neg], &cfg()),
            Err(Error::NotPositive(_))
        ));
        let basis = canonical_basis(&m2);
        // E_01 is not self-adjoint, so a 1x1 Gram [E_01] is not Hermitian
        assert!(matches!(
            PresentedModule::new(&m2, 1, vec![basis[1].clone()], &cfg()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn positivity_is_tested_over_the_algebra_not_entrywise() {
        // each entry is PSD in M_2, but [[E11, E11], [E11, 0]] is not PSD
        // as a 2x2 matrix over the algebra
        let m2 = AlgebraSpec::new(vec![2]).unwrap();
        let e11 = canonical_basis(&m2)[0].clone();
        let zero = AlgebraElement::zero(&m2);
        let gram = vec![e11.clone(), e11.clone(), e11, zero];
        assert!(matches!(
            PresentedModule::new(&m2, 2, gram, &cfg()),
            Err(Error::NotPositive(_))
        ));
    }

    #[test]
    fn inner_product_laws() {
        let spec = AlgebraSpec::new(vec![2, 1]).unwrap();
        let module = PresentedModule::free(&spec, 2);
        let u = random_element_of(&module, 1);
        let v = random_element_of(&module, 2);
        let w = random_element_of(&module, 3);
        // <u, v>* = <v, u>
        let lhs = u.inner(&v).unwrap().adjoint();
        let rhs = v.inner(&u).unwrap();
        assert!(lhs.sub(&rhs).unwrap().max_norm() < 1e-13);
        // additivity in the second slot
        let sum = u.inner(&v.add(&w).unwrap()).unwrap();
        let split = u.inner(&v).unwrap().add(&u.inner(&w).unwrap()).unwrap();
        assert!(sum.sub(&split).unwrap().max_norm() < 1e-13);
        // right coefficients move out: <u, v c> = <u, v> c and
        // <u c, v> = c* <u, v>
        let a = random_element_of(&module, 4).coeffs()[0].clone();
        let m1 = u.inner(&v.right_mul(&a).unwrap()).unwrap();
        let m2 = u.inner(&v).unwrap().mul(&a).unwrap();
        assert!(m1.sub(&m2).unwrap().max_norm() < 1e-13);
        let m3 = u.right_mul(&a).unwrap().inner(&v).unwrap();
        let m4 = a.adjoint().mul(&u.inner(&v).unwrap()).unwrap();
        assert!(m3.sub(&m4).unwrap().max_norm() < 1e-13);
    }

    #[test]
    fn cauchy_schwarz_in_the_trace_pairing() {
        let spec = AlgebraSpec::new(vec![2, 2]).unwrap();
        let module = PresentedModule::free(&spec, 2);
        for seed in 0..20 {
            let u = random_element_of(&module, 2 * seed);
            let v = random_element_of(&module, 2 * seed + 1);
            let uv = u.inner(&v).unwrap().trace().norm_sqr();
            let uu = u.self_overlap().unwrap();
            let vv = v.self_overlap().unwrap();
            assert!(uv <= uu * vv * (1.0 + 1e-12), "seed {seed}");
        }
    }

    #[test]
    fn null_vectors_and_equality() {
        let m2 = AlgebraSpec::new(vec![2]).unwrap();
        let basis = canonical_basis(&m2);
        let e11 = basis[0].clone();
        let e22 = basis[3].clone();
        let module = PresentedModule::new(&m2, 1, vec![e11.clone()], &cfg()).unwrap();
        // <e1 E22, e1 E22> = E22 E11 E22 = 0: a nonzero coefficient tuple
        // that is a null vector
        let null = module.element(vec![e22]).unwrap();
        assert!(null.is_null(&cfg()).unwrap());
        let x = module.element(vec![e11.clone()]).unwrap();
        let y = x.add(&null).unwrap();
        assert!(y.sub(&x).unwrap().is_null(&cfg()).unwrap());
        // scalar Gram kernel reproduces exactly the null tuples
        let rk = rank_kernel(&module.scalar_gram(), &cfg()).unwrap();
        for col in 0..rk.kernel.cols() {
            let kvec = rk.kernel.column(col);
            let elem = module.element_from_flat(&kvec).unwrap();
            assert!(elem.is_null(&cfg()).unwrap());
        }
    }

    #[test]
    fn matrix_module_gram_matches_operator_model() {
        let mm = matrix_module(3, 2, &cfg()).unwrap();
        // generators are r_a = E_{a,1}; check <r_a, r_b> = r_a* r_b
        for a in 0..3 {
            for b in 0..3 {
                let mut ra = ComplexMatrix::zeros(3, 2);
                ra[(a, 0)] = c(1.0, 0.0);
                let mut rb = ComplexMatrix::zeros(3, 2);
                rb[(b, 0)] = c(1.0, 0.0);
                let oracle = ra.adjoint().mul(&rb);
                let got = mm.module().gram(a, b).block(0);
                assert!(got.sub(&oracle).max_norm() < 1e-15);
            }
        }
        assert_eq!(mm.module().dim(&cfg()).unwrap(), 6);
    }

    #[test]
    fn matrix_module_dictionary_is_isometric() {
        let mm = matrix_module(2, 3, &cfg()).unwrap();
        let u = random_element_of(mm.module(), 5);
        let v = random_element_of(mm.module(), 6);
        let op_u = mm.to_operator(&u).unwrap();
        let op_v = mm.to_operator(&v).unwrap();
        let oracle = op_u.adjoint().mul(&op_v);
        let got = u.inner(&v).unwrap();
        assert!(got.block(0).sub(&oracle).max_norm() < 1e-13);
        // round trip through the dictionary preserves the element
        let back = mm.from_operator(&op_u).unwrap();
        assert!(back.sub(&u).unwrap().is_null(&cfg()).unwrap());
        // detection recognizes the presentation
        let detected = MatrixModule::detect(mm.module(), &cfg()).unwrap();
        assert_eq!((detected.rows(), detected.cols()), (2, 3));
        assert!(MatrixModule::detect(
            &PresentedModule::free(&AlgebraSpec::new(vec![2]).unwrap(), 2),
            &cfg()
        )
        .is_none());
    }

    #[test]
    fn identity_correspondence_laws_hold() {
        let spec = AlgebraSpec::new(vec![2, 1]).unwrap();
        let corr = Correspondence::identity(&spec, &cfg()).unwrap();
        let report = corr.check_left_action(&cfg()).unwrap();
        assert!(report.passes(1e-12), "{report:?}");
    }

    #[test]
    fn trace_correspondence_laws_hold() {
        let corr = trace_correspondence();
        let report = corr.check_left_action(&cfg()).unwrap();
        assert!(report.passes(1e-12), "{report:?}");
    }

    #[test]
    fn broken_action_is_detected() {
        // scaling one action matrix breaks multiplicativity and unitality
        let corr = trace_correspondence();
        let mut action: Vec<Vec<AlgebraElement>> =
            (0..4).map(|g| corr.action_matrix(g).to_vec()).collect();
        for entry in &mut action[0] {
            *entry = entry.scale(c(2.0, 0.0));
        }
        let broken =
            Correspondence::new(corr.module().clone(), corr.left_algebra().clone(), action)
                .unwrap();
        let report = broken.check_left_action(&cfg()).unwrap();
        assert!(report.max_defect() > 0.5, "{report:?}");
    }

    #[test]
    fn worked_tensor_example_dimensions() {
        // E = row vectors C^{1x2} over M_2, F = M_2 with the scalar trace
        // pairing; E ⊙ F collapses from 4 generators to dimension 2.
        let corr = trace_correspondence();
        let e = matrix_module(1, 2, &cfg()).unwrap();
        assert_eq!(corr.module().dim(&cfg()).unwrap(), 4);
        let tensor = interior_tensor(e.module(), &corr, &cfg()).unwrap();
        assert_eq!(tensor.generators(), 4);
        assert_eq!(tensor.dim(&cfg()).unwrap(), 2);
    }

    #[test]
    fn tensor_inner_product_balances() {
        let corr = trace_correspondence();
        let e = matrix_module(1, 2, &cfg()).unwrap();
        let tensor = interior_tensor(e.module(), &corr, &cfg()).unwrap();
        for seed in 0..10 {
            let x = random_element_of(e.module(), 100 + seed);
            let y = random_element_of(corr.module(), 200 + seed);
            let xy = tensor_element(&x, &corr, &y, &tensor).unwrap();
            // <x ⊙ y, x ⊙ y> = <y, <x,x> y>
            let lhs = xy.inner(&xy).unwrap();
            let rhs = y
                .inner(&corr.left_act(&x.inner(&x).unwrap(), &y).unwrap())
                .unwrap();
            assert!(lhs.sub(&rhs).unwrap().max_norm() < 1e-12, "seed {seed}");
        }
    }

    #[test]
    fn tensor_is_balanced_over_the_middle_algebra() {
        let corr = trace_correspondence();
        let e = matrix_module(1, 2, &cfg()).unwrap();
        let tensor = interior_tensor(e.module(), &corr, &cfg()).unwrap();
        for seed in 0..10 {
            let x = random_element_of(e.module(), 300 + seed);
            let y = random_element_of(corr.module(), 400 + seed);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(500 + seed);
            let coords: Vec<Complex64> = (0..4)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let b = AlgebraElement::from_coords(e.module().algebra(), &coords).unwrap();
            let lhs = tensor_element(&x.right_mul(&b).unwrap(), &corr, &y, &tensor).unwrap();
            let rhs = tensor_element(&x, &corr, &corr.left_act(&b, &y).unwrap(), &tensor).unwrap();
            assert!(
                lhs.sub(&rhs).unwrap().trace_norm().unwrap() < 1e-10,
                "seed {seed}"
            );
        }
    }

    #[test]
    fn tensor_dimension_never_exceeds_product() {
        let corr = trace_correspondence();
        let e = matrix_module(2, 2, &cfg()).unwrap();
        let tensor = interior_tensor(e.module(), &corr, &cfg()).unwrap();
        let de = e.module().dim(&cfg()).unwrap();
        let df = corr.module().dim(&cfg()).unwrap();
        assert!(tensor.dim(&cfg()).unwrap() <= de * df);
    }

    #[test]
    fn tensor_of_correspondences_is_associative_in_dimension() {
        let cfg = cfg();
        let m2 = AlgebraSpec::new(vec![2]).unwrap();
        let e = matrix_module(2, 2, &cfg).unwrap();
        let idc = Correspondence::identity(&m2, &cfg).unwrap();
        let tr = trace_correspondence();
        // (E ⊙ id) ⊙ tr vs E ⊙ (id ⊙ tr)
        let left =
            interior_tensor(&interior_tensor(e.module(), &idc, &cfg).unwrap(), &tr, &cfg).unwrap();
        let right = interior_tensor(
            e.module(),
            &tensor_correspondence(&idc, &tr, &cfg).unwrap(),
            &cfg,
        )
        .unwrap();
        assert_eq!(left.dim(&cfg).unwrap(), right.dim(&cfg).unwrap());
    }

    #[test]
    fn column_correspondence_acts_like_matrices() {
        let cfgv = cfg();
        let corr = column_correspondence(3, &cfgv).unwrap();
        assert!(corr.check_left_action(&cfgv).unwrap().passes(1e-12));
        let m3 = AlgebraSpec::new(vec![3]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let coords: Vec<Complex64> = (0..9)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let b = AlgebraElement::from_coords(&m3, &coords).unwrap();
        let h = random_element_of(corr.module(), 10);
        let acted = corr.left_act(&b, &h).unwrap();
        // compare with the concrete matrix-vector product
        let vec_h: Vec<Complex64> = h.flat_coords();
        for (j, out) in acted.flat_coords().iter().enumerate() {
            let want: Complex64 = (0..3).map(|q| b.block(0)[(j, q)] * vec_h[q]).sum();
            assert!((out - want).norm() < 1e-13);
        }
    }

    #[test]
    fn embed_free_preserves_inner_products() {
        let corr = trace_correspondence();
        let e = matrix_module(2, 2, &cfg()).unwrap();
        let tensor = interior_tensor(e.module(), &corr, &cfg()).unwrap();
        let emb = embed_free(&tensor, &cfg()).unwrap();
        for seed in 0..5 {
            let x = random_element_of(&tensor, 600 + seed);
            let y = random_element_of(&tensor, 700 + seed);
            let lhs = emb
                .apply(&x)
                .unwrap()
                .inner(&emb.apply(&y).unwrap())
                .unwrap();
            let rhs = x.inner(&y).unwrap();
            assert!(lhs.sub(&rhs).unwrap().max_norm() < 1e-10, "seed {seed}");
        }
    }

    #[test]
    fn orthonormal_basis_factors_the_scalar_gram() {
        let m2 = AlgebraSpec::new(vec![2]).unwrap();
        let e11 = canonical_basis(&m2)[0].clone();
        let module = PresentedModule::new(&m2, 1, vec![e11], &cfg()).unwrap();
        let ob = module.orthonormal_basis(&cfg()).unwrap();
        assert_eq!(ob.rank, module.dim(&cfg()).unwrap());
        let s = module.scalar_gram();
        let rebuilt = ob.map.adjoint().mul(&ob.map);
        assert!(rebuilt.sub(&s).max_norm() < 1e-12);
        let id = ob.map.mul(&ob.pinv);
        assert!(id.sub(&ComplexMatrix::identity(ob.rank)).max_norm() < 1e-12);
    }

    #[test]
    fn pairwise_gram_matches_direct_inner_products() {
        let corr = trace_correspondence();
        let e = matrix_module(2, 2, &cfg()).unwrap();
        let tensor = interior_tensor(e.module(), &corr, &cfg()).unwrap();
        let elems: Vec<ModuleElement> = (0..3)
            .map(|s| random_element_of(&tensor, 800 + s))
            .collect();
        let blocks = pairwise_gram(&tensor, &elems).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let direct = elems[a].inner(&elems[b]).unwrap();
                for (t, &n) in tensor.algebra().block_dims().iter().enumerate() {
                    for p in 0..n {
                        for q in 0..n {
                            let got = blocks[t][(a * n + p, b * n + q)];
                            let want = direct.block(t)[(p, q)];
                            assert!((got - want).norm() < 1e-12);
                        }
                    }
                }
            }
        }
    }
}
