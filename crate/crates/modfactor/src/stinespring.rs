//! Concrete Stinespring-type dilation data extracted from a factorization.
//!
//! When the codomain algebra is a single matrix block `M_{d1} = B(H1)` and
//! the codomain module is presented as the `d2 x d1` matrices (an operator
//! space `B(H1, H2)`), the abstract factorization `T = v ∘ (id ⊙ ζ)`
//! turns into operator data on honest Hilbert spaces:
//!
//! * `K1 = F_phi ⊙ H1` carries a representation `ρ` of the domain algebra
//!   and the operator `V: H1 -> K1`, `V h = ζ ⊗ h`, giving
//!   `phi(b) = V* ρ(b) V`;
//! * `K2 = E ⊙ K1` carries the map `Ψ: E -> B(K1, K2)`,
//!   `Ψ(x) ξ = x ⊙ ξ`, with `Ψ(x)* Ψ(y) = ρ(<x, y>)`;
//! * `W*: K2 -> H2`, `W*(u ⊙ h) = v(u) h`, is an isometry with
//!   `T(x) = W* Ψ(x) V` as operators `H1 -> H2`.
//!
//! All five identities are certified numerically, and
//! [`cyclicity_check`] reports whether the dilation is minimal: `V H1`
//! cyclic for `ρ` in `K1`, and `Ψ(E) K1` total in `K2`.

use crate::algebra::{canonical_basis, AlgebraElement};
use crate::cpgns::LinearMap;
use crate::error::{Error, Result};
use crate::factor::{factorize, free_basis_inner, Factorization, ModuleMap};
use crate::hilbmod::{
    column_correspondence, interior_tensor, tensor_correspondence, Correspondence, MatrixModule,
    OrthonormalBasis, PresentedModule,
};
use crate::numerics::{span_rank, ComplexMatrix, NumericConfig};

/// Defects of the five dilation identities, all max-norm over the
/// relevant index set.
#[derive(Debug, Clone, Copy)]
pub struct StinespringDefects {
    /// `max_p | op(T_p) - W* Ψ_p V |` over the free basis of the domain.
    pub representation: f64,
    /// `| (W*)† W* - I |` on the orthonormal coordinates of `K2`.
    pub coisometry: f64,
    /// `| V† V - rep(phi(1)) |`; zero means `V` witnesses the total mass
    /// of `phi`, and `V` is an isometry exactly when `phi` is unital.
    pub v_gram: f64,
    /// Unital, multiplicative and star laws of `ρ` on basis pairs.
    pub rho_homomorphism: f64,
    /// `max_{p,q} | Ψ_p† Ψ_q - ρ(<x_p, x_q>) |` over free basis pairs.
    pub psi_compatibility: f64,
}

impl StinespringDefects {
    pub fn max_defect(&self) -> f64 {
        self.representation
            .max(self.coisometry)
            .max(self.v_gram)
            .max(self.rho_homomorphism)
            .max(self.psi_compatibility)
    }
}

/// The dilation spaces and operators, expressed in orthonormal
/// coordinates of `K1` and `K2`.
#[derive(Debug, Clone)]
pub struct StinespringData {
    pub d1: usize,
    pub d2: usize,
    /// The factorization this was extracted from.
    pub factorization: Factorization,
    /// `K1 = F_phi ⊙ H1` as a correspondence from the domain algebra to
    /// the scalars.
    pub k1: Correspondence,
    /// `K2 = E ⊙ K1` as a Hilbert space presented over the scalars.
    pub k2: PresentedModule,
    /// Orthonormal coordinates for `K1` and `K2`.
    pub p1: OrthonormalBasis,
    pub p2: OrthonormalBasis,
    /// `ρ(b_γ)` per canonical basis element of the domain algebra,
    /// `rank(K1) x rank(K1)`.
    pub rho: Vec<ComplexMatrix>,
    /// `V: H1 -> K1`, `rank(K1) x d1`.
    pub v: ComplexMatrix,
    /// `Ψ_p: K1 -> K2` per free basis element of the domain module,
    /// `rank(K2) x rank(K1)`.
    pub psi: Vec<ComplexMatrix>,
    /// `W*: K2 -> H2`, `d2 x rank(K2)`.
    pub wstar: ComplexMatrix,
    pub defects: StinespringDefects,
}

/// The left action of `b` on a correspondence over the scalars, as a
/// plain matrix on coefficient coordinates.
fn scalar_action_matrix(corr: &Correspondence, b: &AlgebraElement) -> Result<ComplexMatrix> {
    let k = corr.module().generators();
    let act = corr.left_action_of(b)?;
    Ok(ComplexMatrix::from_fn(k, k, |m, j| {
        act[m * k + j].block(0)[(0, 0)]
    }))
}

/// Extracts Stinespring-type dilation data from a phi-map whose codomain
/// is an operator space: the coefficient algebra must be a single matrix
/// block and the codomain module must be presented as `d2 x d1` matrices
/// (both checked, [`Error::WrongShape`] otherwise). The factorization
/// preconditions of [`factorize`] apply unchanged.
pub fn stinespring(t: &ModuleMap, phi: &LinearMap, cfg: &NumericConfig) -> Result<StinespringData> {
    cfg.validate()?;
    if phi.codomain().num_blocks() != 1 {
        return Err(Error::WrongShape(format!(
            "dilation needs a full matrix algebra codomain, got {} blocks",
            phi.codomain().num_blocks()
        )));
    }
    let d1 = phi.codomain().block_dims()[0];
    let mm = MatrixModule::detect(t.codomain(), cfg).ok_or_else(|| {
        Error::WrongShape(
            "codomain module is not presented as d2 x d1 matrices over M_d1".to_string(),
        )
    })?;
    let d2 = mm.rows();
    let factorization = factorize(t, phi, cfg)?;
    let h1 = column_correspondence(d1, cfg)?;
    let k1 = tensor_correspondence(&factorization.gns.corr, &h1, cfg)?;
    let k2 = interior_tensor(t.domain(), &k1, cfg)?;
    let p1 = k1.module().orthonormal_basis(cfg)?;
    let p2 = k2.orthonormal_basis(cfg)?;
    let k1g = k1.module().generators();
    let ke = t.domain().generators();
    let nb = phi.domain().dim();

    let rho_of = |b: &AlgebraElement| -> Result<ComplexMatrix> {
        Ok(p1.map.mul(&scalar_action_matrix(&k1, b)?).mul(&p1.pinv))
    };
    let basis_b = canonical_basis(phi.domain());
    let rho = basis_b.iter().map(&rho_of).collect::<Result<Vec<_>>>()?;

    // V h = ζ ⊗ h: coefficient (α, p) of ζ ⊗ e_q is ζ_α[p, q]
    let zeta = &factorization.gns.zeta;
    let v_coeff = ComplexMatrix::from_fn(k1g, d1, |row, q| {
        zeta.coeff(row / d1).block(0)[(row % d1, q)]
    });
    let v = p1.map.mul(&v_coeff);

    // Ψ_(i,α) ξ = (e_i b_α) ⊙ ξ: the action matrix of b_α on K1 sits in
    // row block i
    let mut psi = Vec::with_capacity(ke * nb);
    for i in 0..ke {
        for b in &basis_b {
            let a1 = scalar_action_matrix(&k1, b)?;
            let mut psi_coeff = ComplexMatrix::zeros(ke * k1g, k1g);
            for m in 0..k1g {
                for j in 0..k1g {
                    psi_coeff[(i * k1g + m, j)] = a1[(m, j)];
                }
            }
            psi.push(p2.map.mul(&psi_coeff).mul(&p1.pinv));
        }
    }

    // W*(u ⊙ h) = v(u) h on the generators of K2 = E ⊙ K1: generator
    // (i, (α, p)) maps to column p of the operator of v(e_i ⊗ f_α)
    let tensor = &factorization.tensor;
    let mut wstar_coeff = ComplexMatrix::zeros(d2, ke * k1g);
    for i in 0..ke {
        for alpha in 0..nb {
            let mut coeffs = vec![AlgebraElement::zero(tensor.algebra()); tensor.generators()];
            coeffs[i * nb + alpha] = AlgebraElement::unit(tensor.algebra());
            let generator = tensor.element(coeffs)?;
            let image = mm.to_operator(&factorization.v.apply(&generator)?)?;
            for p in 0..d1 {
                for row in 0..d2 {
                    wstar_coeff[(row, i * k1g + alpha * d1 + p)] = image[(row, p)];
                }
            }
        }
    }
    let wstar = wstar_coeff.mul(&p2.pinv);

    // defect 1: T(x) = W* Ψ(x) V on the free basis of the domain
    let mut representation = 0.0_f64;
    for i in 0..ke {
        for alpha in 0..nb {
            let target = mm.to_operator(t.value(i, alpha))?;
            let got = wstar.mul(&psi[i * nb + alpha]).mul(&v);
            representation = representation.max(got.sub(&target).max_norm());
        }
    }
    // defect 2: W* is an isometry of K2 into H2
    let coisometry = wstar
        .adjoint()
        .mul(&wstar)
        .sub(&ComplexMatrix::identity(p2.rank))
        .max_norm();
    // defect 3: V†V = rep(phi(1))
    let unit_b = AlgebraElement::unit(phi.domain());
    let v_gram = v
        .adjoint()
        .mul(&v)
        .sub(&phi.apply(&unit_b)?.to_matrix())
        .max_norm();
    // defect 4: ρ is a unital *-homomorphism
    let mut rho_homomorphism = rho_of(&unit_b)?
        .sub(&ComplexMatrix::identity(p1.rank))
        .max_norm();
    for (g, bg) in basis_b.iter().enumerate() {
        let star = rho_of(&bg.adjoint())?.sub(&rho[g].adjoint()).max_norm();
        rho_homomorphism = rho_homomorphism.max(star);
        for (d, bd) in basis_b.iter().enumerate() {
            let prod = rho_of(&bg.mul(bd)?)?;
            let defect = prod.sub(&rho[g].mul(&rho[d])).max_norm();
            rho_homomorphism = rho_homomorphism.max(defect);
        }
    }
    // defect 5: Ψ_p† Ψ_q = ρ(<x_p, x_q>)
    let mut psi_compatibility = 0.0_f64;
    for p in 0..ke * nb {
        for q in 0..ke * nb {
            let want = rho_of(&free_basis_inner(t.domain(), p, q)?)?;
            let got = psi[p].adjoint().mul(&psi[q]);
            psi_compatibility = psi_compatibility.max(got.sub(&want).max_norm());
        }
    }

    Ok(StinespringData {
        d1,
        d2,
        factorization,
        k1,
        k2,
        p1,
        p2,
        rho,
        v,
        psi,
        wstar,
        defects: StinespringDefects {
            representation,
            coisometry,
            v_gram,
            rho_homomorphism,
            psi_compatibility,
        },
    })
}

/// Minimality diagnostics for a dilation.
#[derive(Debug, Clone, Copy)]
pub struct CyclicityReport {
    /// Dimension of `K1` and of the span of `{ρ(b_γ) V e_h}`.
    pub k1_dim: usize,
    pub k1_span: usize,
    /// `V H1` is cyclic for `ρ`.
    pub cyclic: bool,
    /// Dimension of `K2` and of the span of `{Ψ_p ξ}` over basis vectors.
    pub k2_dim: usize,
    pub k2_span: usize,
    /// `Ψ(E) K1` is total in `K2`.
    pub nondegenerate: bool,
}

/// Checks both minimality properties of the dilation by comparing span
/// ranks against the space dimensions.
pub fn cyclicity_check(data: &StinespringData, cfg: &NumericConfig) -> Result<CyclicityReport> {
    let k1_dim = data.p1.rank;
    let mut family1 = Vec::new();
    for r in &data.rho {
        let rv = r.mul(&data.v);
        for h in 0..data.d1 {
            family1.push(rv.column(h));
        }
    }
    let k1_span = span_rank(&family1, cfg)?;
    let k2_dim = data.p2.rank;
    let mut family2 = Vec::new();
    for psi_p in &data.psi {
        for j in 0..psi_p.cols() {
            family2.push(psi_p.column(j));
        }
    }
    let k2_span = span_rank(&family2, cfg)?;
    Ok(CyclicityReport {
        k1_dim,
        k1_span,
        cyclic: k1_span == k1_dim,
        k2_dim,
        k2_span,
        nondegenerate: k2_span == k2_dim,
    })
}
