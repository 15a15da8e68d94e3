//! Factorization of phi-maps through the GNS correspondence.
//!
//! A phi-map is a complex-linear map `T` between Hilbert C*-modules `E`
//! (over `B`) and `F` (over `C`) satisfying
//! `<T x, T y> = phi(<x, y>)` for a completely positive `phi: B -> C`.
//! [`factorize`] produces the canonical factorization
//! `T = v ∘ (id ⊙ ζ)`, where `ζ` is the cyclic vector of the GNS
//! correspondence of `phi` and `v: E ⊙ F_phi -> F` is an isometric module
//! map; [`from_factorization`] runs the converse and recovers a phi-map
//! from such data. [`infer_phi`] reconstructs `phi` from `T` alone when
//! the inner products of the domain span enough of the coefficient
//! algebra.
//!
//! Defects at the module-element level are measured as trace-pairing mass
//! (`<d, d>` traced, i.e. a squared length): this is the same quantity
//! that defines null vectors, so a defect below `verify_tol` means the
//! elements are equal in the module.

use num_complex::Complex64;

use crate::algebra::{canonical_basis, AlgebraElement};
use crate::cpgns::{gns, is_cp, GnsData, LinearMap};
use crate::error::{Error, Result};
use crate::hilbmod::{
    interior_tensor, pairwise_gram, tensor_element, Correspondence, ModuleElement, PresentedModule,
};
use crate::numerics::{lstsq, rank_kernel, ComplexMatrix, NumericConfig};

/// A complex-linear map between presented modules, stored by its values on
/// the free coefficient basis `e_i b_α` of the domain (flat index
/// `i·dim(B) + α`).
///
/// The constructor certifies well-definedness: the map must send every
/// null vector of the domain presentation to a null vector, otherwise it
/// does not define a map on the module at all.
#[derive(Debug, Clone)]
pub struct ModuleMap {
    domain: PresentedModule,
    codomain: PresentedModule,
    values: Vec<ModuleElement>,
}

impl ModuleMap {
    pub fn new(
        domain: PresentedModule,
        codomain: PresentedModule,
        values: Vec<ModuleElement>,
        cfg: &NumericConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        if values.len() != domain.coeff_dim() {
            return Err(Error::InvalidInput(format!(
                "need one value per free basis element ({}), got {}",
                domain.coeff_dim(),
                values.len()
            )));
        }
        for (v, x) in values.iter().enumerate() {
            if !codomain.compatible_with(x.module()) {
                return Err(Error::InvalidInput(format!(
                    "value {v} lives outside the codomain module"
                )));
            }
        }
        let map = ModuleMap {
            domain,
            codomain,
            values,
        };
        let kernel = rank_kernel(&map.domain.scalar_gram(), cfg)?.kernel;
        for col in 0..kernel.cols() {
            let image = map.apply_flat(&kernel.column(col))?;
            let mass = image.self_overlap()?;
            if mass > cfg.verify_tol {
                return Err(Error::WellDefinednessFailure(format!(
                    "a null vector of the domain maps to mass {mass:.3e}"
                )));
            }
        }
        Ok(map)
    }

    pub fn domain(&self) -> &PresentedModule {
        &self.domain
    }

    pub fn codomain(&self) -> &PresentedModule {
        &self.codomain
    }

    pub fn values(&self) -> &[ModuleElement] {
        &self.values
    }

    /// Value on the free basis element `e_i b_alpha`.
    pub fn value(&self, i: usize, alpha: usize) -> &ModuleElement {
        &self.values[i * self.domain.algebra().dim() + alpha]
    }

    fn apply_flat(&self, flat: &[Complex64]) -> Result<ModuleElement> {
        let mut acc = self.codomain.zero_element();
        for (z, value) in flat.iter().zip(&self.values) {
            if *z != Complex64::new(0.0, 0.0) {
                acc = acc.add(&value.scale(*z))?;
            }
        }
        Ok(acc)
    }

    pub fn apply(&self, x: &ModuleElement) -> Result<ModuleElement> {
        if !self.domain.compatible_with(x.module()) {
            return Err(Error::InvalidInput(
                "argument lives outside the domain module".to_string(),
            ));
        }
        self.apply_flat(&x.flat_coords())
    }
}

/// `<e_i b_α, e_j b_γ> = b_α* G_ij b_γ` for a presented module, by entry
/// extraction: for `b_α = E^{(t)}_{pq}` and `b_γ = E^{(t)}_{rs}` this is
/// `G_ij.block(t)[p,r] · E^{(t)}_{qs}` (zero across different blocks).
pub(crate) fn free_basis_inner(
    module: &PresentedModule,
    v: usize,
    w: usize,
) -> Result<AlgebraElement> {
    let spec = module.algebra();
    let n = spec.dim();
    let (i, alpha) = (v / n, v % n);
    let (j, gamma) = (w / n, w % n);
    let (t, p, q) = spec.basis_position(alpha);
    let (u, r, s) = spec.basis_position(gamma);
    let mut coords = vec![Complex64::new(0.0, 0.0); n];
    if t == u {
        coords[spec.basis_index(t, q, s)] = module.gram(i, j).block(t)[(p, r)];
    }
    AlgebraElement::from_coords(spec, &coords)
}

/// Max-norm comparison of the full pairwise Gram of the map's values
/// against a caller-supplied target for each free basis pair.
fn gram_comparison_defect(
    map: &ModuleMap,
    mut target: impl FnMut(usize, usize) -> Result<AlgebraElement>,
) -> Result<f64> {
    let blocks = pairwise_gram(&map.codomain, &map.values)?;
    let spec = map.codomain.algebra().clone();
    let count = map.values.len();
    let mut defect = 0.0_f64;
    for v in 0..count {
        for w in 0..count {
            let want = target(v, w)?;
            let mut pair = 0.0_f64;
            for (t, &n) in spec.block_dims().iter().enumerate() {
                for p in 0..n {
                    for q in 0..n {
                        let got = blocks[t][(v * n + p, w * n + q)];
                        pair = pair.max((got - want.block(t)[(p, q)]).norm());
                    }
                }
            }
            defect = defect.max(pair);
        }
    }
    Ok(defect)
}

/// The phi-map defect of `t` against `phi`: the largest entry of
/// `<T x, T y> - phi(<x, y>)` over all free basis pairs of the domain.
/// Zero exactly when `t` is a phi-map for `phi`.
pub fn phi_map_defect(t: &ModuleMap, phi: &LinearMap, cfg: &NumericConfig) -> Result<f64> {
    cfg.validate()?;
    if t.domain().algebra() != phi.domain() {
        return Err(Error::InvalidInput(
            "map domain and phi domain algebras differ".to_string(),
        ));
    }
    if t.codomain().algebra() != phi.codomain() {
        return Err(Error::InvalidInput(
            "map codomain and phi codomain algebras differ".to_string(),
        ));
    }
    gram_comparison_defect(t, |v, w| phi.apply(&free_basis_inner(t.domain(), v, w)?))
}

/// Whether `t` is a phi-map for `phi` at the working tolerance.
pub fn is_phi_map(t: &ModuleMap, phi: &LinearMap, cfg: &NumericConfig) -> Result<bool> {
    Ok(phi_map_defect(t, phi, cfg)? <= cfg.verify_tol)
}

/// The isometry defect of a module map: the largest entry of
/// `<V x, V y> - <x, y>` over all free basis pairs of the domain.
pub fn isometry_defect(v: &ModuleMap, cfg: &NumericConfig) -> Result<f64> {
    cfg.validate()?;
    if v.domain().algebra() != v.codomain().algebra() {
        return Err(Error::InvalidInput(
            "an isometry needs domain and codomain over the same algebra".to_string(),
        ));
    }
    gram_comparison_defect(v, |a, b| free_basis_inner(v.domain(), a, b))
}

/// Recovers the unique linear map `phi` with
/// `<T x, T y> = phi(<x, y>)` from `t` alone, by least squares over all
/// free basis pairs. Errors with [`Error::NotFull`] when the domain inner
/// products do not span the whole coefficient algebra (no unique `phi`),
/// and with [`Error::Inconsistent`] when no linear map fits, i.e. `t` is
/// not a phi-map for any `phi`. Returns the map and the fit residual.
pub fn infer_phi(t: &ModuleMap, cfg: &NumericConfig) -> Result<(LinearMap, f64)> {
    cfg.validate()?;
    let nb = t.domain().algebra().dim();
    let nc = t.codomain().algebra().dim();
    let count = t.values().len();
    let blocks = pairwise_gram(t.codomain(), t.values())?;
    let spec_c = t.codomain().algebra().clone();
    let mut u_rows: Vec<Vec<Complex64>> = Vec::with_capacity(count * count);
    let mut w_rows: Vec<Vec<Complex64>> = Vec::with_capacity(count * count);
    for v in 0..count {
        for w in 0..count {
            u_rows.push(free_basis_inner(t.domain(), v, w)?.coords());
            let mut pair_blocks = Vec::with_capacity(spec_c.num_blocks());
            for (tb, &n) in spec_c.block_dims().iter().enumerate() {
                pair_blocks.push(ComplexMatrix::from_fn(n, n, |p, q| {
                    blocks[tb][(v * n + p, w * n + q)]
                }));
            }
            w_rows.push(AlgebraElement::from_blocks(&spec_c, pair_blocks)?.coords());
        }
    }
    let u = ComplexMatrix::from_rows(u_rows)?;
    let w = ComplexMatrix::from_rows(w_rows)?;
    let gram_u = u.adjoint().mul(&u);
    if rank_kernel(&gram_u, cfg)?.rank < nb {
        return Err(Error::NotFull(format!(
            "domain inner products span {} of {} basis directions",
            rank_kernel(&gram_u, cfg)?.rank,
            nb
        )));
    }
    let (x, residual) = lstsq(&u, &w, cfg)?;
    let scale = 1.0 + w.max_norm();
    if residual > cfg.verify_tol * scale {
        return Err(Error::Inconsistent(format!(
            "no linear map matches the inner products (residual {residual:.3e})"
        )));
    }
    let mut values = Vec::with_capacity(nb);
    for beta in 0..nb {
        let coords: Vec<Complex64> = (0..nc).map(|c| x[(beta, c)]).collect();
        values.push(AlgebraElement::from_coords(&spec_c, &coords)?);
    }
    Ok((
        LinearMap::new(t.domain().algebra().clone(), spec_c, values)?,
        residual,
    ))
}

/// The canonical factorization `T = v ∘ (id ⊙ ζ)` of a phi-map.
#[derive(Debug, Clone)]
pub struct Factorization {
    /// GNS correspondence of `phi` with its cyclic vector.
    pub gns: GnsData,
    /// The interior tensor product `E ⊙ F_phi`.
    pub tensor: PresentedModule,
    /// The isometric module map `v: E ⊙ F_phi -> F` with
    /// `v(x ⊙ [b]) = T(x b)`.
    pub v: ModuleMap,
    /// Isometry defect of `v` (max entry norm over free basis pairs).
    pub isometry_defect: f64,
    /// Largest trace-pairing mass of `T(x) - v(x ⊙ ζ)` over the free
    /// basis of the domain.
    pub reconstruction_defect: f64,
}

/// Factorizes a phi-map through the GNS correspondence of `phi`.
///
/// Preconditions are certified up front: `phi` must be completely
/// positive ([`Error::NotCp`]) and `t` must be a phi-map for `phi`
/// ([`Error::NotPhiMap`]). The returned defects are reported, not
/// enforced; for inputs that pass the preconditions they sit at the
/// numerical noise floor.
pub fn factorize(t: &ModuleMap, phi: &LinearMap, cfg: &NumericConfig) -> Result<Factorization> {
    let defect = phi_map_defect(t, phi, cfg)?;
    if !is_cp(phi, cfg)? {
        return Err(Error::NotCp("phi is not completely positive".to_string()));
    }
    if defect > cfg.verify_tol {
        return Err(Error::NotPhiMap(format!(
            "inner product compatibility fails (defect {defect:.3e})"
        )));
    }
    let g = gns(phi, cfg)?;
    let tensor = interior_tensor(t.domain(), &g.corr, cfg)?;
    let nb = phi.domain().dim();
    let nc = phi.codomain().dim();
    let ke = t.domain().generators();
    let basis_c = canonical_basis(phi.codomain());
    // v on the free basis of E ⊙ F_phi: generator (i, α) carries the
    // class of T(e_i b_α), and right coefficients pass through
    let mut v_values = Vec::with_capacity(ke * nb * nc);
    for i in 0..ke {
        for alpha in 0..nb {
            for c in &basis_c {
                v_values.push(t.value(i, alpha).right_mul(c)?);
            }
        }
    }
    let v = ModuleMap::new(tensor.clone(), t.codomain().clone(), v_values, cfg)?;
    let iso = isometry_defect(&v, cfg)?;
    let mut reconstruction = 0.0_f64;
    for i in 0..ke {
        for alpha in 0..nb {
            let x = t.domain().basis_element(i, alpha);
            let xz = tensor_element(&x, &g.corr, &g.zeta, &tensor)?;
            let diff = t.value(i, alpha).sub(&v.apply(&xz)?)?;
            reconstruction = reconstruction.max(diff.self_overlap()?);
        }
    }
    Ok(Factorization {
        gns: g,
        tensor,
        v,
        isometry_defect: iso,
        reconstruction_defect: reconstruction,
    })
}

/// The converse direction: given a correspondence `F` from `B` to `C`
/// with a vector `ζ` and an isometric module map `v: E ⊙ F -> F'`,
/// produces the phi-map `T(x) = v(x ⊙ ζ)` and the completely positive
/// map `phi(b) = <ζ, b ζ>` it is compatible with.
///
/// The correspondence laws of `f` are re-checked
/// ([`Error::InvalidInput`]), `v` must be defined on `E ⊙ F`
/// ([`Error::InvalidInput`]) and isometric ([`Error::NotIsometry`]).
pub fn from_factorization(
    e: &PresentedModule,
    f: &Correspondence,
    zeta: &ModuleElement,
    v: &ModuleMap,
    cfg: &NumericConfig,
) -> Result<(ModuleMap, LinearMap)> {
    cfg.validate()?;
    if e.algebra() != f.left_algebra() {
        return Err(Error::InvalidInput(
            "module and correspondence do not compose".to_string(),
        ));
    }
    if !f.module().compatible_with(zeta.module()) {
        return Err(Error::InvalidInput(
            "zeta does not live in the correspondence".to_string(),
        ));
    }
    let laws = f.check_left_action(cfg)?;
    if !laws.passes(cfg.verify_tol) {
        return Err(Error::InvalidInput(format!(
            "left action laws fail (defect {:.3e})",
            laws.max_defect()
        )));
    }
    let tensor = interior_tensor(e, f, cfg)?;
    if !v.domain().compatible_with(&tensor) || v.domain().gram_distance(&tensor)? > cfg.verify_tol {
        return Err(Error::InvalidInput(
            "v is not defined on the tensor product of e and f".to_string(),
        ));
    }
    let iso = isometry_defect(v, cfg)?;
    if iso > cfg.verify_tol {
        return Err(Error::NotIsometry(format!(
            "v distorts inner products (defect {iso:.3e})"
        )));
    }
    let nb = e.algebra().dim();
    let mut t_values = Vec::with_capacity(e.generators() * nb);
    for i in 0..e.generators() {
        for alpha in 0..nb {
            let x = e.basis_element(i, alpha);
            let xz = tensor_element(&x, f, zeta, &tensor)?;
            t_values.push(v.apply(&xz)?);
        }
    }
    let t = ModuleMap::new(e.clone(), v.codomain().clone(), t_values, cfg)?;
    let phi = LinearMap::from_action(e.algebra().clone(), f.module().algebra().clone(), |b| {
        zeta.inner(&f.left_act(b, zeta)?)
    })?;
    Ok((t, phi))
}
