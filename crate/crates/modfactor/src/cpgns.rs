//! Linear maps between algebras, complete-positivity certificates, and the
//! GNS correspondence of a completely positive map.
//!
//! Two independent certificates of complete positivity live here:
//!
//! * the block [`choi`] matrices, whose joint positivity is checked by
//!   [`is_cp`] and which yield a Kraus decomposition
//!   ([`kraus_reconstruction`], [`kraus_oracle`]);
//! * the [`gns`] construction, which feeds the algebra-valued Gram
//!   `[phi(b_α* b_β)]` straight into the module layer's positivity gate.
//!
//! `gns` never calls `is_cp`; the routes are kept separate so they can be
//! played against each other as oracles.

use num_complex::Complex64;

use crate::algebra::{
    canonical_basis, conditional_expectation, structure_constants, AlgebraElement, AlgebraSpec,
};
use crate::error::{Error, Result};
use crate::hilbmod::{span_dimension, Correspondence, ModuleElement, PresentedModule};
use crate::numerics::{herm_eig, psd_check, ComplexMatrix, NumericConfig};

/// A linear map between two block matrix algebras, stored by its values on
/// the canonical matrix-unit basis of the domain.
#[derive(Debug, Clone)]
pub struct LinearMap {
    domain: AlgebraSpec,
    codomain: AlgebraSpec,
    values: Vec<AlgebraElement>,
}

impl LinearMap {
    pub fn new(
        domain: AlgebraSpec,
        codomain: AlgebraSpec,
        values: Vec<AlgebraElement>,
    ) -> Result<Self> {
        if values.len() != domain.dim() {
            return Err(Error::InvalidInput(format!(
                "need one value per basis element ({}), got {}",
                domain.dim(),
                values.len()
            )));
        }
        for (gamma, v) in values.iter().enumerate() {
            if v.spec() != &codomain {
                return Err(Error::InvalidInput(format!(
                    "value {gamma} lives outside the codomain"
                )));
            }
        }
        Ok(LinearMap {
            domain,
            codomain,
            values,
        })
    }

    /// Builds the map by evaluating `f` on the canonical basis.
    pub fn from_action(
        domain: AlgebraSpec,
        codomain: AlgebraSpec,
        mut f: impl FnMut(&AlgebraElement) -> Result<AlgebraElement>,
    ) -> Result<Self> {
        let values = canonical_basis(&domain)
            .iter()
            .map(&mut f)
            .collect::<Result<Vec<_>>>()?;
        LinearMap::new(domain, codomain, values)
    }

    pub fn identity(spec: &AlgebraSpec) -> Self {
        LinearMap {
            domain: spec.clone(),
            codomain: spec.clone(),
            values: canonical_basis(spec),
        }
    }

    pub fn domain(&self) -> &AlgebraSpec {
        &self.domain
    }

    pub fn codomain(&self) -> &AlgebraSpec {
        &self.codomain
    }

    pub fn value(&self, gamma: usize) -> &AlgebraElement {
        &self.values[gamma]
    }

    pub fn values(&self) -> &[AlgebraElement] {
        &self.values
    }

    pub fn apply(&self, b: &AlgebraElement) -> Result<AlgebraElement> {
        if b.spec() != &self.domain {
            return Err(Error::InvalidInput(
                "argument lives outside the domain".to_string(),
            ));
        }
        let mut acc = AlgebraElement::zero(&self.codomain);
        for (gamma, z) in b.coords().into_iter().enumerate() {
            if z != Complex64::new(0.0, 0.0) {
                acc = acc.add(&self.values[gamma].scale(z))?;
            }
        }
        Ok(acc)
    }

    pub fn scale(&self, z: Complex64) -> Self {
        LinearMap {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            values: self.values.iter().map(|v| v.scale(z)).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.domain != rhs.domain || self.codomain != rhs.codomain {
            return Err(Error::InvalidInput(
                "maps have different domains or codomains".to_string(),
            ));
        }
        let values = self
            .values
            .iter()
            .zip(&rhs.values)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        LinearMap::new(self.domain.clone(), self.codomain.clone(), values)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Largest entry of any value, a crude scale for relative defects.
    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|v| v.max_norm()).fold(0.0, f64::max)
    }
}

/// Block Choi matrices: for each domain block `i` of size `n_i`, the
/// `(n_i·D) x (n_i·D)` matrix with sub-block `(j,k)` equal to the
/// represented value on the matrix unit `E^{(i)}_{jk}`, where `D` is the
/// represented dimension of the codomain. The map is completely positive
/// exactly when every block is PSD.
pub fn choi(map: &LinearMap) -> Vec<ComplexMatrix> {
    let d = map.codomain().rep_dim();
    map.domain()
        .block_dims()
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let reps: Vec<ComplexMatrix> = (0..n * n)
                .map(|jk| {
                    map.value(map.domain().basis_index(i, jk / n, jk % n))
                        .to_matrix()
                })
                .collect();
            ComplexMatrix::from_fn(n * d, n * d, |row, col| {
                let (j, p) = (row / d, row % d);
                let (k, q) = (col / d, col % d);
                reps[j * n + k][(p, q)]
            })
        })
        .collect()
}

/// Complete positivity via the Choi route: every block Choi matrix must be
/// Hermitian (the map is *-preserving) and positive semidefinite. Returns
/// `Ok(false)` for well-formed maps that fail, never an error.
pub fn is_cp(map: &LinearMap, cfg: &NumericConfig) -> Result<bool> {
    cfg.validate()?;
    for block in choi(map) {
        if block.hermitian_defect() > cfg.verify_tol * (1.0 + block.max_norm()) {
            return Ok(false);
        }
        if !psd_check(&block, cfg)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A Kraus decomposition `phi(b) = Σ_r A_r rep(b) A_r*` together with how
/// well it reconstructs the map it was extracted from.
#[derive(Debug, Clone)]
pub struct KrausDecomposition {
    /// Represented-space operators, each `D_codomain x D_domain`, supported
    /// on the columns of a single domain block.
    pub operators: Vec<ComplexMatrix>,
    /// `max_γ | rep(phi(b_γ)) - Σ_r A_r rep(b_γ) A_r* |`. Near zero only
    /// for completely positive maps: the decomposition keeps the positive
    /// part of the Choi spectrum, so dropped negative eigenvalues show up
    /// here at their own magnitude.
    pub reconstruction_defect: f64,
    /// Distance of the reconstruction from the represented codomain
    /// subalgebra (off-block-diagonal mass).
    pub algebra_defect: f64,
}

/// Extracts Kraus operators from the positive part of the Choi spectrum,
/// unconditionally. Eigenvectors `v` with eigenvalue `λ` above the rank
/// threshold reshape to `A[p, j] = sqrt(λ) · v[j·D + p]` on the columns of
/// their domain block. The defects measure, independently of [`is_cp`],
/// whether the map really was completely positive.
pub fn kraus_reconstruction(map: &LinearMap, cfg: &NumericConfig) -> Result<KrausDecomposition> {
    cfg.validate()?;
    let d_out = map.codomain().rep_dim();
    let d_in = map.domain().rep_dim();
    let mut operators = Vec::new();
    for (i, block) in choi(map).iter().enumerate() {
        let n = map.domain().block_dims()[i];
        let offset = map.domain().rep_offset(i);
        let (values, q) = herm_eig(block, cfg)?;
        let lambda_max = values.last().copied().unwrap_or(0.0);
        let threshold = cfg.rank_tol * lambda_max.max(1.0);
        for (r, &lambda) in values.iter().enumerate() {
            if lambda <= threshold {
                continue;
            }
            let root = lambda.sqrt();
            let mut a = ComplexMatrix::zeros(d_out, d_in);
            for j in 0..n {
                for p in 0..d_out {
                    a[(p, offset + j)] = q[(j * d_out + p, r)] * root;
                }
            }
            operators.push(a);
        }
    }
    let basis = canonical_basis(map.domain());
    let mut reconstruction_defect = 0.0_f64;
    let mut algebra_defect = 0.0_f64;
    for (gamma, b) in basis.iter().enumerate() {
        let rep_b = b.to_matrix();
        let mut rebuilt = ComplexMatrix::zeros(d_out, d_out);
        for a in &operators {
            rebuilt = rebuilt.add(&a.mul(&rep_b).mul(&a.adjoint()));
        }
        let compressed = conditional_expectation(&rebuilt, map.codomain())?;
        algebra_defect = algebra_defect.max(rebuilt.sub(&compressed.to_matrix()).max_norm());
        let target = map.value(gamma).to_matrix();
        reconstruction_defect = reconstruction_defect.max(rebuilt.sub(&target).max_norm());
    }
    Ok(KrausDecomposition {
        operators,
        reconstruction_defect,
        algebra_defect,
    })
}

/// Kraus decomposition guarded by [`is_cp`]: errors with [`Error::NotCp`]
/// instead of returning a lossy positive-part reconstruction.
pub fn kraus_oracle(map: &LinearMap, cfg: &NumericConfig) -> Result<KrausDecomposition> {
    if !is_cp(map, cfg)? {
        return Err(Error::NotCp(
            "Choi matrix has a negative eigenvalue or is not Hermitian".to_string(),
        ));
    }
    kraus_reconstruction(map, cfg)
}

/// The GNS correspondence of a completely positive map: the bimodule
/// `F_phi` with its cyclic vector.
#[derive(Debug, Clone)]
pub struct GnsData {
    /// The correspondence from the domain to the codomain: one generator
    /// per domain basis element, Gram `G_αβ = phi(b_α* b_β)`, left action
    /// through the structure constants of the domain.
    pub corr: Correspondence,
    /// The cyclic vector, the class of the domain unit; satisfies
    /// `<ζ, b·ζ> = phi(b)`.
    pub zeta: ModuleElement,
    /// The map the correspondence was built from.
    pub phi: LinearMap,
}

/// Builds the GNS correspondence of `phi`. Positivity of the Gram
/// `[phi(b_α* b_β)]` is exactly complete positivity of `phi`, so a
/// positivity failure in the module constructor surfaces as
/// [`Error::NotCp`]. This route never looks at the Choi matrices.
pub fn gns(map: &LinearMap, cfg: &NumericConfig) -> Result<GnsData> {
    cfg.validate()?;
    let basis = canonical_basis(map.domain());
    let nb = basis.len();
    let mut gram = Vec::with_capacity(nb * nb);
    for alpha in 0..nb {
        for beta in 0..nb {
            gram.push(map.apply(&basis[alpha].adjoint().mul(&basis[beta])?)?);
        }
    }
    let module = PresentedModule::new(map.codomain(), nb, gram, cfg).map_err(|e| match e {
        // shapes are correct by construction, so constructor complaints
        // mean the Gram is not Hermitian (phi not *-preserving) or not
        // positive: both are failures of complete positivity
        Error::NotPositive(msg) | Error::InvalidInput(msg) => {
            Error::NotCp(format!("GNS Gram rejected: {msg}"))
        }
        other => other,
    })?;
    let unit = AlgebraElement::unit(map.codomain());
    let mut action = Vec::with_capacity(nb);
    for b in &basis {
        let l = structure_constants(b);
        let mut mat = Vec::with_capacity(nb * nb);
        for m in 0..nb {
            for alpha in 0..nb {
                mat.push(unit.scale(l[(m, alpha)]));
            }
        }
        action.push(mat);
    }
    let corr = Correspondence::new(module.clone(), map.domain().clone(), action)?;
    let unit_coords = AlgebraElement::unit(map.domain()).coords();
    let zeta = module.element(
        unit_coords
            .into_iter()
            .map(|z| AlgebraElement::unit(map.codomain()).scale(z))
            .collect(),
    )?;
    Ok(GnsData {
        corr,
        zeta,
        phi: map.clone(),
    })
}

/// Whether the cyclic vector generates the GNS module: the span of
/// `{b_γ · ζ · c_β}` over both canonical bases must exhaust the module
/// dimension. True for every GNS correspondence; false detects modules
/// that merely embed one.
pub fn gns_minimality(data: &GnsData, cfg: &NumericConfig) -> Result<bool> {
    let module = data.corr.module();
    let mut family = Vec::new();
    for b in canonical_basis(data.corr.left_algebra()) {
        let acted = data.corr.left_act(&b, &data.zeta)?;
        for c in canonical_basis(module.algebra()) {
            family.push(acted.right_mul(&c)?);
        }
    }
    Ok(span_dimension(module, &family, cfg)? == module.dim(cfg)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> NumericConfig {
        NumericConfig::default()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// The unnormalized trace `M_2 -> C`.
    fn trace_map() -> LinearMap {
        let m2 = AlgebraSpec::new(vec![2]).unwrap();
        let sc = AlgebraSpec::scalars();
        LinearMap::from_action(m2, sc.clone(), |b| {
            Ok(AlgebraElement::scalar(&sc, b.trace()))
        })
        .unwrap()
    }

    /// The transpose `M_2 -> M_2`, the standard positive-but-not-CP map.
    fn transpose_map() -> LinearMap {
        let m2 = AlgebraSpec::new(vec![2]).unwrap();
        LinearMap::from_action(m2.clone(), m2.clone(), |b| {
            let blk = b.block(0);
            let t = ComplexMatrix::from_fn(2, 2, |r, s| blk[(s, r)]);
            AlgebraElement::from_blocks(&m2, vec![t])
        })
        .unwrap()
    }

    #[test]
    fn identity_map_is_cp_with_one_kraus_operator() {
        let m2 = AlgebraSpec::new(vec![2]).unwrap();
        let id = LinearMap::identity(&m2);
        assert!(is_cp(&id, &cfg()).unwrap());
        let kd = kraus_oracle(&id, &cfg()).unwrap();
        assert_eq!(kd.operators.len(), 1);
        assert!(kd.reconstruction_defect < 1e-12);
        assert!(kd.algebra_defect < 1e-12);
        // the single operator is unitary up to a phase
        let a = &kd.operators[0];
        let prod = a.mul(&a.adjoint());
        assert!(prod.sub(&ComplexMatrix::identity(2)).max_norm() < 1e-12);
    }

    #[test]
    fn depolarizing_map_has_full_kraus_rank() {
        let m2 = AlgebraSpec::new(vec![2]).unwrap();
        let half_trace = LinearMap::from_action(m2.clone(), m2.clone(), |b| {
            Ok(AlgebraElement::unit(b.spec()).scale(b.trace() * c(0.5, 0.0)))
        })
        .unwrap();
        assert!(is_cp(&half_trace, &cfg()).unwrap());
        let kd = kraus_oracle(&half_trace, &cfg()).unwrap();
        assert_eq!(kd.operators.len(), 4);
        assert!(kd.reconstruction_defect < 1e-12);
    }

    #[test]
    fn transpose_is_not_cp_and_kraus_oracle_refuses() {
        let t = transpose_map();
        assert!(!is_cp(&t, &cfg()).unwrap());
        // lowest Choi eigenvalue of the transpose is exactly -1
        let blocks = choi(&t);
        assert_eq!(blocks.len(), 1);
        let (values, _) = herm_eig(&blocks[0], &cfg()).unwrap();
        assert!((values[0] + 1.0).abs() < 1e-10, "lambda_min {}", values[0]);
        assert!(matches!(kraus_oracle(&t, &cfg()), Err(Error::NotCp(_))));
        // the positive-part reconstruction misses by order one
        let kd = kraus_reconstruction(&t, &cfg()).unwrap();
        assert!(kd.reconstruction_defect > 0.5);
    }

    #[test]
    fn non_star_preserving_map_is_not_cp() {
        let m2 = AlgebraSpec::new(vec![2]).unwrap();
        let basis = canonical_basis(&m2);
        // constant map onto the non-Hermitian unit E_01
        let skew = LinearMap::new(m2.clone(), m2, vec![basis[1].clone(); 4]).unwrap();
        assert!(!is_cp(&skew, &cfg()).unwrap());
    }

    #[test]
    fn cp_is_preserved_by_positive_scaling_only() {
        let t = trace_map();
        assert!(is_cp(&t, &cfg()).unwrap());
        assert!(is_cp(&t.scale(c(2.0, 0.0)), &cfg()).unwrap());
        assert!(!is_cp(&t.scale(c(-1.0, 0.0)), &cfg()).unwrap());
    }

    #[test]
    fn choi_blocks_follow_domain_blocks() {
        let spec = AlgebraSpec::new(vec![2, 1]).unwrap();
        let id = LinearMap::identity(&spec);
        let blocks = choi(&id);
        assert_eq!(blocks.len(), 2);
        assert_eq!((blocks[0].rows(), blocks[0].cols()), (6, 6));
        assert_eq!((blocks[1].rows(), blocks[1].cols()), (3, 3));
        assert!(is_cp(&id, &cfg()).unwrap());
    }

    #[test]
    fn gns_of_trace_has_dimension_four() {
        let g = gns(&trace_map(), &cfg()).unwrap();
        assert_eq!(g.corr.module().generators(), 4);
        assert_eq!(g.corr.module().dim(&cfg()).unwrap(), 4);
        assert!(g.corr.check_left_action(&cfg()).unwrap().passes(1e-12));
        assert!(gns_minimality(&g, &cfg()).unwrap());
    }

    #[test]
    fn gns_cyclic_vector_reproduces_the_map() {
        let m2 = AlgebraSpec::new(vec![2]).unwrap();
        for map in [LinearMap::identity(&m2), trace_map()] {
            let g = gns(&map, &cfg()).unwrap();
            for b in canonical_basis(map.domain()) {
                let lhs = g
                    .zeta
                    .inner(&g.corr.left_act(&b, &g.zeta).unwrap())
                    .unwrap();
                let rhs = map.apply(&b).unwrap();
                assert!(lhs.sub(&rhs).unwrap().max_norm() < 1e-12);
            }
        }
    }

    #[test]
    fn gns_gram_holds_the_two_point_values() {
        let map = trace_map();
        let g = gns(&map, &cfg()).unwrap();
        let basis = canonical_basis(map.domain());
        for (a, ba) in basis.iter().enumerate() {
            for (b, bb) in basis.iter().enumerate() {
                let want = map.apply(&ba.adjoint().mul(bb).unwrap()).unwrap();
                let got = g.corr.module().gram(a, b);
                assert!(got.sub(&want).unwrap().max_norm() < 1e-14);
            }
        }
    }

    #[test]
    fn gns_rejects_non_cp_maps() {
        assert!(matches!(
            gns(&transpose_map(), &cfg()),
            Err(Error::NotCp(_))
        ));
        let m2 = AlgebraSpec::new(vec![2]).unwrap();
        let basis = canonical_basis(&m2);
        let skew = LinearMap::new(m2.clone(), m2, vec![basis[1].clone(); 4]).unwrap();
        assert!(matches!(gns(&skew, &cfg()), Err(Error::NotCp(_))));
    }

    #[test]
    fn gns_works_across_block_structures() {
        // phi: M_2 -> M_2 ⊕ C, b ↦ (b, tr b): a direct sum of CP maps
        let m2 = AlgebraSpec::new(vec![2]).unwrap();
        let target = AlgebraSpec::new(vec![2, 1]).unwrap();
        let map = LinearMap::from_action(m2, target.clone(), |b| {
            AlgebraElement::from_blocks(
                &target,
                vec![
                    b.block(0).clone(),
                    ComplexMatrix::from_fn(1, 1, |_, _| b.trace()),
                ],
            )
        })
        .unwrap();
        assert!(is_cp(&map, &cfg()).unwrap());
        let g = gns(&map, &cfg()).unwrap();
        assert!(g.corr.check_left_action(&cfg()).unwrap().passes(1e-12));
        assert!(gns_minimality(&g, &cfg()).unwrap());
        for b in canonical_basis(g.corr.left_algebra()) {
            let lhs = g
                .zeta
                .inner(&g.corr.left_act(&b, &g.zeta).unwrap())
                .unwrap();
            let rhs = map.apply(&b).unwrap();
            assert!(lhs.sub(&rhs).unwrap().max_norm() < 1e-12);
        }
    }

    #[test]
    fn kraus_agrees_with_gns_on_cp_verdicts() {
        // the two certificates are independent implementations; check a
        // CP and a non-CP map through both
        let cp = trace_map();
        assert!(is_cp(&cp, &cfg()).unwrap());
        assert!(gns(&cp, &cfg()).is_ok());
        assert!(
            kraus_reconstruction(&cp, &cfg())
                .unwrap()
                .reconstruction_defect
                < 1e-12
        );
        let bad = transpose_map();
        assert!(!is_cp(&bad, &cfg()).unwrap());
        assert!(gns(&bad, &cfg()).is_err());
        assert!(
            kraus_reconstruction(&bad, &cfg())
                .unwrap()
                .reconstruction_defect
                > 0.5
        );
    }
}
