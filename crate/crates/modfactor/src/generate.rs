//! Seeded random instances: CP maps, presented modules, phi-maps with
//! known factorizations, dilation problems, and planted non-CP maps.
//!
//! Everything is driven by `ChaCha8` seeded explicitly, so instances are
//! reproducible across runs and platforms given the same seed.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{AlgebraElement, AlgebraSpec};
use crate::cpgns::{choi, gns, GnsData, LinearMap};
use crate::error::{Error, Result};
use crate::factor::ModuleMap;
use crate::hilbmod::{
    column_correspondence, embed_free, interior_tensor, matrix_module, tensor_element,
    PresentedModule,
};
use crate::numerics::{herm_eig, ComplexMatrix, NumericConfig};

/// The crate-wide PRNG: `ChaCha8` keyed from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    })
}

/// A random algebra element with independent standard Gaussian entries.
pub fn random_element(spec: &AlgebraSpec, rng: &mut ChaCha8Rng) -> AlgebraElement {
    let blocks = spec
        .block_dims()
        .iter()
        .map(|&n| gaussian_matrix(rng, n, n, 1.0))
        .collect();
    AlgebraElement::from_blocks(spec, blocks).expect("gaussian blocks are well-formed")
}

/// A random completely positive map as a compressed amplification:
/// `phi(b) = E_C( V* (rep(b) ⊗ I_rank) V )` for a Gaussian `V`, where
/// `E_C` is the conditional expectation onto the codomain blocks, scaled
/// so `phi(1)` stays order one.
pub fn random_cp(
    domain: &AlgebraSpec,
    codomain: &AlgebraSpec,
    rank: usize,
    seed: u64,
) -> Result<LinearMap> {
    if rank == 0 {
        return Err(Error::InvalidInput("rank must be positive".to_string()));
    }
    let mut rng = rng_from_seed(seed);
    let db = domain.rep_dim();
    let dc = codomain.rep_dim();
    let scale = 1.0 / ((db * rank) as f64).sqrt();
    let v = gaussian_matrix(&mut rng, db * rank, dc, scale);
    let eye = ComplexMatrix::identity(rank);
    LinearMap::from_action(domain.clone(), codomain.clone(), |b| {
        let amplified = b.to_matrix().kron(&eye);
        crate::algebra::conditional_expectation(&v.adjoint().mul(&amplified).mul(&v), codomain)
    })
}

/// A random presented module: the Gram of `k` Gaussian vectors drawn from
/// the free module `B^ambient`, positive semidefinite by construction.
/// With `ambient < k` the presentation has null directions.
pub fn random_module(
    spec: &AlgebraSpec,
    k: usize,
    ambient: usize,
    seed: u64,
    cfg: &NumericConfig,
) -> Result<PresentedModule> {
    if k == 0 || ambient == 0 {
        return Err(Error::InvalidInput(
            "generator counts must be positive".to_string(),
        ));
    }
    let mut rng = rng_from_seed(seed);
    let free = PresentedModule::free(spec, ambient);
    let scale = 1.0 / ((ambient * spec.rep_dim()) as f64).sqrt();
    let vectors: Vec<_> = (0..k)
        .map(|_| {
            free.element(
                (0..ambient)
                    .map(|_| random_element(spec, &mut rng).scale(Complex64::new(scale, 0.0)))
                    .collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut gram = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            gram.push(vectors[i].inner(&vectors[j])?);
        }
    }
    PresentedModule::new(spec, k, gram, cfg)
}

/// A phi-map instance with its full factorization held alongside.
#[derive(Debug, Clone)]
pub struct PhiMapInstance {
    pub t: ModuleMap,
    pub phi: LinearMap,
    pub gns: GnsData,
    pub tensor: PresentedModule,
    /// The isometry `E ⊙ F_phi -> C^{k+pad}` whose composite with
    /// `x ↦ x ⊙ ζ` defines `t`.
    pub v: ModuleMap,
}

/// Builds a random phi-map the way the factorization theorem says they
/// all arise: draw a CP map, form its GNS correspondence, embed
/// `E ⊙ F_phi` isometrically into a free module (zero-padded by `pad`
/// extra generators), and define `T x = v(x ⊙ ζ)`.
pub fn random_phi_map(
    e: &PresentedModule,
    codomain: &AlgebraSpec,
    rank: usize,
    pad: usize,
    seed: u64,
    cfg: &NumericConfig,
) -> Result<PhiMapInstance> {
    let phi = random_cp(e.algebra(), codomain, rank, seed)?;
    let g = gns(&phi, cfg)?;
    let tensor = interior_tensor(e, &g.corr, cfg)?;
    let emb = embed_free(&tensor, cfg)?;
    let kt = tensor.generators();
    let target = PresentedModule::free(codomain, kt + pad);
    let zero = AlgebraElement::zero(codomain);
    let mut v_values = Vec::with_capacity(tensor.coeff_dim());
    for g_idx in 0..kt {
        for beta in 0..codomain.dim() {
            let embedded = emb.apply(&tensor.basis_element(g_idx, beta))?;
            let mut coeffs = embedded.coeffs().to_vec();
            coeffs.extend(std::iter::repeat_n(zero.clone(), pad));
            v_values.push(target.element(coeffs)?);
        }
    }
    let v = ModuleMap::new(tensor.clone(), target, v_values, cfg)?;
    let nb = e.algebra().dim();
    let mut t_values = Vec::with_capacity(e.coeff_dim());
    for i in 0..e.generators() {
        for alpha in 0..nb {
            let x = e.basis_element(i, alpha);
            let xz = tensor_element(&x, &g.corr, &g.zeta, &tensor)?;
            t_values.push(v.apply(&xz)?);
        }
    }
    let t = ModuleMap::new(e.clone(), v.codomain().clone(), t_values, cfg)?;
    Ok(PhiMapInstance {
        t,
        phi,
        gns: g,
        tensor,
        v,
    })
}

/// A dilation problem: a phi-map into an operator-space codomain.
#[derive(Debug, Clone)]
pub struct DilationInstance {
    pub t: ModuleMap,
    pub phi: LinearMap,
}

/// Builds a random phi-map whose codomain is `matrix_module(d2, d1)` with
/// `d2` minimal: the Hilbert space `(E ⊙ F_phi) ⊙ C^{d1}` is computed,
/// and `T x = (the operator h ↦ (x ⊙ ζ) ⊗ h)` lands in `B(C^{d1}, K)`.
/// The resulting dilation is minimal on both counts.
pub fn random_dilation_instance(
    domain: &AlgebraSpec,
    d1: usize,
    gens: usize,
    ambient: usize,
    rank: usize,
    seed: u64,
    cfg: &NumericConfig,
) -> Result<DilationInstance> {
    let codomain = AlgebraSpec::new(vec![d1])?;
    let e = random_module(domain, gens, ambient, seed ^ 0x9e37_79b9_7f4a_7c15, cfg)?;
    let phi = random_cp(domain, &codomain, rank, seed)?;
    let g = gns(&phi, cfg)?;
    let tensor = interior_tensor(&e, &g.corr, cfg)?;
    let h1 = column_correspondence(d1, cfg)?;
    let big = interior_tensor(&tensor, &h1, cfg)?;
    let ob = big.orthonormal_basis(cfg)?;
    let d2 = ob.rank;
    let mm = matrix_module(d2, d1, cfg)?;
    let nb = domain.dim();
    let mut t_values = Vec::with_capacity(e.coeff_dim());
    for i in 0..e.generators() {
        for alpha in 0..nb {
            let x = e.basis_element(i, alpha);
            let w = tensor_element(&x, &g.corr, &g.zeta, &tensor)?;
            let mut op = ComplexMatrix::zeros(d2, d1);
            for q in 0..d1 {
                let basis_q = h1.module().basis_element(q, 0);
                let col = ob.project(&tensor_element(&w, &h1, &basis_q, &big)?);
                for (row, z) in col.into_iter().enumerate() {
                    op[(row, q)] = z;
                }
            }
            t_values.push(mm.from_operator(&op)?);
        }
    }
    let t = ModuleMap::new(e, mm.module().clone(), t_values, cfg)?;
    Ok(DilationInstance { t, phi })
}

/// A map that is certifiably far from completely positive: a random CP
/// map minus `(λ_max + 1)` times a normalized rank-one CP map aligned
/// with one Choi block, which forces the lowest Choi eigenvalue to `-1`
/// or below while keeping the map *-preserving.
pub fn planted_non_cp(
    domain: &AlgebraSpec,
    codomain: &AlgebraSpec,
    rank: usize,
    seed: u64,
) -> Result<LinearMap> {
    let base = random_cp(domain, codomain, rank, seed)?;
    let mut rng = rng_from_seed(seed ^ 0x5851_f42d_4c95_7f2d);
    let n0 = domain.block_dims()[0];
    let t0 = rng.gen_range(0..codomain.num_blocks());
    let m0 = codomain.block_dims()[t0];
    // unit vector u over (domain block 0) x (codomain block t0)
    let mut w = gaussian_matrix(&mut rng, n0, m0, 1.0);
    let norm = w.fro_norm();
    w = w.scale(Complex64::new(1.0 / norm, 0.0));
    let spike = LinearMap::from_action(domain.clone(), codomain.clone(), |b| {
        // chi(E^{(0)}_{jk}) has block t0 equal to w_j* outer w_k, where
        // w_j is row j of w; zero on every other basis element
        let blk = b.block(0);
        let mut out = ComplexMatrix::zeros(m0, m0);
        for j in 0..n0 {
            for k in 0..n0 {
                let z = blk[(j, k)];
                if z != Complex64::new(0.0, 0.0) {
                    for p in 0..m0 {
                        for q in 0..m0 {
                            out[(p, q)] += z * w[(j, p)] * w[(k, q)].conj();
                        }
                    }
                }
            }
        }
        let blocks = codomain
            .block_dims()
            .iter()
            .enumerate()
            .map(|(tb, &m)| {
                if tb == t0 {
                    out.clone()
                } else {
                    ComplexMatrix::zeros(m, m)
                }
            })
            .collect();
        AlgebraElement::from_blocks(codomain, blocks)
    })?;
    let cfg = NumericConfig::default();
    let (top, _) = herm_eig(&choi(&base)[0], &cfg)?;
    let delta = top.last().copied().unwrap_or(0.0) + 1.0;
    base.sub(&spike.scale(Complex64::new(delta, 0.0)))
}
