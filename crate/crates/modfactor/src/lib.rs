//! Factorization of completely positive module maps over finite-dimensional
//! C*-algebras.
//!
//! Every algebra here is a finite direct sum of complex matrix blocks, and
//! every module is a right Hilbert C*-module presented by a finite generator
//! set together with an algebra-valued Gram matrix. On top of that the crate
//! provides:
//!
//! * complete-positivity certificates for linear maps between such algebras
//!   (block Choi matrices, Kraus decompositions, Gram positivity);
//! * the GNS bimodule of a completely positive map, with its cyclic vector;
//! * interior tensor products of presented modules and correspondences;
//! * the factorization of a phi-map `T` through the GNS bimodule of `phi`
//!   as `T = v ∘ (id ⊙ ζ)` with `v` an isometry, and its converse;
//! * concrete Stinespring-type data (`K1`, `K2`, `ρ`, `Ψ`, `V`, `W*`) when
//!   the codomain is an operator space between Hilbert spaces, with
//!   cyclicity diagnostics;
//! * seeded generators, a JSON instance format, and report types used by
//!   the `modfactor` command line tool.
//!
//! The [`factor`] module documents the main theorem-shaped entry points
//! [`factorize`](factor::factorize) and
//! [`from_factorization`](factor::from_factorization).
//!
//! # Quick start
//!
//! Certify a map as completely positive, build its GNS correspondence and
//! check that the cyclic vector reproduces the map:
//!
//! ```
//! use modfactor::prelude::*;
//!
//! # fn main() -> Result<()> {
//! let m2 = AlgebraSpec::new(vec![2])?;
//! let cfg = NumericConfig::default();
//! let id = LinearMap::identity(&m2);
//! assert!(is_cp(&id, &cfg)?);
//!
//! let g = gns(&id, &cfg)?;
//! let basis = canonical_basis(&m2);
//! for b in &basis {
//!     let recovered = g.zeta.inner(&g.corr.left_act(b, &g.zeta)?)?;
//!     let defect = recovered.sub(&id.apply(b)?)?.max_norm();
//!     assert!(defect <= cfg.verify_tol);
//! }
//! # Ok(())
//! # }
//! ```

pub mod algebra;
pub mod cpgns;
mod error;
pub mod factor;
pub mod generate;
pub mod hilbmod;
pub mod json;
pub mod numerics;
pub mod report;
pub mod stinespring;

pub use error::{Error, Result};

/// One-stop imports for the common types and operations.
pub mod prelude {
    pub use crate::algebra::{
        canonical_basis, conditional_expectation, is_positive, structure_constants, AlgebraElement,
        AlgebraSpec,
    };
    pub use crate::cpgns::{
        choi, gns, gns_minimality, is_cp, kraus_oracle, kraus_reconstruction, GnsData,
        KrausDecomposition, LinearMap,
    };
    pub use crate::error::{Error, Result};
    pub use crate::factor::{
        factorize, from_factorization, infer_phi, is_phi_map, isometry_defect, phi_map_defect,
        Factorization, ModuleMap,
    };
    pub use crate::hilbmod::{
        column_correspondence, embed_free, interior_tensor, matrix_module, pairwise_gram,
        span_dimension, tensor_correspondence, tensor_element, Correspondence, FreeEmbedding,
        MatrixModule, ModuleElement, OrthonormalBasis, PresentedModule,
    };
    pub use crate::json::{InstanceFile, Payload};
    pub use crate::numerics::{
        herm_eig, lstsq, psd_check, psd_sqrt, rank_kernel, span_rank, ComplexMatrix, NumericConfig,
    };
    pub use crate::report::Report;
    pub use crate::stinespring::{cyclicity_check, stinespring, CyclicityReport, StinespringData};
}
