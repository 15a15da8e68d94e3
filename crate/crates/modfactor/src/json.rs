//! On-disk JSON formats for instances: linear maps, presented modules,
//! correspondences, module maps, and the versioned instance file wrapper.
//!
//! Complex numbers are `[re, im]` pairs, matrices are row-major arrays of
//! rows, algebra elements are one matrix per block. Deserialization goes
//! through the library constructors, so a file can never produce an
//! object that violates the structural invariants; shape problems surface
//! as [`Error::Parse`] with the offending field named, while mathematical
//! failures (a Gram that is not PSD) keep their own error kinds.

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, AlgebraSpec};
use crate::cpgns::LinearMap;
use crate::error::{Error, Result};
use crate::factor::ModuleMap;
use crate::hilbmod::{Correspondence, ModuleElement, PresentedModule};
use crate::numerics::{ComplexMatrix, NumericConfig};

/// One matrix block: rows of `[re, im]` entries.
pub type BlockJson = Vec<Vec<[f64; 2]>>;

/// An algebra element: one square block per algebra summand.
pub type ElementJson = Vec<BlockJson>;

fn parse_err(context: &str, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{context}: {msg}"))
}

fn spec_from(context: &str, dims: &[usize]) -> Result<AlgebraSpec> {
    AlgebraSpec::new(dims.to_vec()).map_err(|e| parse_err(context, e))
}

pub fn element_to_json(a: &AlgebraElement) -> ElementJson {
    a.spec()
        .block_dims()
        .iter()
        .enumerate()
        .map(|(t, &n)| {
            (0..n)
                .map(|r| {
                    (0..n)
                        .map(|c| [a.block(t)[(r, c)].re, a.block(t)[(r, c)].im])
                        .collect()
                })
                .collect()
        })
        .collect()
}

pub fn element_from_json(
    spec: &AlgebraSpec,
    json: &ElementJson,
    context: &str,
) -> Result<AlgebraElement> {
    if json.len() != spec.num_blocks() {
        return Err(parse_err(
            context,
            format!("expected {} blocks, got {}", spec.num_blocks(), json.len()),
        ));
    }
    let mut blocks = Vec::with_capacity(json.len());
    for (t, &n) in spec.block_dims().iter().enumerate() {
        let rows = &json[t];
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(parse_err(context, format!("block {t} must be {n}x{n}")));
        }
        blocks.push(ComplexMatrix::from_fn(n, n, |r, c| {
            num_complex::Complex64::new(rows[r][c][0], rows[r][c][1])
        }));
    }
    AlgebraElement::from_blocks(spec, blocks).map_err(|e| parse_err(context, e))
}

/// A linear map given by its values on the canonical basis of the domain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearMapJson {
    pub domain: Vec<usize>,
    pub codomain: Vec<usize>,
    pub values: Vec<ElementJson>,
}

impl LinearMapJson {
    pub fn from_linear_map(map: &LinearMap) -> Self {
        LinearMapJson {
            domain: map.domain().block_dims().to_vec(),
            codomain: map.codomain().block_dims().to_vec(),
            values: map.values().iter().map(element_to_json).collect(),
        }
    }

    pub fn to_linear_map(&self) -> Result<LinearMap> {
        let domain = spec_from("map.domain", &self.domain)?;
        let codomain = spec_from("map.codomain", &self.codomain)?;
        if self.values.len() != domain.dim() {
            return Err(parse_err(
                "map.values",
                format!(
                    "expected {} values, got {}",
                    domain.dim(),
                    self.values.len()
                ),
            ));
        }
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| element_from_json(&codomain, v, &format!("map.values[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        LinearMap::new(domain, codomain, values)
    }
}

/// A presented module: coefficient algebra, generator count, row-major
/// Gram.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModuleJson {
    pub algebra: Vec<usize>,
    pub generators: usize,
    pub gram: Vec<ElementJson>,
}

impl ModuleJson {
    pub fn from_module(m: &PresentedModule) -> Self {
        let k = m.generators();
        let mut gram = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                gram.push(element_to_json(m.gram(i, j)));
            }
        }
        ModuleJson {
            algebra: m.algebra().block_dims().to_vec(),
            generators: k,
            gram,
        }
    }

    pub fn to_module(&self, cfg: &NumericConfig) -> Result<PresentedModule> {
        let spec = spec_from("module.algebra", &self.algebra)?;
        if self.gram.len() != self.generators * self.generators {
            return Err(parse_err(
                "module.gram",
                format!(
                    "expected {} entries, got {}",
                    self.generators * self.generators,
                    self.gram.len()
                ),
            ));
        }
        let gram = self
            .gram
            .iter()
            .enumerate()
            .map(|(i, g)| element_from_json(&spec, g, &format!("module.gram[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        PresentedModule::new(&spec, self.generators, gram, cfg)
    }
}

fn element_list_to_json(coeffs: &[AlgebraElement]) -> Vec<ElementJson> {
    coeffs.iter().map(element_to_json).collect()
}

fn module_element_from_json(
    module: &PresentedModule,
    coeffs: &[ElementJson],
    context: &str,
) -> Result<ModuleElement> {
    if coeffs.len() != module.generators() {
        return Err(parse_err(
            context,
            format!(
                "expected {} coefficients, got {}",
                module.generators(),
                coeffs.len()
            ),
        ));
    }
    let parsed = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| element_from_json(module.algebra(), c, &format!("{context}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    module.element(parsed)
}

/// A correspondence: module data plus the left algebra and its action
/// matrices (row-major `k x k`, one per canonical basis element).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrespondenceJson {
    pub algebra: Vec<usize>,
    pub generators: usize,
    pub gram: Vec<ElementJson>,
    pub left_algebra: Vec<usize>,
    pub action: Vec<Vec<ElementJson>>,
}

impl CorrespondenceJson {
    pub fn from_correspondence(c: &Correspondence) -> Self {
        let module = ModuleJson::from_module(c.module());
        let action = (0..c.left_algebra().dim())
            .map(|gamma| element_list_to_json(c.action_matrix(gamma)))
            .collect();
        CorrespondenceJson {
            algebra: module.algebra,
            generators: module.generators,
            gram: module.gram,
            left_algebra: c.left_algebra().block_dims().to_vec(),
            action,
        }
    }

    pub fn to_correspondence(&self, cfg: &NumericConfig) -> Result<Correspondence> {
        let module = ModuleJson {
            algebra: self.algebra.clone(),
            generators: self.generators,
            gram: self.gram.clone(),
        }
        .to_module(cfg)?;
        let left = spec_from("correspondence.left_algebra", &self.left_algebra)?;
        if self.action.len() != left.dim() {
            return Err(parse_err(
                "correspondence.action",
                format!(
                    "expected {} matrices, got {}",
                    left.dim(),
                    self.action.len()
                ),
            ));
        }
        let k = module.generators();
        let mut action = Vec::with_capacity(self.action.len());
        for (gamma, mat) in self.action.iter().enumerate() {
            if mat.len() != k * k {
                return Err(parse_err(
                    &format!("correspondence.action[{gamma}]"),
                    format!("expected {} entries, got {}", k * k, mat.len()),
                ));
            }
            let entries = mat
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    element_from_json(
                        module.algebra(),
                        e,
                        &format!("correspondence.action[{gamma}][{i}]"),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            action.push(entries);
        }
        Correspondence::new(module, left, action)
    }
}

/// A module map: domain and codomain presentations plus one codomain
/// element (a coefficient list) per free basis element of the domain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModuleMapJson {
    pub domain: ModuleJson,
    pub codomain: ModuleJson,
    pub values: Vec<Vec<ElementJson>>,
}

impl ModuleMapJson {
    pub fn from_module_map(m: &ModuleMap) -> Self {
        ModuleMapJson {
            domain: ModuleJson::from_module(m.domain()),
            codomain: ModuleJson::from_module(m.codomain()),
            values: m
                .values()
                .iter()
                .map(|v| element_list_to_json(v.coeffs()))
                .collect(),
        }
    }

    pub fn to_module_map(&self, cfg: &NumericConfig) -> Result<ModuleMap> {
        let domain = self.domain.to_module(cfg)?;
        let codomain = self.codomain.to_module(cfg)?;
        if self.values.len() != domain.coeff_dim() {
            return Err(parse_err(
                "map.values",
                format!(
                    "expected {} values, got {}",
                    domain.coeff_dim(),
                    self.values.len()
                ),
            ));
        }
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| module_element_from_json(&codomain, v, &format!("map.values[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        ModuleMap::new(domain, codomain, values, cfg)
    }
}

/// The problem payload of an instance file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    /// A bare linear map, for CP certification, Kraus extraction or GNS.
    CpMapProblem { map: LinearMapJson },
    /// A module map, optionally with the linear map it should be
    /// compatible with (commands infer it when absent).
    PhiMapProblem {
        t: ModuleMapJson,
        #[serde(skip_serializing_if = "Option::is_none")]
        phi: Option<LinearMapJson>,
    },
    /// Factorization data `(E, F, ζ, v)` for the converse direction.
    FactorizationBundle {
        e: ModuleJson,
        f: CorrespondenceJson,
        zeta: Vec<ElementJson>,
        v: ModuleMapJson,
    },
}

/// A versioned instance file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub version: String,
    #[serde(flatten)]
    pub payload: Payload,
}

pub const FORMAT_VERSION: &str = "1";

impl InstanceFile {
    pub fn new(payload: Payload) -> Self {
        InstanceFile {
            version: FORMAT_VERSION.to_string(),
            payload,
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: InstanceFile =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if file.version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported format version {:?} (expected {:?})",
                file.version, FORMAT_VERSION
            )));
        }
        Ok(file)
    }

    pub fn to_json_string(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Internal(e.to_string()))
    }
}

/// Parses the `zeta` field of a bundle against the correspondence it
/// belongs to.
pub fn zeta_from_json(f: &Correspondence, zeta: &[ElementJson]) -> Result<ModuleElement> {
    module_element_from_json(f.module(), zeta, "bundle.zeta")
}

pub fn zeta_to_json(zeta: &ModuleElement) -> Vec<ElementJson> {
    element_list_to_json(zeta.coeffs())
}
