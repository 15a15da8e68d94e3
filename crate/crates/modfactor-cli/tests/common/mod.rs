//! Deterministic fixture corpus shared by the fixture generator and the
//! acceptance tests. Every instance is rebuilt from scratch on each call,
//! so byte-equality against the committed files doubles as a determinism
//! check.

use std::path::PathBuf;

use num_complex::Complex64;

use modfactor::generate::{
    planted_non_cp, random_dilation_instance, random_module, random_phi_map,
};
use modfactor::json::{
    element_to_json, zeta_to_json, CorrespondenceJson, ElementJson, InstanceFile, LinearMapJson,
    ModuleJson, ModuleMapJson, Payload,
};
use modfactor::prelude::*;

/// One committed fixture: its file name, exact contents, and the CLI
/// checks it must satisfy (`(args-before-path, expected exit code)`).
pub struct Fixture {
    pub name: &'static str,
    pub content: String,
    pub checks: Vec<(Vec<&'static str>, i32)>,
}

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
}

fn cfg() -> NumericConfig {
    NumericConfig::default()
}

fn render(payload: Payload) -> String {
    InstanceFile::new(payload).to_json_string().unwrap() + "\n"
}

fn cp_problem(map: &LinearMap) -> String {
    render(Payload::CpMapProblem {
        map: LinearMapJson::from_linear_map(map),
    })
}

fn phi_problem(t: &ModuleMap, phi: Option<&LinearMap>) -> String {
    render(Payload::PhiMapProblem {
        t: ModuleMapJson::from_module_map(t),
        phi: phi.map(LinearMapJson::from_linear_map),
    })
}

fn bundle_problem(e: &PresentedModule, f: &Factorization) -> String {
    render(Payload::FactorizationBundle {
        e: ModuleJson::from_module(e),
        f: CorrespondenceJson::from_correspondence(&f.gns.corr),
        zeta: zeta_to_json(&f.gns.zeta),
        v: ModuleMapJson::from_module_map(&f.v),
    })
}

/// `phi(z) = 2z` on the scalars, `T` the matching isometric embedding
/// scaled by `sqrt(2)`.
fn scalar_example() -> (ModuleMap, LinearMap) {
    let s = AlgebraSpec::scalars();
    let e = PresentedModule::free(&s, 1);
    let f = PresentedModule::free(&s, 1);
    let root2 = AlgebraElement::scalar(&s, Complex64::new(std::f64::consts::SQRT_2, 0.0));
    let t = ModuleMap::new(e, f.clone(), vec![f.element(vec![root2]).unwrap()], &cfg()).unwrap();
    let phi = LinearMap::new(
        s.clone(),
        s.clone(),
        vec![AlgebraElement::scalar(&s, Complex64::new(2.0, 0.0))],
    )
    .unwrap();
    (t, phi)
}

fn transpose_m2() -> LinearMap {
    let m2 = AlgebraSpec::new(vec![2]).unwrap();
    LinearMap::from_action(m2.clone(), m2.clone(), |b| {
        AlgebraElement::from_blocks(
            &m2,
            vec![ComplexMatrix::from_fn(2, 2, |r, c| b.block(0)[(c, r)])],
        )
    })
    .unwrap()
}

fn trace_m2() -> LinearMap {
    let m2 = AlgebraSpec::new(vec![2]).unwrap();
    let s = AlgebraSpec::scalars();
    LinearMap::from_action(m2, s.clone(), |b| Ok(AlgebraElement::scalar(&s, b.trace()))).unwrap()
}

/// `phi(b) = i b`: linear but not *-preserving, so not CP.
fn skew_m2() -> LinearMap {
    let m2 = AlgebraSpec::new(vec![2]).unwrap();
    LinearMap::from_action(m2.clone(), m2, |b| Ok(b.scale(Complex64::new(0.0, 1.0)))).unwrap()
}

fn generated_phimap() -> (ModuleMap, LinearMap) {
    let b = AlgebraSpec::new(vec![2]).unwrap();
    let c = AlgebraSpec::new(vec![2]).unwrap();
    let e = random_module(&b, 2, 2, 31, &cfg()).unwrap();
    let inst = random_phi_map(&e, &c, 2, 1, 32, &cfg()).unwrap();
    (inst.t, inst.phi)
}

fn scaled_values(t: &ModuleMap, z: Complex64) -> ModuleMap {
    let values = t.values().iter().map(|v| v.scale(z)).collect();
    ModuleMap::new(t.domain().clone(), t.codomain().clone(), values, &cfg()).unwrap()
}

/// Adds `eps` to one coefficient entry of the first value.
fn perturbed_values(t: &ModuleMap, eps: f64) -> ModuleMap {
    let mut values: Vec<ModuleElement> = t.values().to_vec();
    let mut coeffs = values[0].coeffs().to_vec();
    let bump = AlgebraElement::unit(coeffs[0].spec()).scale(Complex64::new(eps, 0.0));
    coeffs[0] = coeffs[0].add(&bump).unwrap();
    values[0] = t.codomain().element(coeffs).unwrap();
    ModuleMap::new(t.domain().clone(), t.codomain().clone(), values, &cfg()).unwrap()
}

/// The identity on a module supported on one block of `C ⊕ C`: a valid
/// phi-map whose inner products never touch the second block.
fn notfull_example() -> ModuleMap {
    let spec = AlgebraSpec::new(vec![1, 1]).unwrap();
    let gram = AlgebraElement::from_blocks(
        &spec,
        vec![ComplexMatrix::identity(1), ComplexMatrix::zeros(1, 1)],
    )
    .unwrap();
    let e = PresentedModule::new(&spec, 1, vec![gram], &cfg()).unwrap();
    let values = (0..spec.dim())
        .map(|alpha| e.basis_element(0, alpha))
        .collect();
    ModuleMap::new(e.clone(), e, values, &cfg()).unwrap()
}

/// Scales one module-map value so no single phi matches every pair.
fn inconsistent_example() -> ModuleMap {
    let (t, _) = generated_phimap();
    let mut values: Vec<ModuleElement> = t.values().to_vec();
    values[0] = values[0].scale(Complex64::new(3.0, 0.0));
    ModuleMap::new(t.domain().clone(), t.codomain().clone(), values, &cfg()).unwrap()
}

fn dilation_phimap(seed: u64) -> (ModuleMap, LinearMap) {
    let b = AlgebraSpec::new(vec![2]).unwrap();
    let inst = random_dilation_instance(&b, 2, 2, 2, 2, seed, &cfg()).unwrap();
    (inst.t, inst.phi)
}

/// Edits every value entry of the `v` leg of a rendered bundle.
fn map_bundle_values(content: &str, f: impl Fn(f64) -> f64) -> String {
    let mut file = InstanceFile::from_json_str(content).unwrap();
    match &mut file.payload {
        Payload::FactorizationBundle { v, .. } => {
            for value in &mut v.values {
                for element in value.iter_mut() {
                    for block in element.iter_mut() {
                        for row in block.iter_mut() {
                            for entry in row.iter_mut() {
                                entry[0] = f(entry[0]);
                                entry[1] = f(entry[1]);
                            }
                        }
                    }
                }
            }
        }
        _ => panic!("not a bundle"),
    }
    file.to_json_string().unwrap() + "\n"
}

/// A phi_map_problem whose domain Gram is not positive semidefinite.
fn gram_not_psd() -> String {
    let neg: ElementJson = vec![vec![vec![[-1.0, 0.0]]]];
    let s = AlgebraSpec::scalars();
    let zero = element_to_json(&AlgebraElement::zero(&s));
    let free = ModuleJson {
        algebra: vec![1],
        generators: 1,
        gram: vec![element_to_json(&AlgebraElement::unit(&s))],
    };
    render(Payload::PhiMapProblem {
        t: ModuleMapJson {
            domain: ModuleJson {
                algebra: vec![1],
                generators: 1,
                gram: vec![neg],
            },
            codomain: free,
            values: vec![vec![zero]],
        },
        phi: None,
    })
}

pub fn fixture_set() -> Vec<Fixture> {
    let cfg = cfg();
    let (scalar_t, scalar_phi) = scalar_example();
    let (gen_t, gen_phi) = generated_phimap();
    let gen_factorization = factorize(&gen_t, &gen_phi, &cfg).unwrap();
    let bundle = bundle_problem(gen_t.domain(), &gen_factorization);
    let (dil_t, dil_phi) = dilation_phimap(41);
    let b21 = AlgebraSpec::new(vec![2, 1]).unwrap();
    let m2 = AlgebraSpec::new(vec![2]).unwrap();

    vec![
        Fixture {
            name: "scalar_example.json",
            content: phi_problem(&scalar_t, Some(&scalar_phi)),
            checks: vec![
                (vec!["verify"], 0),
                (vec!["check-phimap"], 0),
                (vec!["factorize"], 0),
            ],
        },
        Fixture {
            name: "identity_m2_cp.json",
            content: cp_problem(&LinearMap::identity(&m2)),
            checks: vec![(vec!["check-cp"], 0), (vec!["gns"], 0), (vec!["verify"], 0)],
        },
        Fixture {
            name: "trace_m2_cp.json",
            content: cp_problem(&trace_m2()),
            checks: vec![(vec!["check-cp"], 0), (vec!["gns"], 0)],
        },
        Fixture {
            name: "phimap_generated.json",
            content: phi_problem(&gen_t, Some(&gen_phi)),
            checks: vec![(vec!["verify"], 0), (vec!["infer-phi"], 0)],
        },
        Fixture {
            name: "bundle_generated.json",
            content: bundle.clone(),
            checks: vec![(vec!["verify"], 0)],
        },
        Fixture {
            name: "stinespring_instance.json",
            content: phi_problem(&dil_t, Some(&dil_phi)),
            checks: vec![(vec!["stinespring"], 0), (vec!["verify"], 0)],
        },
        Fixture {
            name: "transpose_m2.json",
            content: cp_problem(&transpose_m2()),
            checks: vec![(vec!["check-cp"], 1), (vec!["gns"], 1), (vec!["verify"], 1)],
        },
        Fixture {
            name: "noncp_skew.json",
            content: cp_problem(&skew_m2()),
            checks: vec![(vec!["check-cp"], 1)],
        },
        Fixture {
            name: "noncp_planted.json",
            content: cp_problem(&planted_non_cp(&m2, &b21, 2, 21).unwrap()),
            checks: vec![(vec!["check-cp"], 1), (vec!["gns"], 1)],
        },
        Fixture {
            name: "nonphi_scaled2.json",
            content: phi_problem(
                &scaled_values(&gen_t, Complex64::new(2.0, 0.0)),
                Some(&gen_phi),
            ),
            checks: vec![
                (vec!["check-phimap"], 1),
                (vec!["verify"], 1),
                (vec!["factorize"], 1),
            ],
        },
        Fixture {
            name: "nonphi_perturbed.json",
            content: phi_problem(&perturbed_values(&gen_t, 1e-3), Some(&gen_phi)),
            checks: vec![(vec!["check-phimap"], 1)],
        },
        Fixture {
            name: "nonphi_wrongphi.json",
            content: phi_problem(&gen_t, Some(&gen_phi.scale(Complex64::new(2.0, 0.0)))),
            checks: vec![(vec!["check-phimap"], 1)],
        },
        Fixture {
            name: "infer_inconsistent.json",
            content: phi_problem(&inconsistent_example(), None),
            checks: vec![(vec!["infer-phi"], 1)],
        },
        Fixture {
            name: "infer_notfull.json",
            content: phi_problem(&notfull_example(), None),
            checks: vec![(vec!["infer-phi"], 1)],
        },
        Fixture {
            name: "bundle_v_scaled.json",
            content: map_bundle_values(&bundle, |x| 1.5 * x),
            checks: vec![(vec!["verify"], 1)],
        },
        Fixture {
            name: "bundle_v_zeroed.json",
            content: map_bundle_values(&bundle, |_| 0.0),
            checks: vec![(vec!["verify"], 1)],
        },
        Fixture {
            name: "stinespring_broken.json",
            content: {
                let (t, phi) = dilation_phimap(41);
                phi_problem(&perturbed_values(&t, 1e-2), Some(&phi))
            },
            checks: vec![(vec!["stinespring"], 1)],
        },
        Fixture {
            name: "gram_not_psd.json",
            content: gram_not_psd(),
            checks: vec![(vec!["check-phimap"], 1)],
        },
    ]
}
