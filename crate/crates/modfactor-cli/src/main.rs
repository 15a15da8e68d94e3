//! Command line front end: loads JSON instance files, runs the library
//! checks and prints one deterministic report per invocation.
//!
//! Exit codes: `0` all checks passed, `1` a mathematical check failed
//! (not CP, not a phi-map, tolerance exceeded, ...), `2` unusable input
//! or usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use modfactor::json::{
    zeta_from_json, zeta_to_json, CorrespondenceJson, InstanceFile, LinearMapJson, ModuleJson,
    ModuleMapJson, Payload,
};
use modfactor::prelude::*;
use modfactor::report::Report;

#[derive(Parser)]
#[command(
    name = "modfactor",
    version,
    about = "Checks and factors completely positive module maps over finite-dimensional C*-algebras"
)]
struct Cli {
    /// Override the verification tolerance used for pass/fail decisions.
    #[arg(long, global = true, value_name = "TOL")]
    tol: Option<f64>,
    /// Emit reports as JSON.
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// Emit reports as plain text (the default).
    #[arg(long, global = true)]
    text: bool,
    /// Write the generated instance or derived bundle to this path.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify complete positivity of a linear map (cp_map_problem file).
    CheckCp { file: PathBuf },
    /// Build the GNS correspondence of a CP map and verify it reproduces
    /// the map through its cyclic vector.
    Gns { file: PathBuf },
    /// Check the phi-map identity for a module map and a given phi.
    CheckPhimap { file: PathBuf },
    /// Infer the unique phi compatible with a module map.
    InferPhi { file: PathBuf },
    /// Factor a phi-map through the GNS correspondence of phi; with
    /// --out, save the resulting factorization bundle.
    Factorize { file: PathBuf },
    /// Build Stinespring-type dilation data when both modules are
    /// concrete operator spaces.
    Stinespring { file: PathBuf },
    /// Run the full check suite an instance file supports.
    Verify { file: PathBuf },
    /// Generate a random instance (to --out, or stdout as JSON).
    #[command(subcommand)]
    Generate(GenerateKind),
}

#[derive(Subcommand)]
enum GenerateKind {
    /// A random completely positive map.
    Cp {
        /// Domain algebra block sizes, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "2")]
        domain: Vec<usize>,
        /// Codomain algebra block sizes, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "2")]
        codomain: Vec<usize>,
        /// Number of Stinespring legs of the construction.
        #[arg(long, default_value_t = 2)]
        rank: usize,
        /// RNG seed; falls back to MODFACTOR_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// A random phi-map instance (module map plus its compatible phi).
    Phimap {
        #[arg(long, value_delimiter = ',', default_value = "2")]
        domain: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "2")]
        codomain: Vec<usize>,
        /// Generators of the domain module.
        #[arg(long, default_value_t = 2)]
        gens: usize,
        /// Ambient free rank the domain Gram is sampled from; below
        /// --gens this forces null directions.
        #[arg(long)]
        ambient: Option<usize>,
        /// Stinespring legs of the underlying CP map.
        #[arg(long, default_value_t = 2)]
        rank: usize,
        /// Extra zero generators padded onto the codomain presentation.
        #[arg(long, default_value_t = 0)]
        pad: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = NumericConfig::default();
    if let Some(tol) = cli.tol {
        cfg = cfg.with_verify_tol(tol);
        if let Err(e) = cfg.validate() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli, &cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_check_failure() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn run(cli: &Cli, cfg: &NumericConfig) -> modfactor::Result<bool> {
    let report = match &cli.command {
        Command::CheckCp { file } => cmd_check_cp("check-cp", file, cfg)?,
        Command::Gns { file } => cmd_gns(file, cfg)?,
        Command::CheckPhimap { file } => cmd_check_phimap(file, cfg)?,
        Command::InferPhi { file } => cmd_infer_phi(file, cfg, cli.out.as_deref())?,
        Command::Factorize { file } => cmd_factorize(file, cfg, cli.out.as_deref())?,
        Command::Stinespring { file } => cmd_stinespring(file, cfg)?,
        Command::Verify { file } => cmd_verify(file, cfg)?,
        Command::Generate(kind) => match cmd_generate(kind, cfg, cli.out.as_deref())? {
            Some(report) => report,
            // without --out the instance itself went to stdout
            None => return Ok(true),
        },
    };
    if cli.json {
        println!("{}", report.to_json()?);
    } else {
        print!("{}", report.to_text());
    }
    Ok(report.pass)
}

fn load(path: &Path) -> modfactor::Result<InstanceFile> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    InstanceFile::from_json_str(&text)
}

fn kind_name(p: &Payload) -> &'static str {
    match p {
        Payload::CpMapProblem { .. } => "cp_map_problem",
        Payload::PhiMapProblem { .. } => "phi_map_problem",
        Payload::FactorizationBundle { .. } => "factorization_bundle",
    }
}

fn load_cp_map(path: &Path) -> modfactor::Result<LinearMap> {
    match load(path)?.payload {
        Payload::CpMapProblem { map } => map.to_linear_map(),
        other => Err(Error::Parse(format!(
            "{}: expected a cp_map_problem, found {}",
            path.display(),
            kind_name(&other)
        ))),
    }
}

fn load_phi_map(
    path: &Path,
    cfg: &NumericConfig,
) -> modfactor::Result<(ModuleMap, Option<LinearMap>)> {
    match load(path)?.payload {
        Payload::PhiMapProblem { t, phi } => {
            let t = t.to_module_map(cfg)?;
            let phi = phi.map(|p| p.to_linear_map()).transpose()?;
            Ok((t, phi))
        }
        other => Err(Error::Parse(format!(
            "{}: expected a phi_map_problem, found {}",
            path.display(),
            kind_name(&other)
        ))),
    }
}

fn write_instance(file: &InstanceFile, path: &Path) -> modfactor::Result<()> {
    let text = file.to_json_string()?;
    fs::write(path, text + "\n")
        .map_err(|e| Error::Internal(format!("write {}: {e}", path.display())))
}

/// Given phi wins; otherwise the unique compatible phi is inferred.
fn resolve_phi(
    t: &ModuleMap,
    given: Option<LinearMap>,
    cfg: &NumericConfig,
) -> modfactor::Result<LinearMap> {
    match given {
        Some(phi) => Ok(phi),
        None => Ok(infer_phi(t, cfg)?.0),
    }
}

fn resolve_seed(explicit: Option<u64>) -> modfactor::Result<u64> {
    if let Some(seed) = explicit {
        return Ok(seed);
    }
    match std::env::var("MODFACTOR_SEED") {
        Ok(value) => value
            .trim()
            .parse::<u64>()
            .map_err(|e| Error::Parse(format!("MODFACTOR_SEED: {e}"))),
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(e) => Err(Error::Parse(format!("MODFACTOR_SEED: {e}"))),
    }
}

fn cmd_check_cp(name: &str, path: &Path, cfg: &NumericConfig) -> modfactor::Result<Report> {
    let map = load_cp_map(path)?;
    let mut r = Report::new(name, cfg);
    r.dim("domain", map.domain().dim());
    r.dim("codomain", map.codomain().dim());
    let cp = is_cp(&map, cfg)?;
    r.check_flag("cp", cp);
    let blocks = choi(&map);
    let hermitian = blocks
        .iter()
        .all(|b| b.hermitian_defect() <= cfg.verify_tol * (1.0 + b.max_norm()));
    if !hermitian {
        // eigenvalues and Kraus data are meaningless without *-preservation
        r.note("Choi blocks are not Hermitian: the map is not *-preserving");
        return Ok(r);
    }
    let mut lambda_min = f64::INFINITY;
    for block in &blocks {
        let (eigs, _) = herm_eig(block, cfg)?;
        if let Some(&low) = eigs.first() {
            lambda_min = lambda_min.min(low);
        }
    }
    r.note_defect("choi_lambda_min", lambda_min);
    let kraus = kraus_reconstruction(&map, cfg)?;
    r.dim("kraus_rank", kraus.operators.len());
    if cp {
        // a CP map must be reconstructed by its Kraus family
        r.check_defect(
            "kraus_reconstruction",
            kraus.reconstruction_defect,
            cfg.verify_tol,
        );
        r.check_defect("kraus_algebra", kraus.algebra_defect, cfg.verify_tol);
    } else {
        r.note_defect("kraus_reconstruction", kraus.reconstruction_defect);
        r.note_defect("kraus_algebra", kraus.algebra_defect);
    }
    Ok(r)
}

fn cmd_gns(path: &Path, cfg: &NumericConfig) -> modfactor::Result<Report> {
    let map = load_cp_map(path)?;
    let g = gns(&map, cfg)?;
    let mut r = Report::new("gns", cfg);
    r.dim("generators", g.corr.module().generators());
    r.dim("module", g.corr.module().dim(cfg)?);
    let mut defect = 0f64;
    for b in canonical_basis(map.domain()) {
        let recovered = g.zeta.inner(&g.corr.left_act(&b, &g.zeta)?)?;
        defect = defect.max(recovered.sub(&map.apply(&b)?)?.max_norm());
    }
    r.check_defect("reconstruction", defect, cfg.verify_tol);
    let action = g.corr.check_left_action(cfg)?;
    r.check_defect("action_unital", action.unital_defect, cfg.verify_tol);
    r.check_defect(
        "action_multiplicative",
        action.multiplicative_defect,
        cfg.verify_tol,
    );
    r.check_defect("action_adjoint", action.adjoint_defect, cfg.verify_tol);
    r.check_flag("minimal", gns_minimality(&g, cfg)?);
    Ok(r)
}

fn cmd_check_phimap(path: &Path, cfg: &NumericConfig) -> modfactor::Result<Report> {
    let (t, phi) = load_phi_map(path, cfg)?;
    let phi = phi.ok_or_else(|| {
        Error::Parse(format!(
            "{}: phi_map_problem carries no phi; use infer-phi",
            path.display()
        ))
    })?;
    let mut r = Report::new("check-phimap", cfg);
    r.dim("domain_generators", t.domain().generators());
    r.dim("domain", t.domain().dim(cfg)?);
    r.dim("codomain", t.codomain().dim(cfg)?);
    r.check_defect("phi_map", phi_map_defect(&t, &phi, cfg)?, cfg.verify_tol);
    r.note_flag("cp", is_cp(&phi, cfg)?);
    Ok(r)
}

fn cmd_infer_phi(
    path: &Path,
    cfg: &NumericConfig,
    out: Option<&Path>,
) -> modfactor::Result<Report> {
    let (t, given) = load_phi_map(path, cfg)?;
    let (phi, residual) = infer_phi(&t, cfg)?;
    let mut r = Report::new("infer-phi", cfg);
    r.note_defect("residual", residual);
    r.check_defect("phi_map", phi_map_defect(&t, &phi, cfg)?, cfg.verify_tol);
    r.note_flag("cp", is_cp(&phi, cfg)?);
    if let Some(g) = given {
        r.note_defect("distance_to_given", phi.sub(&g)?.max_norm());
    }
    if let Some(out) = out {
        let file = InstanceFile::new(Payload::PhiMapProblem {
            t: ModuleMapJson::from_module_map(&t),
            phi: Some(LinearMapJson::from_linear_map(&phi)),
        });
        write_instance(&file, out)?;
        r.note(format!("wrote {}", out.display()));
    }
    Ok(r)
}

fn cmd_factorize(
    path: &Path,
    cfg: &NumericConfig,
    out: Option<&Path>,
) -> modfactor::Result<Report> {
    let (t, given) = load_phi_map(path, cfg)?;
    let phi = resolve_phi(&t, given, cfg)?;
    let f = factorize(&t, &phi, cfg)?;
    let mut r = Report::new("factorize", cfg);
    r.dim("domain", t.domain().dim(cfg)?);
    r.dim("codomain", t.codomain().dim(cfg)?);
    r.dim("gns", f.gns.corr.module().dim(cfg)?);
    r.dim("tensor", f.tensor.dim(cfg)?);
    r.check_defect("isometry", f.isometry_defect, cfg.verify_tol);
    r.check_defect("reconstruction", f.reconstruction_defect, cfg.verify_tol);
    r.note_defect("phi_map", phi_map_defect(&t, &phi, cfg)?);
    if let Some(out) = out {
        let file = InstanceFile::new(Payload::FactorizationBundle {
            e: ModuleJson::from_module(t.domain()),
            f: CorrespondenceJson::from_correspondence(&f.gns.corr),
            zeta: zeta_to_json(&f.gns.zeta),
            v: ModuleMapJson::from_module_map(&f.v),
        });
        write_instance(&file, out)?;
        r.note(format!("wrote {}", out.display()));
    }
    Ok(r)
}

fn cmd_stinespring(path: &Path, cfg: &NumericConfig) -> modfactor::Result<Report> {
    let (t, given) = load_phi_map(path, cfg)?;
    let phi = resolve_phi(&t, given, cfg)?;
    let data = stinespring(&t, &phi, cfg)?;
    let mut r = Report::new("stinespring", cfg);
    r.dim("d1", data.d1);
    r.dim("d2", data.d2);
    r.dim("k1", data.p1.rank);
    r.dim("k2", data.p2.rank);
    let d = &data.defects;
    r.check_defect("representation", d.representation, cfg.verify_tol);
    r.check_defect("coisometry", d.coisometry, cfg.verify_tol);
    r.check_defect("v_gram", d.v_gram, cfg.verify_tol);
    r.check_defect("rho_homomorphism", d.rho_homomorphism, cfg.verify_tol);
    r.check_defect("psi_compatibility", d.psi_compatibility, cfg.verify_tol);
    let cyc = cyclicity_check(&data, cfg)?;
    r.note_flag("cyclic", cyc.cyclic);
    r.note_flag("nondegenerate", cyc.nondegenerate);
    Ok(r)
}

fn cmd_verify(path: &Path, cfg: &NumericConfig) -> modfactor::Result<Report> {
    match load(path)?.payload {
        Payload::CpMapProblem { .. } => cmd_check_cp("verify", path, cfg),
        Payload::PhiMapProblem { t, phi } => {
            let t = t.to_module_map(cfg)?;
            let phi = resolve_phi(&t, phi.map(|p| p.to_linear_map()).transpose()?, cfg)?;
            let mut r = Report::new("verify", cfg);
            r.dim("domain", t.domain().dim(cfg)?);
            r.dim("codomain", t.codomain().dim(cfg)?);
            r.check_defect("phi_map", phi_map_defect(&t, &phi, cfg)?, cfg.verify_tol);
            r.check_flag("cp", is_cp(&phi, cfg)?);
            if r.pass {
                let f = factorize(&t, &phi, cfg)?;
                r.dim("gns", f.gns.corr.module().dim(cfg)?);
                r.dim("tensor", f.tensor.dim(cfg)?);
                r.check_defect("isometry", f.isometry_defect, cfg.verify_tol);
                r.check_defect("reconstruction", f.reconstruction_defect, cfg.verify_tol);
            }
            Ok(r)
        }
        Payload::FactorizationBundle { e, f, zeta, v } => {
            let e = e.to_module(cfg)?;
            let f = f.to_correspondence(cfg)?;
            let zeta = zeta_from_json(&f, &zeta)?;
            let v = v.to_module_map(cfg)?;
            let mut r = Report::new("verify", cfg);
            r.dim("domain", e.dim(cfg)?);
            r.dim("gns", f.module().dim(cfg)?);
            let action = f.check_left_action(cfg)?;
            r.check_defect("action", action.max_defect(), cfg.verify_tol);
            let (t, phi) = from_factorization(&e, &f, &zeta, &v, cfg)?;
            r.check_defect("phi_map", phi_map_defect(&t, &phi, cfg)?, cfg.verify_tol);
            // the factorization theorem promises the induced phi is CP
            r.check_flag("cp", is_cp(&phi, cfg)?);
            r.check_defect("isometry", isometry_defect(&v, cfg)?, cfg.verify_tol);
            Ok(r)
        }
    }
}

fn cmd_generate(
    kind: &GenerateKind,
    cfg: &NumericConfig,
    out: Option<&Path>,
) -> modfactor::Result<Option<Report>> {
    let (file, report) = match kind {
        GenerateKind::Cp {
            domain,
            codomain,
            rank,
            seed,
        } => {
            let seed = resolve_seed(*seed)?;
            let domain = AlgebraSpec::new(domain.clone())?;
            let codomain = AlgebraSpec::new(codomain.clone())?;
            let map = modfactor::generate::random_cp(&domain, &codomain, *rank, seed)?;
            let mut r = Report::new("generate-cp", cfg);
            r.seed(seed);
            r.dim("domain", domain.dim());
            r.dim("codomain", codomain.dim());
            r.check_flag("cp", is_cp(&map, cfg)?);
            let file = InstanceFile::new(Payload::CpMapProblem {
                map: LinearMapJson::from_linear_map(&map),
            });
            (file, r)
        }
        GenerateKind::Phimap {
            domain,
            codomain,
            gens,
            ambient,
            rank,
            pad,
            seed,
        } => {
            let seed = resolve_seed(*seed)?;
            let domain = AlgebraSpec::new(domain.clone())?;
            let codomain = AlgebraSpec::new(codomain.clone())?;
            let ambient = ambient.unwrap_or(*gens);
            let e = modfactor::generate::random_module(&domain, *gens, ambient, seed, cfg)?;
            let inst = modfactor::generate::random_phi_map(
                &e,
                &codomain,
                *rank,
                *pad,
                seed.wrapping_add(1),
                cfg,
            )?;
            let mut r = Report::new("generate-phimap", cfg);
            r.seed(seed);
            r.dim("domain", e.dim(cfg)?);
            r.dim("codomain", inst.t.codomain().dim(cfg)?);
            r.check_defect(
                "phi_map",
                phi_map_defect(&inst.t, &inst.phi, cfg)?,
                cfg.verify_tol,
            );
            let file = InstanceFile::new(Payload::PhiMapProblem {
                t: ModuleMapJson::from_module_map(&inst.t),
                phi: Some(LinearMapJson::from_linear_map(&inst.phi)),
            });
            (file, r)
        }
    };
    match out {
        Some(path) => {
            write_instance(&file, path)?;
            Ok(Some(report))
        }
        None => {
            println!("{}", file.to_json_string()?);
            Ok(None)
        }
    }
}
