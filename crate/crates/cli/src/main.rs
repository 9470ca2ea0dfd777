use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use ualg::catalog::{Catalog, CATALOG_ENV};
use ualg::commutator::{centralizer, higher_commutator, is_nilpotent, nilpotence_series};
use ualg::congruence::{con_lattice, covers};
use ualg::construct::{
    breve, check_dalg_identities, construct_c, coordinate_terms, lift_term, star_congruence, star_subuniverse,
    ConstructedAlgebra, ConstructionSidecar, SortLayout,
};
use ualg::smp::{
    build_k_star, check_d_central, check_d_coherent, check_hypothesis_snilp_centralizers, reduce_instance, smp_oracle,
    CoherenceReport, SmpInstance, SmpInstanceJson,
};
use ualg::supernil::{cross_check_via_c, decide_supernilpotent, has_maltsev_term};
use ualg::tct::classify_type;
use ualg::{Error, FiniteAlgebra, Limits, Partition, SortedHom, Term, TupleSet};

#[derive(Parser)]
#[command(name = "ualg", version, about = "Computations on finite algebras")]
struct Cli {
    /// Emit JSON on stdout
    #[arg(long, global = true)]
    json: bool,
    /// Thread hint for parallel kernels
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory of algebra JSON files
    #[arg(long, global = true, env = CATALOG_ENV)]
    catalog: Option<PathBuf>,
    /// Largest algebra whose unary polynomials are enumerated
    #[arg(long, global = true)]
    poly_max_size: Option<usize>,
    /// Maximum number of tuples in a subuniverse closure
    #[arg(long, global = true)]
    closure_cap: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the congruences
    Con {
        alg: String,
        /// Print the Hasse diagram in DOT
        #[arg(long)]
        dot: bool,
    },
    /// Higher commutator of two or more congruences
    Commutator {
        alg: String,
        #[arg(num_args = 2.., required = true)]
        betas: Vec<String>,
    },
    /// Centralizer (0:beta)
    Centralizer { alg: String, beta: String },
    /// Lower central series of a congruence
    Nilpotence { alg: String, alpha: String },
    /// Decide supernilpotence of a congruence
    Supernil {
        alg: String,
        alpha: String,
        #[arg(long)]
        assert_omits_type1: bool,
        #[arg(long)]
        cross_check: bool,
    },
    /// Build the constructed algebra of the natural map with kernel `chi`
    Construct {
        alg: String,
        chi: String,
        /// Write the algebra here and its sort data to FILE.sidecar.json
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Image of a congruence or subuniverse in the constructed algebra
    Star(StarArgs),
    /// Lift base terms to a term of the constructed algebra
    LiftTerm {
        alg: String,
        chi: String,
        /// One idempotent base term, or one coordinate term per sort
        #[arg(long = "term", required = true)]
        terms: Vec<String>,
        /// Number of variables of the lifted term
        #[arg(long)]
        arity: Option<usize>,
    },
    /// Coordinate terms of a term of the constructed algebra
    CoordinateTerms {
        alg: String,
        chi: String,
        #[arg(long)]
        term: String,
    },
    /// Subpower membership
    #[command(subcommand)]
    Smp(SmpCmd),
    /// Tame congruence theory
    #[command(subcommand)]
    Tct(TctCmd),
    /// Validators
    #[command(subcommand)]
    Check(CheckCmd),
    /// Search for a Maltsev term
    Maltsev { alg: String },
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "what")]
struct StarTarget {
    #[arg(long)]
    congruence: Option<String>,
    /// JSON file with {"sizes": [...], "tuples": [[...]]}
    #[arg(long)]
    subuniverse: Option<PathBuf>,
}

#[derive(Args)]
struct StarArgs {
    alg: String,
    chi: String,
    #[command(flatten)]
    target: StarTarget,
}

#[derive(Subcommand)]
enum SmpCmd {
    /// Decide membership by closure
    Solve { instance: PathBuf },
    /// Reduce a coherent instance to one over constructed algebras
    Reduce {
        instance: PathBuf,
        #[arg(short, long, default_value_t = 2)]
        d: usize,
        /// Generating algebras of the class; defaults to the components
        #[arg(long = "k", num_args = 1..)]
        ks: Vec<String>,
    },
    /// Check the coherence conditions for a given d
    CheckCoherent {
        instance: PathBuf,
        #[arg(short, long, default_value_t = 2)]
        d: usize,
    },
    /// Check the centrality conditions for a given d
    CheckCentral {
        instance: PathBuf,
        #[arg(short, long, default_value_t = 2)]
        d: usize,
    },
    /// Group the subdirectly irreducible members of HS(K) and build their constructed algebras
    BuildKstar {
        #[arg(required = true)]
        algebras: Vec<String>,
    },
    /// Decide supernilpotence of every monolith centralizer in HS(K)
    CheckHypothesis {
        #[arg(required = true)]
        algebras: Vec<String>,
        #[arg(long)]
        assert_omits_type1: bool,
    },
}

#[derive(Subcommand)]
enum TctCmd {
    /// Type of a covering pair
    Type { alg: String, delta: String, theta: String },
}

#[derive(Subcommand)]
enum CheckCmd {
    /// Check the defining identities of a constructed algebra file with its sidecar
    Identities { file: PathBuf },
}

struct Output {
    json: Value,
    text: String,
    verdict: Option<bool>,
}

impl Output {
    fn new(json: Value, text: impl Into<String>) -> Self {
        Output {
            json,
            text: text.into(),
            verdict: None,
        }
    }

    fn verdict(mut self, v: bool) -> Self {
        self.verdict = Some(v);
        self
    }
}

struct Ctx {
    catalog: Catalog,
    limits: Limits,
}

impl Ctx {
    fn alg(&self, name: &str) -> Result<FiniteAlgebra, Error> {
        self.catalog.resolve(name)
    }

    fn construction(&self, alg: &str, chi: &str) -> Result<ConstructedAlgebra, Error> {
        let a = self.alg(alg)?;
        let kernel = part(&a, chi)?;
        construct_c(&SortedHom::natural(&a, &kernel)?, &self.limits)
    }

    fn instance(&self, path: &Path) -> Result<SmpInstance, Error> {
        let j: SmpInstanceJson = serde_json::from_str(&fs::read_to_string(path)?)?;
        SmpInstance::from_json(&j, &self.catalog)
    }
}

fn part(a: &FiniteAlgebra, text: &str) -> Result<Partition, Error> {
    let p = Partition::parse(a.size(), text)?;
    a.ensure_congruence(&p)?;
    Ok(p)
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn lines<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join("\n")
}

fn coherence_output(r: &CoherenceReport) -> Output {
    let text = r
        .conditions
        .iter()
        .map(|c| format!("{:6} {} {}", c.name, if c.passed { "ok  " } else { "FAIL" }, c.detail))
        .collect::<Vec<_>>()
        .join("\n");
    Output::new(to_value(r), format!("{text}\nholds: {}", r.holds)).verdict(r.holds)
}

fn base_reference(arg: &str) -> String {
    let p = Path::new(arg);
    if p.is_file() {
        if let Ok(abs) = p.canonicalize() {
            return abs.to_string_lossy().into_owned();
        }
    }
    arg.to_string()
}

fn sidecar_path(file: &Path) -> PathBuf {
    let mut s = file.as_os_str().to_owned();
    s.push(".sidecar.json");
    PathBuf::from(s)
}

fn run(cli: &Cli, ctx: &Ctx) -> Result<Output, Error> {
    let limits = &ctx.limits;
    Ok(match &cli.cmd {
        Cmd::Con { alg, dot } => {
            let a = ctx.alg(alg)?;
            let cons = con_lattice(&a, limits)?;
            if *dot {
                let mut s = String::from("digraph con {\n  rankdir=BT;\n");
                for (i, c) in cons.iter().enumerate() {
                    s.push_str(&format!("  n{i} [label=\"{}\"];\n", c.to_bar_string()));
                }
                for (i, j) in covers(&cons) {
                    s.push_str(&format!("  n{i} -> n{j};\n"));
                }
                s.push('}');
                Output::new(json!(s), s)
            } else {
                Output::new(to_value(&cons), lines(cons.iter().map(|c| c.to_bar_string())))
            }
        }
        Cmd::Commutator { alg, betas } => {
            let a = ctx.alg(alg)?;
            let ps = betas.iter().map(|b| part(&a, b)).collect::<Result<Vec<_>, _>>()?;
            if !limits.commutator_arity_allowed(ps.len(), a.size()) {
                return Err(Error::CapExceeded {
                    what: "commutator arity".into(),
                    needed: ps.len() as u128,
                    cap: limits.max_commutator_arity as u128,
                });
            }
            let c = higher_commutator(&a, &ps, limits)?;
            Output::new(to_value(&c), c.to_bar_string())
        }
        Cmd::Centralizer { alg, beta } => {
            let a = ctx.alg(alg)?;
            let c = centralizer(&a, &part(&a, beta)?, limits)?;
            Output::new(to_value(&c), c.to_bar_string())
        }
        Cmd::Nilpotence { alg, alpha } => {
            let a = ctx.alg(alg)?;
            let al = part(&a, alpha)?;
            let series = nilpotence_series(&a, &al, limits)?;
            let nil = is_nilpotent(&a, &al, limits)?;
            Output::new(
                json!({ "series": series, "nilpotent": nil }),
                format!("{}\nnilpotent: {nil}", lines(series.iter().map(|p| p.to_bar_string()))),
            )
            .verdict(nil)
        }
        Cmd::Supernil {
            alg,
            alpha,
            assert_omits_type1,
            cross_check,
        } => {
            let a = ctx.alg(alg)?;
            let al = part(&a, alpha)?;
            let cert = if *cross_check {
                cross_check_via_c(&a, &al, *assert_omits_type1, limits)?
            } else {
                decide_supernilpotent(&a, &al, *assert_omits_type1, limits)?
            };
            let mut text = format!("supernilpotent: {}", cert.supernilpotent);
            for (w, p) in cert.witnesses.iter().zip(&cert.primes) {
                text.push_str(&format!("\n  {} (p = {p})", w.to_bar_string()));
            }
            if let Some(f) = &cert.failure {
                text.push_str(&format!("\nfailure: {f:?}"));
            }
            Output::new(to_value(&cert), text).verdict(cert.supernilpotent)
        }
        Cmd::Construct { alg, chi, out } => {
            let c = ctx.construction(alg, chi)?;
            let sidecar = ConstructionSidecar {
                base: base_reference(alg),
                ..c.sidecar()
            };
            let aj = c.algebra().to_json();
            if let Some(path) = out {
                fs::write(path, serde_json::to_string_pretty(&aj)?)?;
                fs::write(sidecar_path(path), serde_json::to_string_pretty(&sidecar)?)?;
                Output::new(
                    json!({ "written": path, "size": c.size(), "sorts": sidecar.sorts }),
                    format!("wrote {} ({} elements, {} operations)", path.display(), c.size(), c.algebra().signature().len()),
                )
            } else {
                let v = json!({ "algebra": aj, "sidecar": sidecar });
                Output::new(v.clone(), serde_json::to_string_pretty(&v)?)
            }
        }
        Cmd::Star(StarArgs { alg, chi, target }) => {
            let c = ctx.construction(alg, chi)?;
            if let Some(beta) = &target.congruence {
                let s = star_congruence(&c, &part(c.base(), beta)?)?;
                Output::new(to_value(&s), s.to_bar_string())
            } else {
                let path = target.subuniverse.as_ref().expect("clap group");
                let raw: TupleSet = serde_json::from_str(&fs::read_to_string(path)?)?;
                let b = TupleSet::new(raw.sizes().to_vec(), raw.tuples().to_vec())?;
                let layouts: Vec<&SortLayout> = vec![c.layout(); b.width()];
                let s = star_subuniverse(&b, &layouts)?;
                Output::new(to_value(&s), lines(s.tuples().iter().map(|t| format!("{t:?}"))))
            }
        }
        Cmd::LiftTerm { alg, chi, terms, arity } => {
            let c = ctx.construction(alg, chi)?;
            let ts = terms.iter().map(|t| Term::parse(t)).collect::<Result<Vec<_>, _>>()?;
            let m = c.num_sorts();
            let lifted = if ts.len() == 1 && m != 1 {
                let k = arity.unwrap_or_else(|| ts[0].arity());
                breve(&c, &ts[0], k)?
            } else {
                let k = arity.unwrap_or_else(|| ts.iter().map(|t| t.arity().div_ceil(m)).max().unwrap_or(0));
                lift_term(&c, &ts, k)?
            };
            Output::new(json!(lifted.to_string()), lifted.to_string())
        }
        Cmd::CoordinateTerms { alg, chi, term } => {
            let c = ctx.construction(alg, chi)?;
            let coords = coordinate_terms(&c, &Term::parse(term)?)?;
            let strs: Vec<String> = coords.iter().map(|t| t.to_string()).collect();
            Output::new(json!(strs), lines(&strs))
        }
        Cmd::Smp(sc) => smp(sc, ctx)?,
        Cmd::Tct(TctCmd::Type { alg, delta, theta }) => {
            let a = ctx.alg(alg)?;
            let t = classify_type(&a, &part(&a, delta)?, &part(&a, theta)?, limits)?;
            let text = match t.characteristic {
                Some(p) => format!("type {} (characteristic {p})", t.kind),
                None => format!("type {}", t.kind),
            };
            Output::new(to_value(&t), text)
        }
        Cmd::Check(CheckCmd::Identities { file }) => {
            let alg = FiniteAlgebra::load(file)?;
            let sidecar: ConstructionSidecar = serde_json::from_str(&fs::read_to_string(sidecar_path(file))?)?;
            let c = ConstructedAlgebra::from_sidecar(alg, &sidecar, &ctx.catalog)?;
            let r = check_dalg_identities(&c, limits)?;
            let text = match &r.violation {
                None => format!("identities hold ({} checks)", r.checked),
                Some(v) => format!("violated: {v}"),
            };
            Output::new(to_value(&r), text).verdict(r.holds)
        }
        Cmd::Maltsev { alg } => {
            let a = ctx.alg(alg)?;
            match has_maltsev_term(&a, limits)? {
                Some(t) => Output::new(json!({ "maltsev": t.to_string() }), t.to_string()).verdict(true),
                None => Output::new(json!({ "maltsev": null }), "no Maltsev term").verdict(false),
            }
        }
    })
}

fn smp(cmd: &SmpCmd, ctx: &Ctx) -> Result<Output, Error> {
    let limits = &ctx.limits;
    let resolve_all = |names: &[String]| names.iter().map(|n| ctx.alg(n)).collect::<Result<Vec<_>, _>>();
    Ok(match cmd {
        SmpCmd::Solve { instance } => {
            let yes = smp_oracle(&ctx.instance(instance)?, limits)?;
            Output::new(json!({ "member": yes }), if yes { "yes" } else { "no" }).verdict(yes)
        }
        SmpCmd::CheckCoherent { instance, d } => coherence_output(&check_d_coherent(&ctx.instance(instance)?, *d, limits)?),
        SmpCmd::CheckCentral { instance, d } => coherence_output(&check_d_central(&ctx.instance(instance)?, *d, limits)?),
        SmpCmd::Reduce { instance, d, ks } => {
            let inst = ctx.instance(instance)?;
            let ks = if ks.is_empty() {
                let mut v: Vec<FiniteAlgebra> = Vec::new();
                for c in &inst.components {
                    if !v.contains(c) {
                        v.push(c.clone());
                    }
                }
                v
            } else {
                resolve_all(ks)?
            };
            let classes = build_k_star(&ks, limits)?;
            let red = reduce_instance(&inst, &classes, *d, limits)?;
            let v = json!({
                "class": red.class,
                "chis": red.chis.iter().map(|c| c.map().to_vec()).collect::<Vec<_>>(),
                "paddings": red.paddings,
                "cells_touched": red.cells_touched,
                "algebras": red.reduced.components.iter().map(|a| a.to_json()).collect::<Vec<_>>(),
                "instance": red.reduced.to_json(),
            });
            let text = format!(
                "class {}\npaddings {:?}\ngenerators {:?}\ntarget {:?}\ncells touched {}",
                red.class.unwrap_or(0),
                red.paddings,
                red.reduced.generators,
                red.reduced.target,
                red.cells_touched
            );
            Output::new(v, text)
        }
        SmpCmd::BuildKstar { algebras } => {
            let classes = build_k_star(&resolve_all(algebras)?, limits)?;
            let v: Vec<Value> = classes
                .iter()
                .map(|c| {
                    json!({
                        "reference": c.reference.to_json(),
                        "characteristic": c.characteristic,
                        "members": c.members.iter().map(|m| m.name().to_string()).collect::<Vec<_>>(),
                        "reduced": c.reduced.iter().map(|r| json!({
                            "size": r.size(),
                            "chi": r.chi().map(),
                            "base": r.base().name(),
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let text = classes
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    format!(
                        "class {i}: |I| = {}, characteristic {:?}, {} members, {} reduced algebras (sizes {:?})",
                        c.reference.size(),
                        c.characteristic,
                        c.members.len(),
                        c.reduced.len(),
                        c.reduced.iter().map(|r| r.size()).collect::<Vec<_>>()
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            Output::new(json!(v), if text.is_empty() { "no classes".into() } else { text })
        }
        SmpCmd::CheckHypothesis {
            algebras,
            assert_omits_type1,
        } => {
            let entries = check_hypothesis_snilp_centralizers(&resolve_all(algebras)?, *assert_omits_type1, limits)?;
            let holds = entries.iter().all(|e| e.supernilpotent);
            let mut text = lines(entries.iter().map(|e| {
                format!("{}: centralizer {} supernilpotent {}", e.algebra, e.centralizer.to_bar_string(), e.supernilpotent)
            }));
            if !text.is_empty() {
                text.push('\n');
            }
            text.push_str(&format!("holds: {holds}"));
            Output::new(json!({ "entries": entries, "holds": holds }), text).verdict(holds)
        }
    })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CapExceeded { .. } => 3,
        Error::Inconsistency(_) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut limits = Limits::default();
    if let Some(n) = cli.poly_max_size {
        limits.unary_poly_max_size = n;
    }
    if let Some(n) = cli.closure_cap {
        limits.closure_cap = n;
    }
    let ctx = Ctx {
        catalog: Catalog::new(cli.catalog.clone()),
        limits,
    };
    match run(&cli, &ctx) {
        Ok(out) => {
            let text = if cli.json {
                serde_json::to_string_pretty(&out.json).expect("json")
            } else {
                out.text
            };
            let _ = writeln!(std::io::stdout(), "{text}");
            ExitCode::from(if out.verdict == Some(false) { 1 } else { 0 })
        }
        Err(e) => {
            if cli.json {
                let _ = writeln!(std::io::stdout(), "{}", json!({ "error": e.to_string(), "exit": exit_code(&e) }));
            }
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
