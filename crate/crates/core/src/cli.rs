//! Command-line front end. [`run`] parses arguments, dispatches and returns
//! the exit code together with the rendered output, so it can be driven from
//! tests without a subprocess.
//!
//! Exit codes: 0 success, 1 bad input or arguments, 2 a verification failed.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::encode::{self, GroupTriple};
use crate::groups::{self, catalog, catalog_search_weak_not_strong, FiniteGroup, GroupHom, SectionMode};
use crate::skew;
use crate::structures::{self, map_to_json, SortedStructure};
use crate::ucp::{self, PsiChoice};
use crate::uniform::{self, QuotientMode};

/// Overrides the default element bound of the structure searches.
pub const BOUND_ENV: &str = "NATDEF_MAX_ELEMENTS";

#[derive(Debug, Parser)]
#[command(
    name = "natdef",
    version,
    about = "Automorphism groups, splittings and uniform reconstruction of finite structures"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Auto,
    Exhaustive,
    Backtracking,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum QuotientArg {
    Representative,
    Full,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count and list the automorphisms of a structure.
    Aut {
        #[arg(long)]
        structure: PathBuf,
    },
    /// Isomorphisms between two structures.
    Iso {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
    /// Classify every section of a surjective homomorphism.
    Split {
        #[arg(long)]
        hom: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        #[arg(long, default_value_t = groups::DEFAULT_SECTION_BOUND)]
        bound: u128,
    },
    /// Classify one section, given as a list of indices into the domain.
    WeakSplit {
        #[arg(long)]
        hom: PathBuf,
        #[arg(long)]
        psi: PathBuf,
    },
    /// Check the clauses of the problem of a two-sorted structure.
    UcpCheck {
        #[arg(long)]
        structure: PathBuf,
        /// Section as `[{"a": perm, "b": [[..], [..]]}]`; searched if absent.
        #[arg(long)]
        psi: Option<PathBuf>,
    },
    /// The three problems of a three-sorted structure.
    DeriveTriple {
        #[arg(long)]
        structure: PathBuf,
    },
    /// Sampled law checks for the skew product over a base group.
    Skew {
        /// Group file or catalog name such as `S3`.
        #[arg(long)]
        base: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Cayley table of the cyclic analogue `Z/k ⋉ G^k`.
    CyclicSkew {
        #[arg(long)]
        base: String,
        #[arg(long)]
        k: usize,
    },
    /// Three-sorted encoding of a chain of surjections and its theta check.
    Encode3 {
        #[arg(long)]
        phi12: PathBuf,
        #[arg(long)]
        phi23: PathBuf,
    },
    /// Attach a group acting on a two-sorted structure as a third sort.
    Attach {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        phi23: PathBuf,
        #[arg(long)]
        phi13: PathBuf,
    },
    /// Rebuild a structure over a target first sort and verify the construction.
    Uniformize(UniformArgs),
    /// Verify the construction without emitting the structure.
    Verify(UniformArgs),
    /// Surjections G -> G/N over the catalog with a weak splitting but no splitting.
    CatalogSearch {
        #[arg(long, default_value_t = 16)]
        max_order: usize,
    },
}

#[derive(Debug, clap::Args)]
struct UniformArgs {
    #[arg(long)]
    structure: PathBuf,
    #[arg(long)]
    psi: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    copies: usize,
    /// First-sort target; defaults to the first sort of the structure.
    #[arg(long)]
    target: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = QuotientArg::Representative)]
    mode: QuotientArg,
}

/// Exit code and rendered output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    ok: bool,
    text: String,
    json: Value,
}

impl Report {
    fn new(ok: bool, text: impl Into<String>, json: Value) -> Self {
        Report {
            ok,
            text: text.into(),
            json,
        }
    }
}

struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let report = match dispatch(&cli) {
        Ok(r) => r,
        Err(InputError(msg)) => {
            return Outcome {
                code: 1,
                stdout: String::new(),
                stderr: format!("error: {msg}\n"),
            };
        }
    };
    let mut rendered = match cli.format {
        Format::Text => report.text,
        Format::Json => serde_json::to_string_pretty(&report.json).expect("reports serialize"),
    };
    if !rendered.ends_with('\n') {
        rendered.push('\n');
    }
    let code = if report.ok { 0 } else { 2 };
    match &cli.out {
        Some(path) => match fs::write(path, &rendered) {
            Ok(()) => Outcome {
                code,
                stdout: String::new(),
                stderr: String::new(),
            },
            Err(e) => Outcome {
                code: 1,
                stdout: String::new(),
                stderr: format!("error: writing {}: {e}\n", path.display()),
            },
        },
        None => Outcome {
            code,
            stdout: rendered,
            stderr: String::new(),
        },
    }
}

/// Element bound for structure searches, from [`BOUND_ENV`] if set.
pub fn element_bound() -> Result<usize, String> {
    match std::env::var(BOUND_ENV) {
        Ok(v) => v.parse().map_err(|_| format!("{BOUND_ENV}={v} is not a number")),
        Err(_) => Ok(structures::DEFAULT_MAX_ELEMENTS),
    }
}

fn read_json(path: &Path) -> Result<Value, InputError> {
    let text = fs::read_to_string(path).map_err(|e| InputError(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn with_path<T, E: std::fmt::Display>(path: &Path, r: Result<T, E>) -> Result<T, InputError> {
    r.map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_structure(path: &Path) -> Result<SortedStructure, InputError> {
    with_path(path, SortedStructure::from_json_value(&read_json(path)?))
}

fn load_hom(path: &Path) -> Result<GroupHom, InputError> {
    with_path(path, GroupHom::from_json_value(&read_json(path)?))
}

/// A group file, or a name from the catalog of order at most 32.
fn load_group(arg: &str) -> Result<Arc<FiniteGroup>, InputError> {
    let path = Path::new(arg);
    if path.exists() {
        return Ok(Arc::new(with_path(
            path,
            FiniteGroup::from_json_value(&read_json(path)?),
        )?));
    }
    catalog(32)?
        .into_iter()
        .find(|e| e.name == arg)
        .map(|e| e.group)
        .ok_or_else(|| InputError(format!("{arg}: neither a file nor a catalog group")))
}

fn dispatch(cli: &Cli) -> Result<Report, InputError> {
    let bound = element_bound().map_err(InputError)?;
    match &cli.command {
        Command::Aut { structure } => aut(&load_structure(structure)?, bound),
        Command::Iso { left, right } => iso(&load_structure(left)?, &load_structure(right)?, bound),
        Command::Split { hom, mode, bound } => split(&load_hom(hom)?, *mode, *bound),
        Command::WeakSplit { hom, psi } => {
            let phi = load_hom(hom)?;
            let psi: Vec<usize> = with_path(psi, serde_json::from_value(read_json(psi)?))?;
            weak_split(&phi, &psi)
        }
        Command::UcpCheck { structure, psi } => {
            let b = load_structure(structure)?;
            let choice = match psi {
                Some(p) => {
                    let pairs = with_path(p, uniform::psi_from_json(&read_json(p)?))?;
                    PsiChoice::Given(with_path(p, uniform::psi_from_pairs(&b, &pairs, bound))?)
                }
                None => PsiChoice::Search,
            };
            ucp_check(&b, choice, bound)
        }
        Command::DeriveTriple { structure } => derive_triple(&load_structure(structure)?, bound),
        Command::Skew { base, samples } => skew_laws(&load_group(base)?, *samples, cli.seed),
        Command::CyclicSkew { base, k } => cyclic_skew(&load_group(base)?, *k),
        Command::Encode3 { phi12, phi23 } => encode3(load_hom(phi12)?, load_hom(phi23)?),
        Command::Attach {
            structure,
            phi23,
            phi13,
        } => {
            let b = load_structure(structure)?;
            let out = encode::attach_skew(&b, &load_hom(phi23)?, &load_hom(phi13)?)?;
            let text = format!(
                "attached structure: sorts {:?}, sizes {:?}\n{}",
                out.signature.sorts,
                out.sizes,
                out.to_json()
            );
            Ok(Report::new(true, text, out.to_json_value()))
        }
        Command::Uniformize(args) => uniformize(args, bound, true),
        Command::Verify(args) => uniformize(args, bound, false),
        Command::CatalogSearch { max_order } => catalog_report(*max_order),
    }
}

fn aut(s: &SortedStructure, bound: usize) -> Result<Report, InputError> {
    let auts = structures::automorphisms_within(s, bound)?;
    let text = format!("{} automorphisms", auts.len());
    let json = json!({
        "count": auts.len(),
        "automorphisms": auts.iter().map(map_to_json).collect::<Vec<_>>(),
    });
    Ok(Report::new(true, text, json))
}

fn iso(a: &SortedStructure, b: &SortedStructure, bound: usize) -> Result<Report, InputError> {
    let isos = structures::isomorphisms_within(a, b, bound)?;
    let text = if isos.is_empty() {
        "not isomorphic".to_string()
    } else {
        format!("{} isomorphisms", isos.len())
    };
    let json = json!({
        "count": isos.len(),
        "isomorphisms": isos.iter().map(map_to_json).collect::<Vec<_>>(),
    });
    Ok(Report::new(true, text, json))
}

fn split(phi: &GroupHom, mode: ModeArg, bound: u128) -> Result<Report, InputError> {
    let mode = match mode {
        ModeArg::Auto => SectionMode::Auto,
        ModeArg::Exhaustive => SectionMode::Exhaustive,
        ModeArg::Backtracking => SectionMode::Backtracking,
    };
    let report = groups::classify_sections_with(phi, mode, bound)?;
    let text = format!(
        "{}\n{} sections: {} splittings, {} weak-only, {} plain",
        report.summary(),
        report.total_sections,
        report.splitting_count,
        report.weak_count,
        report.section_only_count
    );
    let mut json = serde_json::to_value(&report).expect("reports serialize");
    json["summary"] = json!(report.summary());
    Ok(Report::new(true, text, json))
}

fn weak_split(phi: &GroupHom, psi: &[usize]) -> Result<Report, InputError> {
    let class = groups::classify_section(phi, psi);
    let verdict = match class {
        None => "not a section",
        Some(groups::SectionClass::Splitting) => "splitting",
        Some(groups::SectionClass::WeakSplitting) => "weak splitting, not a homomorphism",
        Some(groups::SectionClass::SectionOnly) => "section, not a weak splitting",
    };
    let ok = groups::is_weak_splitting(phi, psi);
    Ok(Report::new(ok, verdict, json!({"class": class, "weak_splitting": ok})))
}

fn ucp_check(b: &SortedStructure, psi: PsiChoice, bound: usize) -> Result<Report, InputError> {
    let c = ucp::assemble_blocked(b, &[0], psi, bound)?;
    let r = &c.report;
    let mut text = format!(
        "|Aut(B)| = {}, |Aut(A)| = {}, |Z(Aut(B))| = {}\n",
        c.h.order(),
        c.g.order(),
        c.k.len()
    );
    if r.is_ucp() {
        text.push_str("uni-construction problem: section is a splitting");
    } else if r.is_weak_ucp() {
        text.push_str("weak uni-construction problem: section is a weak splitting");
    } else {
        text.push_str(&format!(
            "not a weak uni-construction problem; failed: {}",
            r.failures().join(", ")
        ));
    }
    let json = json!({
        "clauses": r,
        "aut_b": c.h.order(),
        "aut_a": c.g.order(),
        "center": c.k,
        "psi": c.psi,
        "weak_ucp": r.is_weak_ucp(),
        "ucp": r.is_ucp(),
    });
    Ok(Report::new(r.is_weak_ucp(), text, json))
}

fn derive_triple(c: &SortedStructure, bound: usize) -> Result<Report, InputError> {
    let t = ucp::derive_triple_within(c, PsiChoice::Search, bound)?;
    let line = |name: &str, p: &ucp::UniConstructionProblem| {
        format!(
            "{name}: |H| = {}, |G| = {}, weak {}, split {}",
            p.h.order(),
            p.g.order(),
            p.report.is_weak_ucp(),
            p.report.is_ucp()
        )
    };
    let text = format!(
        "{}\n{}\n{}\ncomposition phi13 = phi12 o phi23: {}",
        line("c12", &t.c12),
        line("c23", &t.c23),
        line("c13", &t.c13),
        t.composition_holds
    );
    let part =
        |p: &ucp::UniConstructionProblem| json!({"clauses": p.report, "aut_b": p.h.order(), "aut_a": p.g.order()});
    let json = json!({
        "c12": part(&t.c12),
        "c23": part(&t.c23),
        "c13": part(&t.c13),
        "composition_holds": t.composition_holds,
        "all_weak_ucps": t.all_weak_ucps(),
    });
    Ok(Report::new(t.composition_holds, text, json))
}

fn skew_laws(base: &Arc<FiniteGroup>, samples: usize, seed: u64) -> Result<Report, InputError> {
    let r = skew::check_laws(base, samples, seed);
    let text = format!(
        "seed {seed}: {} samples, associativity failures {}, inverse failures {}\n\
         {} conjugations, failures {}; phi23 o psi0 failures {}\n\
         {} center witnesses, failures {}; phi23 product-law violations {}",
        r.samples,
        r.associativity_failures,
        r.inverse_failures,
        r.conjugations,
        r.conjugation_failures,
        r.section_failures,
        r.witnesses,
        r.witness_failures,
        r.phi23_violations
    );
    Ok(Report::new(
        r.passed(),
        text,
        serde_json::to_value(&r).expect("reports serialize"),
    ))
}

fn cyclic_skew(base: &Arc<FiniteGroup>, k: usize) -> Result<Report, InputError> {
    let g = skew::build_cyclic_skew(k, base)?;
    let text = format!(
        "order {}, abelian {}, center of order {}",
        g.order(),
        g.is_abelian(),
        g.center().len()
    );
    Ok(Report::new(true, text, g.to_json_value()))
}

fn encode3(phi12: GroupHom, phi23: GroupHom) -> Result<Report, InputError> {
    let t = GroupTriple::new(phi12, phi23)?;
    let c = encode::encode_three_sorted(&t)?;
    let r = encode::verify_theta_iso(&t)?;
    let text = format!(
        "|G3| = {}, |Aut| = {}, theta isomorphism {}, restrictions match {}\n{}",
        r.g3_order,
        r.aut_count,
        r.count_matches && r.images_are_automorphisms && r.injective && r.surjective && r.homomorphic,
        r.restrictions_match,
        c.to_json()
    );
    Ok(Report::new(
        r.passed(),
        text,
        json!({"structure": c.to_json_value(), "theta": r}),
    ))
}

fn uniformize(args: &UniformArgs, bound: usize, emit: bool) -> Result<Report, InputError> {
    let b = load_structure(&args.structure)?;
    let psi = match &args.psi {
        Some(p) => {
            let pairs = with_path(p, uniform::psi_from_json(&read_json(p)?))?;
            PsiChoice::Given(with_path(p, uniform::psi_from_pairs(&b, &pairs, bound))?)
        }
        None => PsiChoice::Search,
    };
    let fam = uniform::build_family(&b, psi, args.copies, bound)?;
    let a = match &args.target {
        Some(p) => load_structure(p)?,
        None => b.reduct(&[0])?,
    };
    let claims = uniform::verify_claims(&a, &fam)?;
    let mut text = claims.to_string();
    let mut json = json!({"claims": claims});
    let mut ok = claims.passed();
    if emit {
        let mode = match args.mode {
            QuotientArg::Representative => QuotientMode::Representative,
            QuotientArg::Full => QuotientMode::Full,
        };
        match uniform::uniform_f(&a, &fam, mode) {
            Ok(out) => {
                text.push_str(&format!("\nF(A):\n{}", out.structure.to_json()));
                json["structure"] = out.structure.to_json_value();
            }
            Err(e) => {
                ok = false;
                text.push_str(&format!("\nF(A) failed: {e}"));
                json["error"] = json!(e.to_string());
            }
        }
    }
    Ok(Report::new(ok, text, json))
}

fn catalog_report(max_order: usize) -> Result<Report, InputError> {
    let search = catalog_search_weak_not_strong(max_order)?;
    let mut lines = vec![format!(
        "{} surjections G -> G/N with G of order <= {max_order}",
        search.cases.len()
    )];
    let witnesses: Vec<Value> = search
        .witnesses()
        .map(|c| {
            lines.push(format!(
                "{} / {:?}: {}, {} weak-only sections",
                c.group, c.normal, c.report.summary(), c.report.weak_count
            ));
            json!({"group": c.group, "normal": c.normal, "weak_count": c.report.weak_count, "total_sections": c.report.total_sections})
        })
        .collect();
    lines.push(format!("{} weak-but-not-strong witnesses", witnesses.len()));
    Ok(Report::new(
        true,
        lines.join("\n"),
        json!({"max_order": max_order, "cases": search.cases.len(), "witnesses": witnesses}),
    ))
}
