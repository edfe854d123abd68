//! `hfp`: command-line front end for sections, homotopy fixed points, Čech
//! nerves of Galois sets, group cohomology and Postnikov towers.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use hfp_core::catalog;
use hfp_core::classifying::nerve;
use hfp_core::cohomology::{e2_page, group_cohomology_with_budget, Coefficients, DEFAULT_COCHAIN_BUDGET};
use hfp_core::etale::{cech_nerve, fixed_subcomplex, rational_points_surjection, structure_map, GSetScheme, RigidCovering};
use hfp_core::group::Extension;
use hfp_core::pipeline::run_pipeline;
use hfp_core::postnikov::verify_homotopy_groups;
use hfp_core::sections::{enumerate_sections, pi0_map_over_bg, tower_sections, verify_profinsection};
use hfp_core::simplicial::{pi0, pi1_image_onto};
use hfp_core::workspace::{Workspace, WorkspaceError};

#[derive(Parser)]
#[command(name = "hfp", version, about = "Homotopy fixed points of finite Galois models")]
struct Cli {
    /// Workspace files or directories of `.toml` files.
    #[arg(long = "workspace", short = 'w', global = true)]
    workspace: Vec<PathBuf>,
    #[arg(long, default_value_t = 3, global = true)]
    trunc_dim: usize,
    /// Number of tower levels to use; defaults to the whole tower.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SchemeArgs {
    #[arg(long)]
    scheme: String,
    /// Tower level of the cover.
    #[arg(long)]
    level: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Section classes of an extension, or of every level of an extension tower.
    Sections {
        #[arg(long, required_unless_present = "ext_tower")]
        extension: Option<String>,
        #[arg(long, conflicts_with = "extension")]
        ext_tower: Option<String>,
    },
    /// Compare section classes with homotopy classes of maps over BG.
    VerifyBijection {
        /// Extension ids; builtin corpus names are accepted too.
        #[arg(long, required_unless_present = "all_builtin")]
        extension: Vec<String>,
        /// Run on every builtin corpus extension.
        #[arg(long)]
        all_builtin: bool,
    },
    /// π₀ of the space of maps BG → Bπ over BG.
    HfpPi0 {
        #[arg(long)]
        extension: String,
    },
    /// The map from fixed components to homotopy fixed point classes.
    Eta(SchemeArgs),
    /// The Čech nerve of the canonical cover.
    CechNerve {
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Base-change the scheme to this tower level first.
        #[arg(long)]
        field_level: Option<usize>,
    },
    /// The structure map of the Čech nerve to the classifying space.
    StructureMap(SchemeArgs),
    /// Simplices of the Čech nerve over the top field fixed by the Galois action.
    FixedPoints(SchemeArgs),
    /// The map from rational points to fixed components.
    RationalPoints(SchemeArgs),
    /// Group cohomology of a module, or an E₂ page.
    Cohomology {
        #[arg(long = "module-id")]
        module_id: String,
        #[arg(long, default_value_t = 1)]
        degree: usize,
        /// Print `H^s` for all `s ≤ degree` as one E₂ row.
        #[arg(long)]
        e2: bool,
        #[arg(long, default_value_t = DEFAULT_COCHAIN_BUDGET)]
        budget: usize,
    },
    /// Assemble a two-stage Postnikov tower and check it.
    PostnikovAssemble {
        #[arg(long)]
        postnikov: String,
    },
    /// X(k) → π₀(fixed) → π₀(hfp) level by level.
    Pipeline {
        #[arg(long)]
        scheme: String,
    },
}

enum Failure {
    Validation(String),
    Verification(Value),
}

impl From<hfp_core::Error> for Failure {
    fn from(e: hfp_core::Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<WorkspaceError> for Failure {
    fn from(e: WorkspaceError) -> Self {
        Failure::Validation(e.to_string())
    }
}

type Outcome = Result<Value, Failure>;

fn lookup<'a, T>(map: &'a std::collections::BTreeMap<String, T>, kind: &str, id: &str) -> Result<&'a T, Failure> {
    map.get(id).ok_or_else(|| Failure::Validation(format!("unknown {kind} id `{id}`")))
}

fn extension(ws: &Workspace, id: &str) -> Result<Extension, Failure> {
    ws.extensions
        .get(id)
        .cloned()
        .or_else(|| catalog::corpus_extension(id))
        .ok_or_else(|| Failure::Validation(format!("unknown extension id `{id}`")))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn verdict(pass: bool, report: Value) -> Outcome {
    if pass {
        Ok(report)
    } else {
        Err(Failure::Verification(report))
    }
}

fn cover_level(scheme: &GSetScheme, level: Option<usize>) -> usize {
    level.unwrap_or(scheme.tower().depth() - 1)
}

fn run(cli: &Cli, ws: &Workspace) -> Outcome {
    let n = cli.trunc_dim;
    match &cli.command {
        Command::Sections { extension: ext, ext_tower } => {
            if let Some(t) = ext_tower {
                let tower = lookup(&ws.ext_towers, "extension tower", t)?;
                let depth = cli.depth.unwrap_or(tower.depth()).clamp(1, tower.depth());
                let levels: Vec<Value> = (0..depth)
                    .map(|i| {
                        let s = enumerate_sections(tower.level(i));
                        json!({ "level": i, "total_sections": s.total_section_count(), "class_sizes": s.class_sizes() })
                    })
                    .collect();
                let report = tower_sections(tower)?;
                return Ok(json!({ "ext_tower": t, "levels": levels, "tower": to_value(&report) }));
            }
            let id = ext.as_deref().expect("clap requires one");
            let s = enumerate_sections(&extension(ws, id)?);
            Ok(json!({
                "extension": id,
                "total_sections": s.total_section_count(),
                "class_count": s.class_count(),
                "class_sizes": s.class_sizes(),
                "representatives": s.classes.iter().map(|c| &s.sections[c[0]]).collect::<Vec<_>>(),
            }))
        }
        Command::VerifyBijection { extension: ids, all_builtin } => {
            let mut cases: Vec<(String, Extension)> = ids.iter().map(|id| Ok((id.clone(), extension(ws, id)?))).collect::<Result<_, Failure>>()?;
            if *all_builtin {
                cases.extend(catalog::extension_corpus());
            }
            let mut rows = Vec::new();
            let mut pass = true;
            for (id, e) in cases {
                let r = verify_profinsection(&e, n)?;
                pass &= r.pass;
                rows.push(json!({ "extension": id, "order": e.total().order(), "report": to_value(&r) }));
            }
            verdict(pass, json!({ "trunc_dim": n, "cases": rows, "verdict": if pass { "PASS" } else { "FAIL" } }))
        }
        Command::HfpPi0 { extension: id } => {
            let e = extension(ws, id)?;
            let bpi = nerve(e.total(), n)?;
            let p = hfp_core::classifying::nerve_map(e.projection(), n)?;
            let classes = pi0_map_over_bg(e.quotient(), &bpi.with_basepoint(None), &p)?;
            Ok(json!({
                "extension": id,
                "trunc_dim": n,
                "maps": classes.maps.len(),
                "classes": classes.class_count(),
                "class_sizes": classes.classes.iter().map(Vec::len).collect::<Vec<_>>(),
            }))
        }
        Command::Eta(a) => {
            let scheme = lookup(&ws.schemes, "scheme", &a.scheme)?;
            let level = cover_level(scheme, a.level);
            let report = run_pipeline(&a.scheme, scheme, Some(level + 1), n)?;
            let l = &report.levels[level];
            Ok(json!({
                "scheme": a.scheme,
                "level": level,
                "fixed_components": l.fixed_components,
                "hfp_classes": l.hfp_classes,
                "hfp_error": l.hfp_error,
                "images": l.eta,
                "surjective": l.eta_surjective,
                "injective": l.eta_injective,
            }))
        }
        Command::CechNerve { scheme: a, field_level } => {
            let mut scheme = lookup(&ws.schemes, "scheme", &a.scheme)?.clone();
            if let Some(f) = field_level {
                scheme = scheme.base_change(*f)?;
            }
            let level = cover_level(&scheme, a.level);
            let nv = cech_nerve(&RigidCovering::canonical(&scheme, level)?, n)?;
            let set = nv.set();
            Ok(json!({
                "scheme": a.scheme,
                "level": level,
                "field_level": field_level,
                "trunc_dim": n,
                "counts": set.counts(),
                "nondegenerate": (0..=n).map(|m| set.nondegenerate(m).len()).collect::<Vec<_>>(),
                "vertices": nv.nerve.labels[0].iter().map(|v| v[0].0).collect::<Vec<_>>(),
                "components": pi0(set),
            }))
        }
        Command::StructureMap(a) => {
            let scheme = lookup(&ws.schemes, "scheme", &a.scheme)?;
            let level = cover_level(scheme, a.level);
            let nv = cech_nerve(&RigidCovering::canonical(scheme, level)?, n)?;
            let f = structure_map(&nv, level)?;
            let gamma = scheme.tower().level(level);
            let bg = nerve(gamma, n)?;
            let connected = pi0(nv.set()).len() == 1;
            let pi1_onto = if connected { Some(pi1_image_onto(&nv.set().clone().with_basepoint(Some(0)), &f, gamma)?) } else { None };
            Ok(json!({
                "scheme": a.scheme,
                "level": level,
                "galois_order": gamma.order(),
                "isomorphism": f.is_bijective(&bg),
                "pi1_surjective": pi1_onto,
                "images": f.levels(),
            }))
        }
        Command::FixedPoints(a) => {
            let scheme = lookup(&ws.schemes, "scheme", &a.scheme)?;
            let level = cover_level(scheme, a.level);
            let over_top = scheme.base_change(scheme.tower().depth() - 1)?;
            let nv = cech_nerve(&RigidCovering::canonical(&over_top, level)?, n)?;
            let (fixed, kept) = fixed_subcomplex(&nv)?;
            Ok(json!({
                "scheme": a.scheme,
                "level": level,
                "counts": fixed.counts(),
                "fixed_simplices": kept,
                "components": pi0(&fixed).into_iter().map(|c| c.into_iter().map(|v| kept[0][v]).collect::<Vec<_>>()).collect::<Vec<_>>(),
            }))
        }
        Command::RationalPoints(a) => {
            let scheme = lookup(&ws.schemes, "scheme", &a.scheme)?;
            let level = cover_level(scheme, a.level);
            let over_top = scheme.base_change(scheme.tower().depth() - 1)?;
            let nv = cech_nerve(&RigidCovering::canonical(&over_top, level)?, n)?;
            let r = rational_points_surjection(scheme, &nv)?;
            let pass = r.surjective && r.vertices_are_rational;
            verdict(pass, json!({ "scheme": a.scheme, "level": level, "report": to_value(&r) }))
        }
        Command::Cohomology { module_id, degree, e2, budget } => {
            let m = lookup(&ws.modules, "module", module_id)?;
            if *e2 {
                let page = e2_page(m.group(), &[Coefficients::Abelian(m.clone())], *degree, *budget)?;
                return Ok(json!({ "module": module_id, "s_max": degree, "row": to_value(&page.entries[0]) }));
            }
            let h = group_cohomology_with_budget(m, *degree, *budget)?;
            Ok(json!({
                "module": module_id,
                "degree": degree,
                "order": h.order(),
                "invariant_factors": h.invariant_factors,
                "elementary_divisors": h.elementary_divisors,
            }))
        }
        Command::PostnikovAssemble { postnikov } => {
            let data = lookup(&ws.postnikov, "postnikov", postnikov)?;
            let tower = data.assemble(n)?;
            let top = &tower.top().space;
            let report = verify_homotopy_groups(top, &[data.pi1.order(), data.pi2.order()]);
            let fibrations = tower.bonding_fibrations()?;
            let pass = report.all_verifiable_pass() && fibrations.iter().all(|f| f.holds);
            verdict(
                pass,
                json!({
                    "postnikov": postnikov,
                    "trunc_dim": n,
                    "stage_counts": tower.stages().iter().map(|s| s.space.counts().to_vec()).collect::<Vec<_>>(),
                    "homotopy": to_value(&report),
                    "bonding_fibrations": fibrations.iter().map(|f| f.holds).collect::<Vec<_>>(),
                    "verdict": if pass { "PASS" } else { "FAIL" },
                }),
            )
        }
        Command::Pipeline { scheme: id } => {
            let scheme = lookup(&ws.schemes, "scheme", id)?;
            let r = run_pipeline(id, scheme, cli.depth, n)?;
            let pass = r.verdict == "PASS";
            verdict(pass, to_value(&r))
        }
    }
}

fn emit(cli: &Cli, value: &Value) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(value).expect("json");
    text.push('\n');
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let ws = match Workspace::load(&cli.workspace) {
        Ok(ws) => ws,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let (value, code) = match run(&cli, &ws) {
        Ok(v) => (v, 0),
        Err(Failure::Verification(v)) => (v, 3),
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&cli, &value) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
