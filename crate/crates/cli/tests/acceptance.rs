//! Acceptance checks, one line per criterion.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use hfp_core::catalog;
use hfp_core::classifying::nerve;
use hfp_core::cohomology::{group_cohomology, GModule};
use hfp_core::etale::{cech_nerve, galois_action_on_nerve, rational_points_surjection, structure_map, GSetScheme, RigidCovering};
use hfp_core::group::{FiniteGroup, GroupHom, GroupTower};
use hfp_core::postnikov::{two_stage_corpus, verify_homotopy_groups};
use hfp_core::sections::{enumerate_sections, verify_profinsection};
use hfp_core::simplicial::SimplicialMap;
use hfp_core::workspace::Workspace;

const TRUNC: usize = 3;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn test_towers() -> Vec<(&'static str, GroupTower)> {
    let one = FiniteGroup::trivial();
    let z = FiniteGroup::cyclic;
    let over_one = |g: FiniteGroup| GroupTower::new(vec![one.clone(), g.clone()], vec![GroupHom::trivial(&g, &one)]).unwrap();
    let z4 = GroupTower::new(
        vec![one.clone(), z(2), z(4)],
        vec![GroupHom::trivial(&z(2), &one), GroupHom::from_fn(&z(4), &z(2), |x| x % 2).unwrap()],
    )
    .unwrap();
    let s3 = catalog::symmetric(3);
    let sign = GroupHom::from_fn(&s3.group, &z(2), |x| catalog::permutation_sign(&s3.labels[x])).unwrap();
    let s3 = GroupTower::new(vec![one.clone(), z(2), s3.group.clone()], vec![GroupHom::trivial(&z(2), &one), sign]).unwrap();
    vec![("Z/2", over_one(z(2))), ("Z/3", over_one(z(3))), ("Z/4", z4), ("S3", s3)]
}

fn test_schemes(tower: &GroupTower) -> Vec<GSetScheme> {
    let mut out = vec![GSetScheme::spec_k(tower), GSetScheme::split(tower, 2), GSetScheme::split(tower, 0)];
    for level in 1..tower.depth() {
        let l = GSetScheme::spec_field(tower, level).unwrap();
        out.push(GSetScheme::spec_k(tower).disjoint_union(&l).unwrap());
        out.push(l);
    }
    out
}

fn all_schemes() -> Vec<(String, GSetScheme)> {
    let mut out: Vec<(String, GSetScheme)> = Workspace::load(&[corpus_dir()]).unwrap().schemes.into_iter().collect();
    for (name, tower) in test_towers() {
        for (i, s) in test_schemes(&tower).into_iter().enumerate() {
            out.push((format!("{name} #{i}"), s));
        }
    }
    out
}

fn bijection_suite() -> Result<String, String> {
    let start = Instant::now();
    let cases: Vec<_> = catalog::extension_corpus().into_iter().filter(|(_, e)| e.total().order() <= 16).collect();
    if cases.len() < 25 {
        return Err(format!("only {} extensions", cases.len()));
    }
    for (name, e) in &cases {
        let r = verify_profinsection(e, TRUNC).map_err(|err| format!("{name}: {err}"))?;
        if !r.pass {
            return Err(format!("{name}: {} section classes, {} hfp classes", r.section_classes, r.hfp_classes));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 60.0 {
        return Err(format!("took {secs:.1}s"));
    }
    Ok(format!("{} extensions, {secs:.2}s", cases.len()))
}

fn section_free() -> Result<String, String> {
    let e = catalog::corpus_extension("Q8/<i>").ok_or("missing Q8/<i>")?;
    let s = enumerate_sections(&e);
    let r = verify_profinsection(&e, TRUNC).map_err(|err| err.to_string())?;
    if s.class_count() == 0 && s.total_section_count() == 0 && r.hfp_classes == 0 {
        Ok("no sections, no homotopy fixed point classes".into())
    } else {
        Err(format!("{} sections, {} hfp classes", s.total_section_count(), r.hfp_classes))
    }
}

fn lemma_bgk() -> Result<String, String> {
    let mut checked = 0;
    for (name, tower) in test_towers() {
        let x = GSetScheme::spec_k(&tower);
        for level in 0..tower.depth() {
            let n = cech_nerve(&RigidCovering::canonical(&x, level).unwrap(), TRUNC).map_err(|e| e.to_string())?;
            let f = structure_map(&n, level).map_err(|e| e.to_string())?;
            let bg = nerve(tower.level(level), TRUNC).unwrap();
            let pointed = n.set().basepoint().map(|b| f.apply(0, b)) == bg.basepoint();
            if !(f.is_bijective(&bg) && pointed && n.set().counts() == bg.counts()) {
                return Err(format!("{name} level {level}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} tower levels"))
}

fn rational_surjection() -> Result<String, String> {
    let mut checked = 0;
    for (name, x) in all_schemes() {
        let depth = x.tower().depth();
        for field in 0..depth {
            let xb = x.base_change(field).unwrap();
            for level in 0..depth {
                let n = cech_nerve(&RigidCovering::canonical(&xb, level).unwrap(), TRUNC).map_err(|e| e.to_string())?;
                let r = rational_points_surjection(&x, &n).map_err(|e| e.to_string())?;
                if !(r.surjective && r.vertices_are_rational) {
                    return Err(format!("{name}, field level {field}, cover level {level}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} nerves"))
}

fn postnikov_assembly() -> Result<String, String> {
    let specs = two_stage_corpus();
    let nontrivial = specs.iter().filter(|s| s.action.iter().any(|a| a.iter().enumerate().any(|(i, &y)| i != y))).count();
    if specs.len() < 5 || nontrivial == 0 || nontrivial == specs.len() {
        return Err("corpus lacks trivial or nontrivial actions".into());
    }
    for s in &specs {
        let tower = s.assemble(TRUNC).map_err(|e| format!("{}: {e}", s.name))?;
        let report = verify_homotopy_groups(&tower.top().space, &[s.pi1.order(), s.pi2.order()]);
        let fib = tower.bonding_fibrations().map_err(|e| e.to_string())?;
        if !report.all_verifiable_pass() || !fib.iter().all(|f| f.holds) {
            return Err(s.name.to_string());
        }
    }
    Ok(format!("{} towers, {nontrivial} with nontrivial action", specs.len()))
}

fn torsor_bridge() -> Result<String, String> {
    let mut checked = 0;
    for (name, e) in catalog::extension_corpus() {
        let s = enumerate_sections(&e);
        if !e.kernel().is_abelian() || s.total_section_count() == 0 {
            continue;
        }
        let m = GModule::from_extension(&e).map_err(|err| format!("{name}: {err}"))?;
        let h1 = group_cohomology(&m, 1).map_err(|err| format!("{name}: {err}"))?;
        if h1.order() != s.class_count() {
            return Err(format!("{name}: |S| = {}, |H1| = {}", s.class_count(), h1.order()));
        }
        checked += 1;
    }
    if checked == 0 {
        return Err("no split extension with abelian kernel".into());
    }
    Ok(format!("{checked} split extensions"))
}

fn galois_law() -> Result<String, String> {
    let mut pairs = 0;
    for (name, tower) in test_towers() {
        let top = tower.top().clone();
        for x in test_schemes(&tower) {
            for field in 0..tower.depth() {
                let xb = x.base_change(field).unwrap();
                for level in 0..tower.depth() {
                    let n = cech_nerve(&RigidCovering::canonical(&xb, level).unwrap(), TRUNC).map_err(|e| e.to_string())?;
                    let maps: Vec<SimplicialMap> =
                        top.elements().map(|g| galois_action_on_nerve(&n, g)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
                    for g in top.elements() {
                        for h in top.elements() {
                            if maps[g].compose(&maps[h]) != maps[top.mul(g, h)] {
                                return Err(format!("{name}: ({g}, {h}) at field level {field}, cover level {level}"));
                            }
                            pairs += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{pairs} pairs"))
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_hfp"))
        .arg("--workspace")
        .arg(corpus_dir())
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} exited with {:?}", out.status.code()));
    }
    Ok(out.stdout)
}

fn determinism() -> Result<String, String> {
    let ws = Workspace::load(&[corpus_dir()]).map_err(|e| e.to_string())?;
    let mut runs = 0;
    let mut jobs: Vec<Vec<String>> = ws.schemes.keys().map(|id| vec!["pipeline".into(), "--scheme".into(), id.clone()]).collect();
    jobs.push(vec!["verify-bijection".into(), "--all-builtin".into()]);
    for job in jobs {
        let args: Vec<&str> = job.iter().map(String::as_str).collect();
        let first = run_cli(&args)?;
        for _ in 0..2 {
            if run_cli(&args)? != first {
                return Err(format!("{args:?} differs between runs"));
            }
            runs += 1;
        }
        for w in ["1", "4"] {
            let mut with = args.clone();
            with.extend(["--workers", w]);
            if run_cli(&with)? != first {
                return Err(format!("{args:?} differs with --workers {w}"));
            }
            runs += 1;
        }
    }
    Ok(format!("{runs} repeated runs identical"))
}

fn main() {
    let criteria: [(&str, fn() -> Result<String, String>); 8] = [
        ("bijection between section classes and homotopy fixed point classes", bijection_suite),
        ("Q8 over Z/2 has no sections and no homotopy fixed points", section_free),
        ("Cech nerve of Spec k is the classifying space at every level", lemma_bgk),
        ("rational points surject onto fixed components", rational_surjection),
        ("two-stage Postnikov towers have the right homotopy and fibrant bondings", postnikov_assembly),
        ("split extensions with abelian kernel: sections match H1", torsor_bridge),
        ("Galois action on nerves is an action", galois_law),
        ("pipeline reports are deterministic", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name} ({detail})", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
