use std::path::PathBuf;

use hfp_core::cohomology::group_cohomology;
use hfp_core::pipeline::run_pipeline;
use hfp_core::postnikov::verify_homotopy_groups;
use hfp_core::sections::{enumerate_sections, tower_sections};
use hfp_core::workspace::Workspace;

fn corpus() -> Workspace {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    Workspace::load(&[dir]).expect("corpus loads")
}

#[test]
fn corpus_loads() {
    let ws = corpus();
    assert_eq!(ws.towers.len(), 4);
    assert_eq!(ws.schemes["s3_cubic"].rational_points(), &[] as &[usize]);
    assert_eq!(ws.schemes["s3_rational_and_cubic"].rational_points(), &[0]);
    assert_eq!(ws.schemes["quartic_mixed"].rational_points(), &[0]);
}

#[test]
fn pipelines_on_corpus_schemes() {
    let ws = corpus();
    for (id, scheme) in &ws.schemes {
        let r = run_pipeline(id, scheme, None, 3).unwrap();
        assert_eq!(r.verdict, "PASS", "{id}");
        for level in &r.levels {
            assert!(level.hfp_error.is_none(), "{id} level {}: {:?}", level.level, level.hfp_error);
            let hfp = level.hfp_classes.unwrap();
            // Every rational point gives a homotopy fixed point.
            assert!(r.rational_points.is_empty() || hfp > 0, "{id}");
        }
        println!("{id}: {:?}", r.levels.iter().map(|l| (l.fixed_components.len(), l.hfp_classes)).collect::<Vec<_>>());
    }
}

#[test]
fn corpus_modules_and_sections() {
    let ws = corpus();
    let h1 = group_cohomology(&ws.modules["s3_kernel"], 1).unwrap();
    assert_eq!(h1.order(), enumerate_sections(&ws.extensions["s3_over_z2"]).class_count());
    assert_eq!(group_cohomology(&ws.modules["z2_on_z2"], 2).unwrap().order(), 2);
    let t = tower_sections(&ws.ext_towers["s3_constant"]).unwrap();
    assert_eq!(t.class_counts, vec![1, 1]);
    assert_eq!(enumerate_sections(&ws.extensions["q8_mod_i"]).class_count(), 0);
}

#[test]
fn corpus_postnikov_towers() {
    let ws = corpus();
    for (id, data) in &ws.postnikov {
        let tower = data.assemble(3).unwrap();
        let report = verify_homotopy_groups(&tower.top().space, &[data.pi1.order(), data.pi2.order()]);
        assert!(report.all_verifiable_pass(), "{id}");
        assert!(tower.bonding_fibrations().unwrap().iter().all(|f| f.holds), "{id}");
    }
}
