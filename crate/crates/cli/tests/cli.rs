use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn hfp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hfp")).arg("--workspace").arg(corpus_dir()).args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn sections_of_builtin_and_workspace_extensions() {
    let v = json(&hfp(&["sections", "--extension", "s3_over_z2"]));
    assert_eq!(v["total_sections"], 3);
    assert_eq!(v["class_count"], 1);
    let v = json(&hfp(&["sections", "--extension", "Q8/<i>"]));
    assert_eq!(v["class_count"], 0);
    let v = json(&hfp(&["sections", "--ext-tower", "s3_constant"]));
    assert_eq!(v["tower"]["class_counts"], serde_json::json!([1, 1]));
}

#[test]
fn hfp_pi0_and_bijection() {
    let v = json(&hfp(&["hfp-pi0", "--extension", "v4_over_z2", "--trunc-dim", "2"]));
    assert_eq!(v["classes"], 2);
    let v = json(&hfp(&["verify-bijection", "--extension", "d4_mod_r", "--extension", "Z8/Z2"]));
    assert_eq!(v["verdict"], "PASS");
}

#[test]
fn etale_subcommands() {
    let v = json(&hfp(&["cech-nerve", "--scheme", "spec_k", "--level", "1"]));
    assert_eq!(v["counts"], serde_json::json!([1, 2, 4, 8]));
    let v = json(&hfp(&["structure-map", "--scheme", "quartic_point"]));
    assert_eq!(v["isomorphism"], true);
    assert_eq!(v["pi1_surjective"], true);
    let v = json(&hfp(&["fixed-points", "--scheme", "k_times_l", "--level", "0"]));
    assert_eq!(v["components"], serde_json::json!([[0]]));
    let v = json(&hfp(&["rational-points", "--scheme", "spec_l"]));
    assert_eq!(v["report"]["rational_points"], serde_json::json!([]));
    let v = json(&hfp(&["eta", "--scheme", "k_times_k"]));
    assert_eq!(v["surjective"], true);
}

#[test]
fn cohomology_and_postnikov() {
    let v = json(&hfp(&["cohomology", "--module-id", "z2_on_z2", "--degree", "2"]));
    assert_eq!(v["order"], 2);
    let v = json(&hfp(&["cohomology", "--module-id", "v4_on_z2", "--degree", "2", "--e2"]));
    assert_eq!(v["row"][2]["order"], 8);
    let v = json(&hfp(&["postnikov-assemble", "--postnikov", "z2_z3_inversion"]));
    assert_eq!(v["verdict"], "PASS");
}

#[test]
fn pipeline_report_fields() {
    let v = json(&hfp(&["pipeline", "--scheme", "k_times_k", "--depth", "2"]));
    assert_eq!(v["verdict"], "PASS");
    assert_eq!(v["trunc_dim"], 3);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["levels"][1]["hfp_classes"], 2);
    assert!(v.get("workers").is_none());
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("hfp-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = hfp(&["pipeline", "--scheme", "spec_l", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["scheme"], "spec_l");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn validation_failures_exit_with_two() {
    assert_eq!(hfp(&["pipeline", "--scheme", "nowhere"]).status.code(), Some(2));
    assert_eq!(hfp(&["postnikov-assemble", "--postnikov", "z2_z2_trivial", "--trunc-dim", "2"]).status.code(), Some(2));
    let dir = std::env::temp_dir().join(format!("hfp-cli-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.toml");
    std::fs::write(&bad, "schema_version = 1\n[[group]]\nid = \"g\"\nmul = [[0, 1], [1, 1]]\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_hfp")).arg("-w").arg(&bad).args(["sections", "--extension", "S3/A3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.toml:3"));
    std::fs::remove_dir_all(&dir).unwrap();
}
