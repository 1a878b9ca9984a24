use std::path::Path;
use std::process::{Command, Output};

fn peria(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_peria"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    peria(args).status.code().expect("exit code")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn validate_accepts_fixtures_by_name_and_path() {
    assert_eq!(code(&["validate", "F4"]), 0);
    assert_eq!(code(&["validate", &fixture("f2.peria")]), 0);
}

#[test]
fn malformed_presentation_exits_2() {
    let out = peria(&["validate", &fixture("bad.peria")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert_eq!(code(&["validate", "/nonexistent/x.peria"]), 2);
}

#[test]
fn mediangle_check_passes_on_dihedral_ball() {
    let out = peria(&["check-mediangle", "F1", "-R", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("cycle-condition"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn pipeline_emits_parsable_target() {
    let out = peria(&["pipeline", "F2", "-R", "3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let text = v["target_presentation"].as_str().expect("presentation text");
    let spec = periagroup::parse_presentation(text).unwrap();
    assert_eq!(spec.vertex_count(), 2);
}

#[test]
fn json_output_is_deterministic() {
    let args = ["pipeline", "F4", "--trust", "3", "--format", "json", "--seed", "7"];
    let a = peria(&args);
    let b = peria(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn orientation_cap_exits_3() {
    assert_eq!(code(&["quasicubulate", "F4", "--trust", "2", "--cap-orientations", "10"]), 3);
}

#[test]
fn dot_export_is_a_graph() {
    let out = peria(&["ball", "F2", "-R", "2", "--format", "dot"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.trim_start().starts_with("graph") || text.trim_start().starts_with("digraph"));
}

#[test]
fn refuted_double_coset_claim_exits_4() {
    assert_eq!(code(&["separability", "F2", "--phi", "u", "--psi", "v"]), 4);
    assert_eq!(code(&["separability", "F2", "--xi", "v"]), 0);
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("peria-cli-{}.json", std::process::id()));
    let p = path.to_string_lossy().into_owned();
    assert_eq!(code(&["hyperplanes", "F1", "-R", "3", "--format", "json", "-o", &p]), 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(v.is_object() || v.is_array());
}
