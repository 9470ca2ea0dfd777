use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ualg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ualg"))
        .args(args)
        .env_remove("UALG_CATALOG")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const Z2_INSTANCE_NO: &str = r#"{"algebras":["Z2","Z2","Z2"],"generators":[[1,1,0],[0,1,1]],"target":[1,0,0]}"#;
const Z2_INSTANCE_YES: &str = r#"{"algebras":["Z2","Z2","Z2"],"generators":[[1,1,0],[0,1,1]],"target":[1,0,1]}"#;

#[test]
fn congruences_of_z4g() {
    let o = ualg(&["--json", "con", "Z4g"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v.as_array().unwrap().len(), 3);
    assert!(v.as_array().unwrap().contains(&serde_json::json!([0, 1, 0, 1])));
    let text = String::from_utf8(ualg(&["con", "Klein"]).stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn dot_output_is_a_digraph() {
    let o = ualg(&["con", "Z4g", "--dot"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("digraph"));
    assert!(text.contains("\"02|13\""));
    assert_eq!(text.matches("->").count(), 2);
}

#[test]
fn smp_solve_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let no = write(dir.path(), "no.json", Z2_INSTANCE_NO);
    let yes = write(dir.path(), "yes.json", Z2_INSTANCE_YES);
    assert_eq!(code(&ualg(&["smp", "solve", &no])), 1);
    assert_eq!(code(&ualg(&["smp", "solve", &yes])), 0);
}

#[test]
fn smp_coherence_and_reduction() {
    let dir = tempfile::tempdir().unwrap();
    let no = write(dir.path(), "no.json", Z2_INSTANCE_NO);
    assert_eq!(code(&ualg(&["smp", "check-coherent", &no, "-d", "2"])), 0);
    assert_eq!(code(&ualg(&["smp", "check-coherent", &no, "-d", "4"])), 1);
    let o = ualg(&["--json", "smp", "reduce", &no, "--k", "Z2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["instance"]["target"], serde_json::json!([1, 0, 0]));
    assert_eq!(v["class"], 0);
}

#[test]
fn build_k_star_respects_the_size_cap() {
    assert_eq!(code(&ualg(&["smp", "build-kstar", "S3"])), 3);
    let o = ualg(&["--json", "--poly-max-size", "9", "smp", "build-kstar", "S3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o).as_array().unwrap().len(), 3);
}

#[test]
fn supernil_verdicts_and_refusals() {
    assert_eq!(code(&ualg(&["supernil", "Z4s", "total", "--assert-omits-type1"])), 0);
    assert_eq!(code(&ualg(&["supernil", "S3", "total"])), 1);
    let o = ualg(&["--json", "supernil", "B12", "total"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("refusing"));
    assert_eq!(json(&o)["exit"], 2);
    assert_eq!(code(&ualg(&["supernil", "B12", "total", "--assert-omits-type1"])), 2);
}

#[test]
fn commutator_arity_cap() {
    assert_eq!(code(&ualg(&["commutator", "Z4g", "total", "total", "total"])), 0);
    assert_eq!(code(&ualg(&["commutator", "Z4g", "total", "total", "total", "total"])), 3);
    assert_eq!(code(&ualg(&["commutator", "Z2", "total", "total", "total", "total"])), 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&ualg(&["con", "NoSuchAlgebra"])), 2);
    assert_eq!(code(&ualg(&["centralizer", "Z4g", "01|23"])), 2);
    assert_eq!(code(&ualg(&["frobnicate"])), 2);
}

#[test]
fn construct_writes_a_checkable_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    let out_s = out.to_str().unwrap();
    assert_eq!(code(&ualg(&["construct", "Z4g", "02|13", "--out", out_s])), 0);
    let sidecar: Value = serde_json::from_str(&std::fs::read_to_string(format!("{out_s}.sidecar.json")).unwrap()).unwrap();
    assert_eq!(sidecar["sorts"], serde_json::json!([[0, 2], [1, 3]]));
    assert_eq!(sidecar["chi"], serde_json::json!([0, 1, 0, 1]));
    let o = ualg(&["check", "identities", out_s]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = ualg(&["--json", "con", out_s]);
    assert_eq!(json(&o).as_array().unwrap().len(), 2);
}

#[test]
fn corrupted_construction_fails_identities() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    let out_s = out.to_str().unwrap();
    assert_eq!(code(&ualg(&["construct", "Z4g", "02|13", "--out", out_s])), 0);
    let mut alg: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let table = alg["operations"][0]["table"].as_array_mut().unwrap();
    table[1] = serde_json::json!(3 - table[1].as_u64().unwrap());
    std::fs::write(&out, alg.to_string()).unwrap();
    assert_eq!(code(&ualg(&["check", "identities", out_s])), 1);
}

#[test]
fn star_of_a_congruence() {
    let o = ualg(&["--json", "star", "Z4g", "02|13", "--congruence", "02|13"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o), serde_json::json!([0, 0, 0, 0]));
    assert_eq!(code(&ualg(&["star", "Z4g", "02|13", "--congruence", "total"])), 2);
}

#[test]
fn maltsev_and_types() {
    assert_eq!(code(&ualg(&["maltsev", "Z4g"])), 0);
    assert_eq!(code(&ualg(&["maltsev", "L2"])), 1);
    let o = ualg(&["--json", "tct", "type", "Z2", "0", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["kind"], 2);
}

#[test]
fn catalog_directory_resolves_names() {
    let dir = tempfile::tempdir().unwrap();
    let text = String::from_utf8(ualg(&["--json", "construct", "Z4g", "02|13"]).stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    write(dir.path(), "Cz.json", &v["algebra"].to_string());
    let o = Command::new(env!("CARGO_BIN_EXE_ualg"))
        .args(["con", "Cz"])
        .env("UALG_CATALOG", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let no = write(dir.path(), "no.json", Z2_INSTANCE_NO);
    for args in [
        vec!["--json", "con", "Klein"],
        vec!["--json", "construct", "Z4s", "02|13"],
        vec!["--json", "smp", "reduce", no.as_str(), "--k", "Z2"],
        vec!["--json", "supernil", "Z4s", "total", "--assert-omits-type1", "--cross-check"],
    ] {
        assert_eq!(ualg(&args).stdout, ualg(&args).stdout, "{args:?}");
    }
}
