use std::process::{Command, Output};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde_json::Value;

use vknot::alexander::generalized_alexander;
use vknot::catalog::resolve_code;
use vknot::moves::{apply_move, enumerate_moves};

fn vknot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vknot")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = vknot(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code_of(args: &[&str]) -> i32 {
    vknot(args).status.code().unwrap()
}

#[test]
fn unknot_report() {
    let r = json(&["invariants", "unknot", "--all"]);
    assert_eq!(r["invariants"]["f"], "1");
    assert_eq!(r["invariants"]["galex"], "0");
    assert_eq!(r["invariants"]["genus"]["g"], 0);
    assert!(r["version"].is_string());
}

#[test]
fn kishino_quaternionic_values() {
    let r = json(&["invariants", "kishino", "--quat"]);
    assert_eq!(r["invariants"]["quat"]["study_det"], "0");
    assert_eq!(r["invariants"]["quat"]["codim1_gcd"], "2+5*t^2+2*t^4");
    assert_eq!(r["invariants"].as_object().unwrap().len(), 1);
}

#[test]
fn virtual_trefoil_galex() {
    let r = json(&["invariants", "O1+,O2+,U1+,U2+", "--galex"]);
    let want = generalized_alexander(&resolve_code("O1+,O2+,U1+,U2+").unwrap());
    assert!(!want.is_zero());
    assert_eq!(r["invariants"]["galex"], want.to_text(["s", "t"]).as_str());
}

#[test]
fn distinguish_examples() {
    let r = json(&["distinguish", "unknot", "vtrefoil"]);
    assert_eq!(r["result"]["verdict"], "DISTINCT");
    assert_eq!(r["result"]["invariant"], "f");
    let r = json(&["distinguish", "trefoil", "trefoil"]);
    assert_eq!(r["result"]["verdict"], "INCONCLUSIVE");
    // only move-invariant quantities are compared, and none of them
    // separates the Kishino diagram from the unknot
    let r = json(&["distinguish", "unknot", "kishino"]);
    assert_eq!(r["result"]["verdict"], "INCONCLUSIVE");
}

#[test]
fn distinguish_never_separates_moved_copies() {
    let mut rng = StdRng::seed_from_u64(7);
    for name in ["trefoil", "vtrefoil", "kishinoL", "fig8K"] {
        let mut k = resolve_code(name).unwrap();
        for _ in 0..3 {
            let m = *enumerate_moves(&k).choose(&mut rng).unwrap();
            k = apply_move(&k, &m).unwrap();
        }
        let r = json(&["distinguish", name, &k.to_string()]);
        assert_eq!(r["result"]["verdict"], "INCONCLUSIVE", "{name} vs {k}");
    }
}

#[test]
fn catalog_listing() {
    let r = json(&["catalog"]);
    let names: Vec<&str> = r["entries"].as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert!(names.len() >= 9);
    for n in ["unknot", "trefoil", "figure8", "vtrefoil", "kishino", "kishinoL", "kishinoR", "fig8K", "flatH"] {
        assert!(names.contains(&n), "{n}");
    }
}

#[test]
fn dihedral_homology() {
    let r = json(&["homology", "--birack", "R3", "--degree", "3", "--variant", "quandle"]);
    assert!(r["torsion"].as_array().unwrap().contains(&Value::from(3)));
}

#[test]
fn braid_closure_report() {
    let r = json(&["braid", "--word", "s1 s1 s1", "--n", "2", "--close", "--invariants"]);
    let trefoil = json(&["invariants", "trefoil", "--all"]);
    assert_eq!(r["invariants"]["f"], trefoil["invariants"]["f"]);
    assert_eq!(r["invariants"]["alex_ideal"], trefoil["invariants"]["alex_ideal"]);
    let v = json(&["braid", "--n", "3", "--verify"]);
    assert_eq!(v["all_hold"], false);
    assert!(v["failures"].as_array().unwrap().iter().all(|f| f["family"] == "welded"));
}

#[test]
fn other_commands() {
    assert_eq!(json(&["flat-linking", "flatH"])["flat_linking"]["parity"], 1);
    assert_eq!(json(&["realize", "vtrefoil"])["virtual_crossings"], 1);
    let s = json(&["simplify", "kishinoL"]);
    assert_eq!(s["output"], "");
    assert_eq!(s["crossings"], serde_json::json!([2, 0]));
    let e = json(&["enumerate", "--order", "3"]);
    assert_eq!((e["biracks"].as_u64(), e["biquandles"].as_u64()), (Some(26), Some(15)));
}

#[test]
fn exit_codes() {
    assert_eq!(code_of(&["invariants", "O1+,U1-"]), 2);
    assert_eq!(code_of(&["invariants", "nosuchknot"]), 2);
    assert_eq!(code_of(&["invariants", "unknot", "--nosuchflag"]), 2);
    assert_eq!(code_of(&["invariants", "flatH"]), 2);
    assert_eq!(code_of(&["enumerate", "--order", "7"]), 3);
    let big = (1..=11).map(|k| format!("O{k}+,U{k}+")).collect::<Vec<_>>().join("|");
    assert_eq!(code_of(&["invariants", &big, "--quat"]), 3);
}

#[test]
fn output_is_deterministic() {
    for args in [&["invariants", "kishino", "--all"][..], &["catalog"], &["distinguish", "figure8", "fig8K"]] {
        assert_eq!(vknot(args).stdout, vknot(args).stdout, "{args:?}");
    }
}
