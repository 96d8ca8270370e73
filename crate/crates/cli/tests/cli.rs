use std::path::PathBuf;
use std::process::Command;

use grs_core::catalog::{self, SystemEntry};
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn grs(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_grs")).args(args).output().expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn check_golden(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.txt"));
    if std::env::var_os("GRS_UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, want, "golden mismatch for {name}");
}

/// Rational values are strings; only integer counts may be JSON numbers.
fn no_json_floats(v: &Value) -> bool {
    match v {
        Value::Number(n) => n.is_i64() || n.is_u64(),
        Value::Array(a) => a.iter().all(no_json_floats),
        Value::Object(o) => o.values().all(no_json_floats),
        _ => true,
    }
}

#[test]
fn recover_sixth_pretty() {
    let r = grs(&["recover", "--scheme", "builtin:pvi", "--format", "pretty"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    check_golden("recover-pvi", &r.stdout);
    let want = catalog::system("pvi").unwrap().reduced_vf().to_string();
    assert!(r.stdout.contains(&want));
}

#[test]
fn analysis_outputs() {
    for (name, args) in [
        ("singular-pvi", vec!["singular", "--system", "pvi"]),
        ("alpha-pvi-0", vec!["alpha-test", "--system", "pvi", "--point", "0"]),
        ("resolve-gen-pv-0", vec!["resolve", "--system", "gen-pv", "--point", "0"]),
        ("resolve-gen-piii-inf", vec!["resolve", "--system", "gen-piii", "--point", "inf"]),
        ("classify-genV", vec!["classify", "--relation", "genV"]),
        ("relation-gen-pvi", vec!["relation", "--scheme", "builtin:gen-pvi"]),
        ("construct-3", vec!["construct", "--n", "3", "--points", "0,1,2", "--ratios", "1,2,2,2,2"]),
        ("match-gen-piv", vec!["match", "--general", "gen-piv", "--set", "n1=2,a=4", "--reference", "piv"]),
    ] {
        let r = grs(&args);
        assert_eq!(r.code, 0, "{name}: {}", r.stderr);
        check_golden(name, &r.stdout);
    }
}

#[test]
fn classify_sixth_lists_four() {
    let r = grs(&["classify", "--relation", "genVI", "--format", "json"]);
    assert_eq!(r.code, 0);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    let tuples = v["tuples"].as_array().unwrap();
    assert_eq!(tuples.len(), 4);
    assert_eq!(tuples[0], serde_json::json!(["1", "2", "3", "6"]));
    assert_eq!(v["complete"], Value::Bool(true));
}

#[test]
fn exit_codes() {
    let dir = std::env::temp_dir().join(format!("grs-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("malformed.json");
    std::fs::write(&bad, "{\"model\": {\"n\": 2, \"twist\": [\"alpha2\"]}, \"specs\": [").unwrap();
    let r = grs(&["recover", "--scheme", bad.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("line"), "{}", r.stderr);

    assert_eq!(grs(&["frobnicate"]).code, 1);
    assert_eq!(grs(&["classify", "--relation", "genX"]).code, 1);
    assert_eq!(grs(&["construct", "--n", "2", "--points", "0,1", "--ratios", "1,1,1,1"]).code, 1);

    let r = grs(&["match", "--general", "gen-piii", "--set", "n1=4", "--reference", "pv"]);
    assert_eq!(r.code, 2, "{}", r.stderr);
    assert!(r.stderr.contains("no correspondence"));

    let r = grs(&["symmetry", "--system", "gen-pvi", "--map", "pi3"]);
    assert_eq!(r.code, 3);
    assert_eq!(grs(&["symmetry", "--system", "gen-pvi", "--map", "pi3-swap"]).code, 0);
}

#[test]
fn recovery_from_file_matches_builtin() {
    let dir = std::env::temp_dir().join(format!("grs-cli-scheme-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("gen-piii.json");
    let shown = grs(&["show", "--scheme", "builtin:gen-piii", "--format", "json"]);
    std::fs::write(&path, &shown.stdout).unwrap();
    let a = grs(&["recover", "--scheme", path.to_str().unwrap(), "--format", "json"]);
    let b = grs(&["recover", "--scheme", "builtin:gen-piii", "--format", "json"]);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_is_deterministic_and_exact() {
    for args in [
        vec!["recover", "--scheme", "builtin:gen-piv", "--format", "json"],
        vec!["symmetry", "--system", "gen-pv", "--format", "json"],
        vec!["singular", "--system", "pvi", "--format", "json"],
        vec!["classify", "--relation", "genIII", "--unordered", "--format", "json"],
    ] {
        let a = grs(&args);
        let b = grs(&args);
        assert_eq!(a.code, 0, "{args:?}: {}", a.stderr);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        let v: Value = serde_json::from_str(&a.stdout).unwrap();
        assert!(no_json_floats(&v), "{args:?}");
    }
}

#[test]
fn show_system_round_trips() {
    for id in catalog::SYSTEM_IDS {
        let r = grs(&["show", "--system", id, "--format", "json"]);
        assert_eq!(r.code, 0);
        let parsed: SystemEntry = serde_json::from_str(&r.stdout).unwrap();
        assert_eq!(parsed, catalog::system(id).unwrap(), "{id}");
        let again = serde_json::to_string_pretty(&serde_json::to_value(&parsed).unwrap()).unwrap();
        assert_eq!(again + "\n", r.stdout, "{id}");
    }
}

#[test]
fn branching_screen_for_fractional_eigenvalue() {
    let r = grs(&["singular", "--system", "gen-pvi", "--set", "n1=3/2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("screen: branching"));
}
