//! Recovered systems against stored canonical text. Regenerate with
//! `GRS_UPDATE_GOLDEN=1 cargo test --test golden`.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::OnceLock;

use grs_core::algebra::MRat;
use grs_core::catalog;
use grs_core::scheme::recover;

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.txt"))
}

fn check_golden(name: &str, actual: &str) {
    let path = golden_path(name);
    if std::env::var_os("GRS_UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, want, "golden mismatch for {name}");
}

fn recovered_text(id: &str) -> String {
    static CACHE: OnceLock<BTreeMap<&'static str, String>> = OnceLock::new();
    CACHE.get_or_init(|| catalog::SCHEME_IDS.iter().map(|id| (*id, compute_recovered_text(id))).collect())[id].clone()
}

/// The recovered system with the scale set to `a` and the dependent
/// parameter substituted, in canonical text.
fn compute_recovered_text(id: &str) -> String {
    let entry = catalog::system(id).unwrap();
    let mut rec = recover(&catalog::scheme(id).unwrap()).unwrap();
    if !rec.free.is_empty() {
        rec = rec.with_scale(&MRat::sym("a"));
    }
    let vf = rec.vf.map(|c| entry.reduce(c));
    let mut out = format!("{vf}\n");
    if let Some(r) = &rec.relation_poly {
        out.push_str(&format!("relation: {r} = 0\n"));
    }
    out
}

/// The transcribed system, reduced the same way.
fn transcribed_text(id: &str) -> String {
    let entry = catalog::system(id).unwrap();
    format!("{}\n", entry.reduced_vf())
}

#[test]
fn recovered_systems_match_golden() {
    for id in catalog::SCHEME_IDS {
        check_golden(&format!("recovered-{id}"), &recovered_text(id));
    }
}

#[test]
fn golden_systems_are_the_transcribed_ones() {
    for id in catalog::SCHEME_IDS {
        let text = recovered_text(id);
        let system = text.lines().take(2).collect::<Vec<_>>().join("\n") + "\n";
        assert_eq!(system, transcribed_text(id), "{id}");
    }
}

#[test]
fn canonical_text_is_stable() {
    for id in catalog::SYSTEM_IDS {
        let e = catalog::system(id).unwrap();
        let again = grs_core::charts::PlaneVectorField::parse(e.vf.model.clone(), &e.vf.dxdt.to_string(), &e.vf.dydt.to_string()).unwrap();
        assert_eq!(again, e.vf, "{id}");
        check_golden(&format!("system-{id}"), &format!("{}\n", e.vf));
    }
}
