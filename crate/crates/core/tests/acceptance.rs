//! One PASS/FAIL line per acceptance criterion. Known, documented failures
//! are listed in `KNOWN_RED`; any other failure (or a known one turning
//! green) fails the test.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use grs_core::algebra::{parse_poly, parse_rat, MPoly, MRat, Mat2, Var, Q};
use grs_core::blowup::{degenerate_matrix_criterion, resolve_multiplicity};
use grs_core::catalog::{self, SystemEntry};
use grs_core::charts::{check_log_condition, sigma2_family, SurfaceModel};
use grs_core::classify::{brute_force_natural, enumerate_natural, Convention, RelationId};
use grs_core::scheme::existence::construct_existence_system;
use grs_core::scheme::matching::{match_specialization, reference};
use grs_core::scheme::{eigenvalue_relation, recover, RecoveredSystem};
use grs_core::singular::{accessible_points, alpha_test, branch_point_screen, linearization, local_indices};
use grs_core::symmetry::{verify_involution, verify_symmetry, CheckMode};

/// π3 of the four-point generalization, as printed, is not a symmetry; the
/// corrected swap is (see the decisions ledger).
const KNOWN_RED: &[u32] = &[6];

type Verdict = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Verdict);
type MatchCase = (&'static str, &'static [(&'static str, &'static str)], &'static str);

fn r(s: &str) -> MRat {
    parse_rat(s).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn same_up_to_unit(a: &MPoly, b: &MPoly) -> bool {
    let (a, b) = (a.integer_primitive(), b.integer_primitive());
    a == b || a == -b
}

fn recovered(id: &str) -> &'static (RecoveredSystem, Duration) {
    static CACHE: OnceLock<BTreeMap<&'static str, (RecoveredSystem, Duration)>> = OnceLock::new();
    &CACHE.get_or_init(|| {
        catalog::SCHEME_IDS
            .iter()
            .map(|id| {
                let start = Instant::now();
                let rec = recover(&catalog::scheme(id).unwrap()).unwrap();
                (*id, (rec, start.elapsed()))
            })
            .collect()
    })[id]
}

fn scaled_reduced(id: &str) -> (SystemEntry, grs_core::charts::PlaneVectorField) {
    let entry = catalog::system(id).unwrap();
    let (rec, _) = recovered(id);
    let rec = if rec.free.is_empty() { rec.clone() } else { rec.with_scale(&MRat::sym("a")) };
    let vf = rec.vf.map(|c| entry.reduce(c));
    (entry, vf)
}

fn criterion_1() -> Verdict {
    let (rec, elapsed) = recovered("pvi");
    let (entry, vf) = scaled_reduced("pvi");
    let want = entry.reduced_vf();
    ensure(vf.to_string() == want.to_string(), || format!("recovered\n{vf}\nexpected\n{want}"))?;
    let step = |u: &str| rec.trace.iter().find(|s| s.unknown == Var::new(u)).map(|s| s.value.clone());
    for (u, v) in [("a7", "0"), ("a5", "-2*a10"), ("a8", "alpha4*a10")] {
        ensure(step(u) == Some(r(v)), || format!("trace step {u} = {:?}, expected {v}", step(u).map(|s| s.to_string())))?;
    }
    ensure(*elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("canonical text equal after α0 normalization; trace a7, a5, a8 present; {:.2}s", elapsed.as_secs_f64()))
}

fn criterion_2() -> Verdict {
    let entry = catalog::system("pvi").unwrap();
    let vf = entry.reduced_vf();
    let pts = accessible_points(&vf, &[]).map_err(|e| e.to_string())?;
    let labels: BTreeSet<String> = pts.iter().map(|p| p.label.clone()).collect();
    let want: BTreeSet<String> = ["0", "1", "t", "∞"].iter().map(|s| s.to_string()).collect();
    ensure(labels == want, || format!("points {labels:?}"))?;
    ensure(pts.iter().all(|p| p.multiplicity == 1), || "a point is not simple".into())?;
    let alpha0 = entry.reduce(&r("alpha0"));
    let expected: HashMap<&str, (MRat, Mat2)> = HashMap::from([
        ("0", (r("1/(t - 1)"), Mat2::new(r("2"), r("-alpha4"), r("0"), r("1")))),
        ("1", (r("-1/t"), Mat2::new(r("2"), r("-alpha3"), r("0"), r("1")))),
        ("t", (r("1"), Mat2::new(r("2"), -&alpha0, r("0"), r("1")))),
        ("∞", (r("1/(t*(t - 1))"), Mat2::new(r("2"), r("-alpha1"), r("0"), r("1")))),
    ]);
    for p in &pts {
        let li = linearization(&vf, p).map_err(|e| e.to_string())?;
        let (scale, m) = &expected[p.label.as_str()];
        let stored = m.scale(scale);
        ensure(li.matrix == stored, || format!("X={}: {} vs {scale} * {m}", p.label, li.matrix))?;
        ensure(li.factored() == (scale.clone(), stored.scale(&scale.recip().unwrap())), || format!("X={}: scale", p.label))?;
    }
    Ok("{0, 1, t, ∞}, all simple; four matrices and scales 1/(t−1), −1/t, 1, 1/(t(t−1)) exact".into())
}

fn criterion_3() -> Verdict {
    let deltas = [
        (
            "gen-pvi",
            "(n1*n2*alpha0 + (2*n1*n2*n3 - n1*n2 - n1*n3 - n2*n3)*alpha1 - n1*n2*n3*alpha2 + n1*n3*alpha3 + n2*n3*alpha4)*t*(t - 1)",
        ),
        ("gen-pv", "t*(2*n2*alpha0 + 2*n1*alpha1 - 2*(n1 + n2)*alpha2 + 2*(2*n1*n2 - n1 - n2)*alpha3 - (n1 - n2)*t)"),
        ("gen-piv", ""),
        ("gen-piii", "(4*alpha0 + 2*n1*alpha1 - (n1 + 2)*alpha2)*t"),
    ];
    let mut notes = Vec::new();
    for (id, delta) in deltas {
        let (entry, vf) = scaled_reduced(id);
        let want = entry.reduced_vf();
        ensure(vf.to_string() == want.to_string(), || format!("{id}: recovered\n{vf}\nexpected\n{want}"))?;
        let golden = std::fs::read_to_string(format!("{}/tests/golden/recovered-{id}.txt", env!("CARGO_MANIFEST_DIR")))
            .map_err(|e| e.to_string())?;
        ensure(golden.starts_with(&format!("{vf}\n")), || format!("{id}: golden file differs"))?;
        if !delta.is_empty() {
            let d = parse_poly(delta).unwrap();
            for c in vf.components() {
                ensure(same_up_to_unit(c.den(), &d), || format!("{id}: denominator {} is not δ = {d}", c.den()))?;
            }
            notes.push(format!("{id} δ"));
        }
    }
    Ok(format!("four systems term-for-term; denominators match {}", notes.join(", ")))
}

fn criterion_4() -> Verdict {
    for (id, rel) in [
        ("gen-pvi", "n2*n3*n4 + n1*n3*n4 + n1*n2*n4 + n1*n2*n3 - 2*n1*n2*n3*n4"),
        ("gen-pv", "2*n1*n2*n3 - (n1 + n2)*n3 - 2*(n1 + n2)"),
        ("gen-piv", "2*n1*n2 - 3*n1 - n2 - 3"),
        ("gen-piii", "n1*n2 - 4"),
    ] {
        let got = eigenvalue_relation(&catalog::scheme(id).unwrap()).map_err(|e| format!("{id}: {e}"))?;
        let want = parse_poly(rel).unwrap();
        ensure(same_up_to_unit(&got, &want), || format!("{id}: {got} vs {want}"))?;
    }
    Ok("four relations equal up to a unit".into())
}

fn criterion_5() -> Verdict {
    let start = Instant::now();
    let expected: [(RelationId, Vec<Vec<u64>>); 4] = [
        (RelationId::GenVI, vec![vec![1, 2, 3, 6], vec![1, 2, 4, 4], vec![1, 3, 3, 3], vec![2, 2, 2, 2]]),
        (RelationId::GenV, vec![vec![2, 1, 6], vec![2, 2, 2], vec![3, 1, 4], vec![3, 3, 1], vec![5, 1, 3], vec![6, 2, 1]]),
        (RelationId::GenIV, vec![vec![1, 6], vec![2, 3], vec![5, 2]]),
        (RelationId::GenIII, vec![vec![2, 2], vec![4, 1]]),
    ];
    for (rel, want) in &expected {
        let got = enumerate_natural(*rel, Convention::Canonical);
        ensure(&got == want, || format!("{rel}: {got:?}"))?;
        let all = enumerate_natural(*rel, Convention::Unordered);
        let brute = brute_force_natural(*rel, 100);
        ensure(all == brute, || format!("{rel}: brute force over [1,100] finds {brute:?}"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("4/6/3/2 tuples, complete over [1,100]^k; {:.2}s", elapsed.as_secs_f64()))
}

fn criterion_6() -> Verdict {
    let mut failing = Vec::new();
    let mut notes = Vec::new();
    let mut count = 0;
    for (id, names) in [
        ("gen-pvi", &["s", "pi1", "pi2", "pi3"][..]),
        ("gen-pv", &["s", "pi"][..]),
        ("gen-piv", &["s"][..]),
        ("gen-piii", &["s", "pi"][..]),
    ] {
        let entry = catalog::system(id).unwrap();
        for name in names {
            let m = catalog::map(id, name).unwrap();
            let rep = verify_symmetry(&entry, &m, CheckMode::Probes { count: 20, seed: 7 }).map_err(|e| e.to_string())?;
            let inv = verify_involution(&m, entry.relation.as_ref()).map_err(|e| e.to_string())?;
            count += 1;
            if !(rep.invariant && rep.probes >= 20 && inv.involutive) {
                failing.push(format!("{id}/{name} ({} of {} probes fail, involution {})", rep.failures.len(), rep.probes, inv.involutive));
            }
            if !rep.absent.is_empty() {
                let a: Vec<String> = rep.absent.iter().map(|v| v.to_string()).collect();
                notes.push(format!("{id}/{name}: {} absent, image not asserted", a.join(", ")));
            }
        }
    }
    let corrected = catalog::map("gen-pvi", "pi3-swap").unwrap();
    let entry = catalog::system("gen-pvi").unwrap();
    let swap_ok = verify_symmetry(&entry, &corrected, CheckMode::Probes { count: 20, seed: 7 }).map_err(|e| e.to_string())?.invariant
        && verify_involution(&corrected, entry.relation.as_ref()).map_err(|e| e.to_string())?.involutive;
    let summary = format!("{}/{count} maps pass; {}; corrected pi3-swap passes: {swap_ok}", count - failing.len(), notes.join("; "));
    if failing.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; failing: {}", failing.join(", ")))
    }
}

fn criterion_7() -> Verdict {
    for (id, point, map, resolved) in [
        ("gen-pv", "0", ["x", "x^2*y"], ["0", "-t"]),
        ("gen-piv", "0", ["x", "x^3*y"], ["0", "-1/2"]),
        ("gen-piii", "∞", ["1/x", "-(x*y + alpha2)/x"], ["0", "-1"]),
    ] {
        let entry = catalog::system(id).unwrap();
        let vf = entry.reduced_vf();
        let p = accessible_points(&vf, &[])
            .map_err(|e| e.to_string())?
            .into_iter()
            .find(|p| p.label == point)
            .ok_or(format!("{id}: no X={point}"))?;
        let (trace, _) = resolve_multiplicity(&vf, &p).map_err(|e| format!("{id}: {e}"))?;
        ensure(trace.final_chart_map == map.map(r), || {
            format!("{id}: chart map ({}, {})", trace.final_chart_map[0], trace.final_chart_map[1])
        })?;
        ensure(trace.point == resolved.map(r), || format!("{id}: resolved point ({}, {})", trace.point[0], trace.point[1]))?;
    }
    let rep = degenerate_matrix_criterion(&sigma2_family(&SurfaceModel::painleve())).map_err(|e| e.to_string())?;
    ensure(rep.equivalent, || format!("{:?}", rep.residuals))?;
    Ok("(x, x²y)→(0,−t), (x, x³y)→(0,−1/2), ∞→(0,−1); three-way equivalence has empty residuals".into())
}

fn criterion_8() -> Verdict {
    let mut notes = Vec::new();
    for (n, c, m) in [(2u32, vec!["0", "1"], vec!["2", "2", "2", "2"]), (3, vec!["0", "1", "2"], vec!["1", "2", "2", "2", "2"])] {
        let c: Vec<MRat> = c.iter().map(|s| r(s)).collect();
        let mq: Vec<Q> = m.iter().map(|s| grs_core::algebra::parse_q(s).unwrap()).collect();
        let mr: Vec<MRat> = m.iter().map(|s| r(s)).collect();
        let e = construct_existence_system(n, &c, &mr).map_err(|e| format!("n={n}: {e}"))?;
        let vf = &e.system.vf;
        ensure(check_log_condition(vf).holds, || format!("n={n}: log condition"))?;
        // (A1): exactly c…, t, ∞, all simple.
        let pts = accessible_points(vf, &c).map_err(|e| e.to_string())?;
        let mut want: Vec<String> = c.iter().map(|x| x.to_string()).collect();
        want.push("t".into());
        want.push("∞".into());
        let got: BTreeSet<String> = pts.iter().map(|p| p.label.clone()).collect();
        ensure(got == want.iter().cloned().collect() && pts.len() == want.len() && pts.iter().all(|p| p.multiplicity == 1), || {
            format!("n={n}: points {got:?}")
        })?;
        // (A2): ratios in the order c…, t, ∞.
        for (label, mi) in want.iter().zip(&mr) {
            let p = pts.iter().find(|p| &p.label == label).unwrap();
            let ratio = linearization(vf, p).map_err(|e| e.to_string())?.ratio;
            ensure(ratio.as_ref() == Some(mi), || format!("n={n}: ratio at {label} is {ratio:?}"))?;
        }
        // (A3) and the ratio at ∞ from the finite ones.
        let sum: Q = mq.iter().map(|q| q.recip()).sum();
        ensure(sum == Q::from_integer(n.into()), || format!("n={n}: Σ1/m = {sum}"))?;
        let finite: Q = mq[..=n as usize].iter().map(|q| q.recip()).sum();
        let at_inf = (Q::from_integer(n.into()) - finite).recip();
        ensure(e.infinity_ratio == MRat::constant(at_inf.clone()) && mq[n as usize + 1] == at_inf && e.relation_holds, || {
            format!("n={n}: ∞ ratio")
        })?;
        notes.push(format!("n={n}: ∞ ratio {at_inf}"));
    }
    Ok(format!("(A1)–(A3) hold; {}", notes.join(", ")))
}

fn criterion_9() -> Verdict {
    let entry = catalog::system("pvi").unwrap();
    let vf = entry.reduced_vf();
    let p = accessible_points(&vf, &[]).map_err(|e| e.to_string())?.into_iter().find(|p| p.label == "0").unwrap();
    let res = alpha_test(&vf, &p, Var::new("t0")).map_err(|e| e.to_string())?;
    let want_m = Mat2::new(r("2/(t0 - 1)"), r("-alpha4/(t0 - 1)"), r("0"), r("1/(t0 - 1)"));
    ensure(res.reduced == want_m, || format!("reduced matrix {}", res.reduced))?;
    ensure(res.pole_solution == r("T/(t0 - 1) + C1"), || format!("W = {}", res.pole_solution))?;
    // Integration constant C2 differs from the displayed one by (t0 − 1)².
    let z = res.closed_form_exact.clone().ok_or("no exact closed form")?;
    let z = z.subst(&HashMap::from([(Var::new("C2"), r("C2*(t0 - 1)^2"))]));
    let display = r("C2*(T + (t0 - 1)*C1)^2 + alpha4*(T + (t0 - 1)*C1)/(t0 - 1)");
    ensure(z == display, || format!("Z = {z}"))?;
    ensure(res.single_valued, || "not single-valued".into())?;
    // The displayed Z solves dZ/dT = (1/W)(2Z − α4 W)/(t0 − 1).
    let w = r("T/(t0 - 1) + C1");
    let lhs = display.derivative(Var::new("T"));
    let rhs = &(&(&r("2") * &display) - &(&r("alpha4") * &w)) / &(&w * &r("t0 - 1"));
    ensure(lhs == rhs, || "Z does not solve the reduced system".into())?;

    let g = catalog::system("gen-pvi").unwrap().specialize(&HashMap::from([(Var::new("n1"), r("3/2"))])).map_err(|e| e.to_string())?;
    let screen = branch_point_screen(&local_indices(&g.reduced_vf(), &[]).map_err(|e| e.to_string())?);
    ensure(screen.branching, || "no branching reported for n1 = 3/2".into())?;
    Ok("reduced system, W linear in T, Z with exponent 2 match; single-valued; n1 = 3/2 branches".into())
}

fn criterion_10() -> Verdict {
    let cases: [MatchCase; 4] = [
        ("gen-piv", &[("n1", "2"), ("n2", "3"), ("a", "4")], "piv"),
        ("gen-pvi", &[("n1", "2"), ("n2", "2"), ("n3", "2"), ("n4", "2")], "pvi"),
        ("gen-pv", &[("n1", "2"), ("n2", "2"), ("n3", "2")], "pv"),
        ("gen-piii", &[("n1", "2"), ("n2", "2")], "piii"),
    ];
    let mut verdicts = Vec::new();
    for (id, vals, rid) in cases {
        let values: HashMap<Var, MRat> = vals.iter().map(|(k, v)| (Var::new(k), r(v))).collect();
        let g = catalog::system(id).unwrap().specialize(&values).map_err(|e| format!("{id}: {e}"))?;
        let reference = reference(rid).unwrap();
        let run = || match_specialization(&g.vf, &g.params, &reference.vf, &reference.params).map_err(|e| e.to_string());
        let (a, b) = (run(), run());
        ensure(a == b, || format!("{id}: verdict not reproducible"))?;
        match a {
            Ok(c) => verdicts.push(format!("{id}→{rid}: found (scale {})", c.scale)),
            Err(e) if id != "gen-piv" => verdicts.push(format!("{id}→{rid}: {e}")),
            Err(e) => return Err(format!("{id}: {e}")),
        }
    }
    Ok(verdicts.join("; "))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        (1, "sixth-system recovery", criterion_1),
        (2, "accessible points and matrices", criterion_2),
        (3, "generalized recoveries", criterion_3),
        (4, "eigenvalue relations", criterion_4),
        (5, "natural-number classifications", criterion_5),
        (6, "birational symmetries", criterion_6),
        (7, "resolution of multiple points", criterion_7),
        (8, "existence construction", criterion_8),
        (9, "alpha-test", criterion_9),
        (10, "specialization correspondences", criterion_10),
    ];
    let mut red = Vec::new();
    for (n, name, check) in criteria {
        match check() {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail}"),
            Err(detail) => {
                println!("criterion {n:>2} FAIL  {name}: {detail}");
                red.push(n);
            }
        }
    }
    assert_eq!(red, KNOWN_RED, "failing criteria differ from the documented ones");
}
