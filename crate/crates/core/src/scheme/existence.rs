//! Systems with n+1 finite simple points and one at infinity, built from
//! prescribed positions and local-index ratios.

use std::collections::HashMap;

use serde::Serialize;

use crate::algebra::{solve_triangular_with, MPoly, MRat, SolveOptions, Var};
use crate::charts::{b_family, SurfaceModel};
use crate::error::{GrsError, Result};
use crate::singular::{accessible_points, linearization};

use super::{normalize_relation, RecoveredSystem};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExistenceSystem {
    pub system: RecoveredSystem,
    /// Ratio of the local index at each point, finite points first, `∞` last.
    pub ratios: Vec<(String, MRat)>,
    /// `1/(n − Σ_{i≤n+1} 1/m_i)`, the ratio forced at infinity.
    pub infinity_ratio: MRat,
    /// `Σ 1/m_i = n` over all n+2 points.
    pub relation_holds: bool,
}

/// Σn twisted by symbols `g1, …, g_{n−1}`.
pub fn twisted_model(n: u32) -> Result<SurfaceModel> {
    if n < 1 {
        return Err(GrsError::InvalidN(n as i64));
    }
    SurfaceModel::new(n, (1..n).map(|k| MRat::sym(&format!("g{k}"))).collect())
}

fn scale_var() -> Var {
    Var::new("a")
}

/// The field with `dx/dt = a·Π(x − r)·y + b1`, `y²`-coefficient of `dy/dt`
/// equal to `−a·Σ_j (1/m_j)·Π_{i≠j}(x − r_i)` over the roots `r = (c…, t)`,
/// and the remaining coefficients fixed by holomorphy in U1 (free ones set
/// to zero).
fn build(n: u32, roots: &[MRat], m: &[MRat]) -> Result<RecoveredSystem> {
    let model = twisted_model(n)?;
    let family = b_family(&model, false);
    let x = MRat::sym("x");
    let a = MRat::var(scale_var());
    let lin = |r: &MRat| &x - r;
    let mut b2 = a.clone();
    for r in roots {
        b2 = &b2 * &lin(r);
    }
    let mut b5 = MRat::zero();
    for (j, mj) in m.iter().enumerate() {
        let mut term = mj.recip()?;
        for (i, r) in roots.iter().enumerate() {
            if i != j {
                term = &term * &lin(r);
            }
        }
        b5 = &b5 + &term;
    }
    b5 = &(-&a) * &b5;

    let xv = Var::new("x");
    let yv = Var::new("y");
    let [dx, dy] = family.vf.components();
    let fam_b2 = dx.derivative(yv);
    let fam_b5 = &dy.derivative(yv).derivative(yv) * &MRat::frac(1, 2);
    let mut eqs: Vec<MPoly> = Vec::new();
    for diff in [&fam_b2 - &b2, &fam_b5 - &b5] {
        let (num, _) = diff.into_parts();
        eqs.extend(num.coefficients_over(&[xv]).into_values());
    }
    let opts = SolveOptions { priority: vec![], nonvanishing: vec![] };
    let sol = solve_triangular_with(&eqs, &family.unknowns, &opts).map_err(GrsError::from)?;
    let mut sub = sol.as_map();
    for v in &sol.free {
        sub.insert(*v, MRat::zero());
    }
    for v in sub.values_mut() {
        let zeros: HashMap<Var, MRat> = sol.free.iter().map(|f| (*f, MRat::zero())).collect();
        *v = v.subst(&zeros);
    }
    let vf = family.vf.subst(&sub);
    Ok(RecoveredSystem {
        vf,
        free: vec![scale_var()],
        solution: sub.into_iter().collect(),
        trace: sol.trace,
        relation: None,
        relation_poly: None,
    })
}

fn check_points(c: &[MRat]) -> Result<Vec<MRat>> {
    let t = MRat::var(crate::algebra::t_var());
    let mut roots = c.to_vec();
    roots.push(t);
    for (i, a) in roots.iter().enumerate() {
        for b in &roots[i + 1..] {
            if a == b {
                return Err(GrsError::DegeneratePoints(format!("point {a} appears twice")));
            }
        }
    }
    Ok(roots)
}

/// Ratios of the local indices of `vf` at the finite roots and at infinity.
fn ratios(sys: &RecoveredSystem, roots: &[MRat]) -> Result<Vec<(String, MRat)>> {
    let pts = accessible_points(&sys.vf, roots)?;
    if pts.len() != roots.len() + 1 || pts.iter().any(|p| p.multiplicity != 1) {
        return Err(GrsError::VerificationMismatch(format!(
            "expected {} simple accessible points, found {}",
            roots.len() + 1,
            pts.iter().map(|p| format!("{}(×{})", p.label, p.multiplicity)).collect::<Vec<_>>().join(", ")
        )));
    }
    let mut out = Vec::new();
    for r in roots {
        let p = pts
            .iter()
            .find(|p| p.chart == crate::charts::ChartId::U2 && &p.point[0] == r)
            .ok_or_else(|| GrsError::VerificationMismatch(format!("X={r} is not accessible")))?;
        out.push((r.to_string(), ratio_of(&sys.vf, p)?));
    }
    let inf = pts
        .iter()
        .find(|p| p.chart == crate::charts::ChartId::U3)
        .ok_or_else(|| GrsError::VerificationMismatch("X=∞ is not accessible".into()))?;
    out.push(("∞".into(), ratio_of(&sys.vf, inf)?));
    Ok(out)
}

fn ratio_of(vf: &crate::charts::PlaneVectorField, p: &crate::singular::AccessiblePoint) -> Result<MRat> {
    linearization(vf, p)?.ratio.ok_or(GrsError::ZeroLeadingEigenvalue)
}

/// Build the system for points `c` (plus `t` and `∞`) with local-index ratios
/// `m` (n+2 of them, `∞` last) and verify positions, ratios and the relation.
pub fn construct_existence_system(n: u32, c: &[MRat], m: &[MRat]) -> Result<ExistenceSystem> {
    if n < 1 {
        return Err(GrsError::InvalidN(n as i64));
    }
    if c.len() != n as usize || m.len() != n as usize + 2 {
        return Err(GrsError::ShapeMismatch(format!("need {n} points and {} ratios, got {} and {}", n + 2, c.len(), m.len())));
    }
    let roots = check_points(c)?;
    if let Some(i) = m.iter().position(|r| r.is_zero()) {
        return Err(GrsError::ZeroEntry(i));
    }
    let total = m.iter().fold(MRat::zero(), |acc, r| &acc + &r.recip().expect("nonzero"));
    let nq = MRat::int(n as i64);
    if total != nq {
        return Err(GrsError::RelationViolated(format!("Σ 1/m_i = {total}, expected {n}")));
    }
    let finite_sum = m[..=n as usize].iter().fold(MRat::zero(), |acc, r| &acc + &r.recip().expect("nonzero"));
    let infinity_ratio = (&nq - &finite_sum).recip()?;

    let system = build(n, &roots, &m[..=n as usize])?;
    let got = ratios(&system, &roots)?;
    for ((label, r), want) in got.iter().zip(m) {
        if r != want {
            return Err(GrsError::VerificationMismatch(format!("ratio at X={label} is {r}, expected {want}")));
        }
    }
    let relation_holds = got.last().map(|(_, r)| r) == Some(&infinity_ratio);
    Ok(ExistenceSystem { system, ratios: got, infinity_ratio, relation_holds })
}

/// The relation among symbolic ratios `m1, …, m_{n+2}` forced by the
/// construction: the computed ratio at infinity must equal `m_{n+2}`.
pub fn existence_relation(n: u32, c: &[MRat]) -> Result<MPoly> {
    let roots = check_points(c)?;
    let ms: Vec<Var> = (1..=n + 2).map(|i| Var::new(&format!("m{i}"))).collect();
    let m: Vec<MRat> = ms[..=n as usize].iter().map(|v| MRat::var(*v)).collect();
    let system = build(n, &roots, &m)?;
    let got = ratios(&system, &roots)?;
    let at_inf = &got.last().expect("∞ is listed").1;
    let cond = &at_inf.recip()? - &MRat::var(ms[n as usize + 1]).recip()?;
    Ok(normalize_relation(cond.num(), &ms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_rat;

    fn rs(v: &[&str]) -> Vec<MRat> {
        v.iter().map(|s| parse_rat(s).unwrap()).collect()
    }

    #[test]
    fn four_points_all_two() {
        let e = construct_existence_system(2, &rs(&["0", "1"]), &rs(&["2", "2", "2", "2"])).unwrap();
        assert!(e.relation_holds);
        assert_eq!(e.infinity_ratio, MRat::int(2));
        assert!(e.ratios.iter().all(|(_, r)| *r == MRat::int(2)));
    }

    #[test]
    fn five_points() {
        let e = construct_existence_system(3, &rs(&["0", "1", "2"]), &rs(&["1", "2", "2", "2", "2"])).unwrap();
        assert!(e.relation_holds);
        let got: Vec<MRat> = e.ratios.iter().map(|(_, r)| r.clone()).collect();
        assert_eq!(got, rs(&["1", "2", "2", "2", "2"]));
    }

    #[test]
    fn preconditions() {
        let err = construct_existence_system(2, &rs(&["0", "1"]), &rs(&["1", "1", "1", "1"]));
        assert!(matches!(err, Err(GrsError::RelationViolated(_))));
        let err = construct_existence_system(2, &rs(&["0", "0"]), &rs(&["2", "2", "2", "2"]));
        assert!(matches!(err, Err(GrsError::DegeneratePoints(_))));
        let err = construct_existence_system(2, &rs(&["0", "t"]), &rs(&["2", "2", "2", "2"]));
        assert!(matches!(err, Err(GrsError::DegeneratePoints(_))));
    }

    #[test]
    fn relation_is_reciprocal_sum() {
        let r = existence_relation(2, &rs(&["0", "1"])).unwrap();
        let want = crate::algebra::parse_poly("m2*m3*m4 + m1*m3*m4 + m1*m2*m4 + m1*m2*m3 - 2*m1*m2*m3*m4").unwrap();
        assert!(r == want.integer_primitive() || r == (-want).integer_primitive(), "{r}");
    }
}
