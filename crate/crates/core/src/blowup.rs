//! Blow-ups `(X, Y) ↦ (X, Y/X)`, fiber inversions and the resolution of
//! accessible points of multiplicity two and three.

use std::collections::HashMap;

use serde::Serialize;

use crate::algebra::{MPoly, MRat, Monomial, Var};
use crate::charts::{change_coordinates, chart_transform, ChartId, PlaneVectorField, SurfaceModel};
use crate::error::{GrsError, Result};
use crate::singular::{jacobian_at_origin, translate, AccessiblePoint, LocalIndex};

fn with_coords(vf: &PlaneVectorField, fg: [MRat; 2], coords: [Var; 2]) -> PlaneVectorField {
    let m = HashMap::from([(vf.coords[0], coords[0]), (vf.coords[1], coords[1])]);
    let [a, b] = fg;
    PlaneVectorField { chart: ChartId::Local, model: vf.model.clone(), coords, dxdt: a.rename(&m), dydt: b.rename(&m) }
}

/// Rewrite in `(X1, Y1) = (X, Y/X)`; the point must already be at the origin.
pub fn blow_up(vf: &PlaneVectorField, coords: [Var; 2]) -> PlaneVectorField {
    let [u, v] = vf.coords.map(MRat::var);
    let phi = [u.clone(), &v / &u];
    let psi = [u.clone(), &u * &v];
    with_coords(vf, change_coordinates(vf.components(), vf.coords, &phi, &psi), coords)
}

/// Rewrite in `(X', Y') = (X, 1/Y)`.
pub fn fiber_invert(vf: &PlaneVectorField, coords: [Var; 2]) -> PlaneVectorField {
    let [u, v] = vf.coords.map(MRat::var);
    let inv = &MRat::one() / &v;
    let phi = [u.clone(), inv.clone()];
    with_coords(vf, change_coordinates(vf.components(), vf.coords, &phi, &phi), coords)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Step {
    BlowUp { coords: [Var; 2] },
    FiberInvert { coords: [Var; 2] },
    Translate { to: [MRat; 2] },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResolutionTrace {
    pub steps: Vec<Step>,
    /// Composite chart map from `(x, y)` to the final coordinates, before the
    /// final translation.
    pub final_chart_map: [MRat; 2],
    /// Resolved point in the final coordinates.
    pub point: [MRat; 2],
    /// Conditions met along the way (each must vanish).
    pub conditions: Vec<MRat>,
    /// The field centered at the resolved point; the pole is the first
    /// coordinate.
    pub centered: PlaneVectorField,
}

/// Coefficient extraction of `(h·F_k)` at `h = 0` as a polynomial in the other
/// coordinate.
fn pole_numerator(vf: &PlaneVectorField, pole: usize) -> Result<MRat> {
    let h = vf.coords[pole];
    let k = 1 - pole;
    (&MRat::var(h) * vf.components()[k]).try_subst(&HashMap::from([(h, MRat::zero())]))
}

fn names(i: usize) -> [Var; 2] {
    [Var::new(&format!("X{i}")), Var::new(&format!("Y{i}"))]
}

/// Composite chart map from `(x, y)` to the chart of an accessible point.
fn chart_map_of(model: &SurfaceModel, p: &AccessiblePoint) -> [MRat; 2] {
    let x = MRat::sym("x");
    let y = MRat::sym("y");
    let one = MRat::one();
    match p.chart {
        ChartId::U2 => [x, &one / &y],
        ChartId::U3 => [&one / &x, &one / &model.w1(&x, &y)],
        _ => panic!("resolution starts in U2 or U3"),
    }
}

/// The resolution procedure. `impose` receives conditions that must vanish
/// and returns a substitution making them vanish (or an error); it is called
/// for the order conditions of the pole numerator, then after each
/// intermediate blow-up. `point` fixes the resolved point; otherwise it is the
/// root with nonzero fiber coordinate on the last exceptional line.
pub fn resolve_with(
    vf: &PlaneVectorField,
    p: &AccessiblePoint,
    multiplicity: u32,
    point: Option<&[MRat; 2]>,
    impose: &mut dyn FnMut(Vec<MRat>) -> Result<HashMap<Var, MRat>>,
) -> Result<(ResolutionTrace, HashMap<Var, MRat>)> {
    if !(2..=3).contains(&multiplicity) {
        return Err(GrsError::NotResolvable(format!("multiplicity {multiplicity} is not 2 or 3")));
    }
    let base = if vf.chart == p.chart { vf.clone() } else { chart_transform(vf, p.chart) };
    let mut g = translate(&base, &p.point);
    let mut map = {
        let m = chart_map_of(&vf.model, p);
        [&m[0] - &p.point[0], &m[1] - &p.point[1]]
    };
    let mut subst: HashMap<Var, MRat> = HashMap::new();
    let mut conditions = Vec::new();
    let mut apply =
        |g: &mut PlaneVectorField, conds: Vec<MRat>, subst: &mut HashMap<Var, MRat>, conditions: &mut Vec<MRat>| -> Result<()> {
            conditions.extend(conds.iter().cloned());
            let s = impose(conds)?;
            if !s.is_empty() {
                *g = g.subst(&s);
                for v in subst.values_mut() {
                    *v = v.subst(&s);
                }
                subst.extend(s);
            }
            Ok(())
        };

    // Order conditions: the pole numerator vanishes to `multiplicity`.
    let num = pole_numerator(&g, 1)?;
    let u = g.coords[0];
    if !num.is_polynomial_in(&[u]) {
        return Err(GrsError::NotResolvable(format!("pole numerator {num} is not polynomial")));
    }
    let conds: Vec<MRat> = (0..multiplicity).map(|k| num.coeff_of(&[u], &Monomial::power(u, k))).collect();
    apply(&mut g, conds, &mut subst, &mut conditions)?;

    let mut steps = Vec::new();
    for i in 1..multiplicity {
        let c = names(i as usize);
        g = blow_up(&g, c);
        map = [map[0].clone(), &map[1] / &map[0]];
        steps.push(Step::BlowUp { coords: c });
        let e = (&MRat::var(c[0]) * &g.dydt)
            .try_subst(&HashMap::from([(c[0], MRat::zero()), (c[1], MRat::zero())]))
            .map_err(|_| GrsError::NotResolvable(format!("after blow-up {i} the origin is not accessible")))?;
        apply(&mut g, vec![e], &mut subst, &mut conditions)?;
    }
    let last = multiplicity as usize;
    g = blow_up(&g, names(last));
    map = [map[0].clone(), &map[1] / &map[0]];
    steps.push(Step::BlowUp { coords: names(last) });
    g = fiber_invert(&g, names(last));
    map = [map[0].clone(), &MRat::one() / &map[1]];
    steps.push(Step::FiberInvert { coords: names(last) });

    let pt = match point {
        Some(pt) => pt.clone(),
        None => [MRat::zero(), resolved_root(&g)?],
    };
    g = translate(&g, &pt);
    steps.push(Step::Translate { to: pt.clone() });
    let trace = ResolutionTrace { steps, final_chart_map: map, point: pt, conditions, centered: g };
    Ok((trace, subst))
}

/// Nonzero root of `(X·dY/dt)|_{X=0}` in `Y`.
fn resolved_root(g: &PlaneVectorField) -> Result<MRat> {
    let [xv, yv] = g.coords;
    let e = (&MRat::var(xv) * &g.dydt)
        .try_subst(&HashMap::from([(xv, MRat::zero())]))
        .map_err(|_| GrsError::NotResolvable("the exceptional line carries a higher-order pole".into()))?;
    if !e.is_polynomial_in(&[yv]) {
        return Err(GrsError::NotResolvable(format!("{e} is not polynomial on the exceptional line")));
    }
    let mut p = e.num().clone();
    if p.is_zero() {
        return Err(GrsError::NotResolvable("the exceptional line is entirely singular".into()));
    }
    let m = p.order_in(yv);
    p = p.div_monomial(&Monomial::power(yv, m)).expect("power divides");
    match p.degree_in(yv) {
        0 => Err(GrsError::NotResolvable("no accessible point off the strict transform".into())),
        1 => Ok(MRat::new(-p.coeff_in(yv, 0), p.coeff_in(yv, 1)).expect("degree one")),
        _ => Err(GrsError::UnresolvedFactor(p.to_string())),
    }
}

fn check_zero(conds: Vec<MRat>) -> Result<HashMap<Var, MRat>> {
    match conds.iter().find(|c| !c.is_zero()) {
        Some(c) => Err(GrsError::NotResolvable(format!("condition {c} = 0 fails"))),
        None => Ok(HashMap::new()),
    }
}

/// Resolve a multiple accessible point of a concrete system and linearize at
/// the resolved point.
pub fn resolve_multiplicity(vf: &PlaneVectorField, p: &AccessiblePoint) -> Result<(ResolutionTrace, LocalIndex)> {
    let (trace, _) = resolve_with(vf, p, p.multiplicity, None, &mut check_zero)?;
    let j = jacobian_at_origin(&trace.centered, 0).map_err(|e| GrsError::NotResolvable(e.to_string()))?;
    let li = LocalIndex::from_matrix(j, 0)?;
    Ok((trace, li))
}

/// Each pair of the three conditions, with the conditions of one not implied
/// by the other.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub double_point: Vec<MRat>,
    pub degenerate_matrix: Vec<MRat>,
    pub coefficients: Vec<MRat>,
    pub residuals: Vec<(String, Vec<MRat>)>,
    pub equivalent: bool,
}

fn solve_monomial_conditions(conds: &[MRat], unknowns: &[Var]) -> Result<HashMap<Var, MRat>> {
    let eqs: Vec<MPoly> = conds.iter().map(|c| c.num().clone()).filter(|p| !p.is_zero()).collect();
    let sol = crate::algebra::solve_triangular(&eqs, unknowns)?;
    Ok(sol.as_map())
}

/// On the ten-coefficient family at `X = 0`: a double point (two-step
/// resolution conditions) ⇔ accessible with matrix of shape `f·[[0, *], [0, 0]]`
/// ⇔ `a5 = a7 = a10 = 0`.
pub fn degenerate_matrix_criterion(family: &crate::charts::CoefficientFamily) -> Result<EquivalenceReport> {
    let unknowns = family.unknowns.clone();
    let p = AccessiblePoint { label: "0".into(), chart: ChartId::U2, point: [MRat::zero(), MRat::zero()], pole: 1, multiplicity: 2 };

    let mut collected: Vec<MRat> = Vec::new();
    let mut impose = |conds: Vec<MRat>| -> Result<HashMap<Var, MRat>> {
        collected.extend(conds.iter().cloned());
        solve_monomial_conditions(&conds, &unknowns)
    };
    let (_, sub1) = resolve_with(&family.vf, &p, 2, Some(&[MRat::zero(), MRat::zero()]), &mut impose)?;
    let double_point: Vec<MRat> = collected.into_iter().filter(|c| !c.is_zero()).collect();

    let u2 = chart_transform(&family.vf, ChartId::U2);
    let f1 = pole_numerator(&u2, 1)?;
    let access = f1.try_subst(&HashMap::from([(u2.coords[0], MRat::zero())]))?;
    let y = MRat::var(u2.coords[1]);
    let g = [&y * &u2.dxdt, &y * &u2.dydt];
    let o = HashMap::from([(u2.coords[0], MRat::zero()), (u2.coords[1], MRat::zero())]);
    let d = |i: usize, j: usize| g[i].derivative(u2.coords[j]).subst(&o);
    let degenerate_matrix: Vec<MRat> = [access, d(0, 0), d(1, 0), d(1, 1)].into_iter().filter(|c| !c.is_zero()).collect();
    let sub2 = solve_monomial_conditions(&degenerate_matrix, &unknowns)?;

    let coefficients: Vec<MRat> = ["a5", "a7", "a10"].iter().map(|n| MRat::sym(n)).collect();
    let sub3 = solve_monomial_conditions(&coefficients, &unknowns)?;

    let sets =
        [("double point", &double_point, &sub1), ("degenerate matrix", &degenerate_matrix, &sub2), ("coefficients", &coefficients, &sub3)];
    let mut residuals = Vec::new();
    for (na, ca, _) in &sets {
        for (nb, _, sb) in &sets {
            if na == nb {
                continue;
            }
            let left: Vec<MRat> = ca.iter().map(|c| c.subst(sb)).filter(|c| !c.is_zero()).collect();
            residuals.push((format!("{nb} ⇒ {na}"), left));
        }
    }
    let equivalent = residuals.iter().all(|r| r.1.is_empty());
    Ok(EquivalenceReport { double_point, degenerate_matrix, coefficients, residuals, equivalent })
}

/// Diagonal entries of the graded blocks of `Y·(dX/dt, dY/dt)` on U2:
/// `(a2, a5, a9, a10)` read as `[X²]P, [X]P, −[XY]Q, −[Y]Q`.
pub fn expansion_eigenvalues(vf: &PlaneVectorField) -> Result<[MRat; 4]> {
    let u2 = if vf.chart == ChartId::U2 { vf.clone() } else { chart_transform(vf, ChartId::U2) };
    let [xv, yv] = u2.coords;
    let y = MRat::var(yv);
    let p = &y * &u2.dxdt;
    let q = &y * &u2.dydt;
    for (n, e) in [("Y·dX/dt", &p), ("Y·dY/dt", &q)] {
        if !e.is_polynomial_in(&u2.coords) {
            return Err(GrsError::MalformedExpansion(format!("{n} = {e} is not polynomial")));
        }
    }
    let mono = |a: u32, b: u32| Monomial::from_pairs([(xv, a), (yv, b)]);
    for k in 1..=3 {
        let c = q.coeff_of(&u2.coords, &mono(k, 0));
        if !c.is_zero() {
            return Err(GrsError::MalformedExpansion(format!("Y·dY/dt has a pure X^{k} term {c}")));
        }
    }
    let a2 = p.coeff_of(&u2.coords, &mono(2, 0));
    let a5 = p.coeff_of(&u2.coords, &mono(1, 0));
    let a9 = -q.coeff_of(&u2.coords, &mono(1, 1));
    let a10 = -q.coeff_of(&u2.coords, &mono(0, 1));
    Ok([a2, a5, a9, a10])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_rat;
    use crate::charts::sigma2_family;

    fn r(s: &str) -> MRat {
        parse_rat(s).unwrap()
    }

    #[test]
    fn radial_field() {
        let vf = PlaneVectorField::new(SurfaceModel::painleve(), ChartId::Local, r("u"), r("v"));
        let b = blow_up(&vf, names(1));
        assert_eq!(b.dxdt, r("X1"));
        assert!(b.dydt.is_zero());
    }

    #[test]
    fn inversion_round_trip() {
        let vf = PlaneVectorField::new(SurfaceModel::painleve(), ChartId::Local, r("u*v + 1"), r("v^2 - u"));
        let back = fiber_invert(&fiber_invert(&vf, names(1)), [Var::new("u"), Var::new("v")]);
        assert_eq!(back, vf);
    }

    #[test]
    fn criterion_on_family() {
        let fam = sigma2_family(&SurfaceModel::painleve());
        let rep = degenerate_matrix_criterion(&fam).unwrap();
        assert!(rep.equivalent, "{rep:?}");
    }

    #[test]
    fn expansion_of_triple_point_family() {
        let fam = sigma2_family(&SurfaceModel::painleve());
        let z: HashMap<Var, MRat> = ["a2", "a5", "a7", "a9", "a10"].iter().map(|n| (Var::new(n), MRat::zero())).collect();
        let e = expansion_eigenvalues(&fam.vf.subst(&z)).unwrap();
        assert!(e.iter().all(|c| c.is_zero()));
        let zero = PlaneVectorField::new(SurfaceModel::painleve(), ChartId::U0, MRat::zero(), MRat::zero());
        assert!(expansion_eigenvalues(&zero).unwrap().iter().all(|c| c.is_zero()));
    }
}
