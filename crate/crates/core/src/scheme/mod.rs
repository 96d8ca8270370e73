//! Geometric Riemann schemes: the constraint system a scheme imposes on the
//! generic family, its solution, and the eigenvalue relations it forces.

pub mod existence;
pub mod matching;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{gcd_many, solve_triangular_with, MPoly, MRat, Mat2, SolveFailure, SolveOptions, TraceStep, Var};
use crate::blowup::{resolve_multiplicity, resolve_with};
use crate::charts::{chart_transform, generic_family, ChartId, CoefficientFamily, PlaneVectorField, SurfaceModel};
use crate::error::{GrsError, Result};
use crate::singular::{accessible_points, jacobian_at_origin, linearization, translate, AccessiblePoint};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Location {
    Finite(MRat),
    Infinity,
}

impl Location {
    pub fn label(&self) -> String {
        match self {
            Location::Finite(c) => c.to_string(),
            Location::Infinity => "∞".into(),
        }
    }

    pub fn parse(s: &str) -> Result<Location> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Location::Infinity),
            other => Ok(Location::Finite(crate::algebra::parse_rat(other)?)),
        }
    }

    /// The accessible point this location names, in U2 or U3.
    pub fn point(&self, multiplicity: u32) -> AccessiblePoint {
        match self {
            Location::Finite(c) => {
                AccessiblePoint { label: self.label(), chart: ChartId::U2, point: [c.clone(), MRat::zero()], pole: 1, multiplicity }
            }
            Location::Infinity => {
                AccessiblePoint { label: self.label(), chart: ChartId::U3, point: [MRat::zero(), MRat::zero()], pole: 1, multiplicity }
            }
        }
    }
}

impl Serialize for Location {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Location::Finite(c) => s.serialize_str(&c.to_string()),
            Location::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Location {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Location, D::Error> {
        let s = String::deserialize(d)?;
        Location::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// A matrix entry of a scheme; `None` is an unconstrained entry (`*`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Entry(pub Option<MRat>);

impl Serialize for Entry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match &self.0 {
            Some(r) => s.serialize_str(&r.to_string()),
            None => s.serialize_str("*"),
        }
    }
}

impl<'de> Deserialize<'de> for Entry {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Entry, D::Error> {
        let s = String::deserialize(d)?;
        if s.trim() == "*" {
            Ok(Entry(None))
        } else {
            crate::algebra::parse_rat(&s).map(|r| Entry(Some(r))).map_err(serde::de::Error::custom)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolved {
    /// Patching map label such as `(x, x^2*y)`.
    pub map: String,
    pub point: [MRat; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularSpec {
    pub location: Location,
    #[serde(default = "one")]
    pub multiplicity: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolved: Option<Resolved>,
    /// Entries of the matrix, up to an overall nonzero scale.
    pub matrix: [[Entry; 2]; 2],
}

fn one() -> u32 {
    1
}

impl SingularSpec {
    pub fn simple(location: Location, m: [[&str; 2]; 2]) -> SingularSpec {
        SingularSpec { location, multiplicity: 1, resolved: None, matrix: entries(m) }
    }

    pub fn multiple(location: Location, multiplicity: u32, map: &str, point: [&str; 2], m: [[&str; 2]; 2]) -> SingularSpec {
        let point = point.map(|s| crate::algebra::parse_rat(s).expect("builtin point"));
        SingularSpec { location, multiplicity, resolved: Some(Resolved { map: map.into(), point }), matrix: entries(m) }
    }

    /// Pole coordinate index at the point where the matrix is read.
    pub fn pole(&self) -> usize {
        if self.multiplicity > 1 {
            0
        } else {
            1
        }
    }

    fn subst(&self, m: &HashMap<Var, MRat>) -> SingularSpec {
        let mut out = self.clone();
        for row in out.matrix.iter_mut() {
            for e in row.iter_mut() {
                if let Some(r) = &e.0 {
                    e.0 = Some(r.subst(m));
                }
            }
        }
        out
    }
}

fn entries(m: [[&str; 2]; 2]) -> [[Entry; 2]; 2] {
    m.map(|row| row.map(|s| if s == "*" { Entry(None) } else { Entry(Some(crate::algebra::parse_rat(s).expect("builtin entry"))) }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GRScheme {
    #[serde(default)]
    pub name: String,
    pub model: SurfaceModel,
    pub specs: Vec<SingularSpec>,
    #[serde(default)]
    pub params: Vec<Var>,
    /// Eigenvalue symbols; a relation among them may be required.
    #[serde(default)]
    pub eigenvalues: Vec<Var>,
}

impl GRScheme {
    pub fn validate(&self) -> Result<()> {
        for s in &self.specs {
            if s.multiplicity == 0 {
                return Err(GrsError::Invalid(format!("X={}: multiplicity 0", s.location.label())));
            }
            if (s.multiplicity >= 2) != s.resolved.is_some() {
                return Err(GrsError::Invalid(format!(
                    "X={}: resolved-point data is required exactly for multiple points",
                    s.location.label()
                )));
            }
        }
        for (i, a) in self.specs.iter().enumerate() {
            for b in &self.specs[i + 1..] {
                if a.location == b.location {
                    return Err(GrsError::DegeneratePoints(format!("X={} is listed twice", a.location.label())));
                }
            }
        }
        Ok(())
    }
}

/// Elimination order used for the ten-coefficient family.
pub fn sigma2_priority() -> Vec<Var> {
    ["a7", "a5", "a8", "a2", "a10", "a9", "a3", "a4", "a6", "a1"].iter().map(|n| Var::new(n)).collect()
}

/// Equations `J_ij·M_ref − J_ref·M_ij = 0` expressing `J = f·M` for some
/// nonzero `f`; returns the equations and the reference entry of `J` (the
/// scale, which must not vanish).
pub fn matrix_equations(j: &Mat2, m: &[[Entry; 2]; 2], pole: usize) -> (Vec<MRat>, Option<MRat>) {
    let fixed: Vec<(usize, usize, &MRat)> =
        (0..2).flat_map(|i| (0..2).map(move |k| (i, k))).filter_map(|(i, k)| m[i][k].0.as_ref().map(|e| (i, k, e))).collect();
    let reference = fixed
        .iter()
        .find(|(i, k, e)| *i == pole && *k == pole && !e.is_zero())
        .or_else(|| fixed.iter().find(|(_, _, e)| !e.is_zero()))
        .copied();
    match reference {
        None => (fixed.iter().map(|(i, k, _)| j.get(*i, *k).clone()).collect(), None),
        Some((ri, rk, mref)) => {
            let jref = j.get(ri, rk).clone();
            let eqs =
                fixed.iter().filter(|(i, k, _)| (*i, *k) != (ri, rk)).map(|(i, k, e)| &(j.get(*i, *k) * mref) - &(&jref * *e)).collect();
            (eqs, Some(jref))
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ConstraintSystem {
    pub equations: Vec<MPoly>,
    /// Substitution fixed while resolving multiple points.
    pub presolved: HashMap<Var, MRat>,
    pub presolve_trace: Vec<TraceStep>,
    /// Scales that must not vanish.
    pub nonvanishing: Vec<MRat>,
}

fn numerators(exprs: &[MRat]) -> Vec<MPoly> {
    exprs.iter().map(|e| e.num().clone()).filter(|p| !p.is_zero()).collect()
}

fn solve_options(family: &CoefficientFamily, nonvanishing: Vec<MRat>) -> SolveOptions {
    let mut priority = sigma2_priority();
    priority.extend(family.unknowns.iter().copied());
    SolveOptions { priority, nonvanishing }
}

/// Constraints imposed by `scheme` on `family`. Multiple points are resolved
/// first, fixing their order and blow-up conditions as they arise.
pub fn generate_constraints(family: &CoefficientFamily, scheme: &GRScheme) -> std::result::Result<ConstraintSystem, GrsError> {
    let mut cs = ConstraintSystem::default();
    let mut vf = family.vf.clone();
    let opts = solve_options(family, vec![]);

    let mut order: Vec<&SingularSpec> = scheme.specs.iter().filter(|s| s.multiplicity > 1).collect();
    order.extend(scheme.specs.iter().filter(|s| s.multiplicity == 1));

    for spec in order {
        let p = spec.location.point(spec.multiplicity);
        if spec.multiplicity == 1 {
            let c = translate(&chart_transform(&vf, p.chart), &p.point);
            let (access, j) = cleared_data(&c, 1)?;
            cs.equations.extend(numerators(&access));
            let (eqs, scale) = matrix_equations(&j, &spec.matrix, 1);
            cs.equations.extend(numerators(&eqs));
            cs.nonvanishing.extend(scale);
            continue;
        }
        let resolved = spec.resolved.as_ref().expect("validated");
        let unknowns = family.unknowns.clone();
        let mut steps: Vec<TraceStep> = Vec::new();
        let mut impose = |conds: Vec<MRat>| -> Result<HashMap<Var, MRat>> {
            let eqs = numerators(&conds);
            let sol = solve_triangular_with(&eqs, &unknowns, &opts).map_err(GrsError::from)?;
            steps.extend(sol.trace.iter().cloned());
            Ok(sol.as_map())
        };
        let (trace, sub) = resolve_with(&vf, &p, spec.multiplicity, Some(&resolved.point), &mut impose)?;
        cs.presolve_trace.extend(steps);
        vf = vf.subst(&sub);
        for e in cs.equations.iter_mut() {
            *e = MRat::from_poly(e.clone()).subst(&sub).num().clone();
        }
        for v in cs.presolved.values_mut() {
            *v = v.subst(&sub);
        }
        cs.presolved.extend(sub);
        let (access, j) = cleared_data(&trace.centered, 0)?;
        cs.equations.extend(numerators(&access));
        let (eqs, scale) = matrix_equations(&j, &spec.matrix, 0);
        cs.equations.extend(numerators(&eqs));
        cs.nonvanishing.extend(scale);
    }
    cs.equations.retain(|e| !e.is_zero());
    Ok(cs)
}

/// Values of the pole-cleared field at the origin (which must vanish) and its
/// Jacobian there, for a field with symbolic coefficients.
fn cleared_data(c: &PlaneVectorField, pole: usize) -> Result<(Vec<MRat>, Mat2)> {
    let h = MRat::var(c.coords[pole]);
    let g = [&h * &c.dxdt, &h * &c.dydt];
    let o = HashMap::from([(c.coords[0], MRat::zero()), (c.coords[1], MRat::zero())]);
    let mut access = Vec::new();
    for gi in &g {
        let v = gi.try_subst(&o).map_err(|_| GrsError::NotAccessible(format!("{gi} has a pole at the point")))?;
        access.push(v);
    }
    let e = |i: usize, k: usize| g[i].derivative(c.coords[k]).try_subst(&o);
    Ok((access, Mat2::new(e(0, 0)?, e(0, 1)?, e(1, 0)?, e(1, 1)?)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecoveredSystem {
    pub vf: PlaneVectorField,
    /// Unknowns left free: an overall scale such as `a(t)`.
    pub free: Vec<Var>,
    pub solution: BTreeMap<Var, MRat>,
    pub trace: Vec<TraceStep>,
    /// Eigenvalue eliminated through the forced relation, with its value.
    pub relation: Option<(Var, MRat)>,
    pub relation_poly: Option<MPoly>,
}

impl RecoveredSystem {
    /// Fix the free overall scale.
    pub fn with_scale(&self, value: &MRat) -> RecoveredSystem {
        let m: HashMap<Var, MRat> = self.free.iter().map(|v| (*v, value.clone())).collect();
        RecoveredSystem { vf: self.vf.subst(&m), free: vec![], ..self.clone() }
    }
}

/// Normalize a parameter relation: keep its factor in the eigenvalue symbols
/// alone when there is one, strip factors free of them and monomial factors,
/// and make it integer-primitive.
pub fn normalize_relation(r: &MPoly, eigen: &[Var]) -> MPoly {
    let mut r = r.clone();
    let others: Vec<Var> = r.vars().into_iter().filter(|v| !eigen.contains(v)).collect();
    if !others.is_empty() {
        let g = gcd_many(r.coefficients_over(&others).values());
        if g.contains_any(eigen) {
            r = g;
        }
    }
    if r.contains_any(eigen) {
        let groups = r.coefficients_over(eigen);
        let g = gcd_many(groups.values());
        if !g.is_constant() {
            r = r.div_exact(&g).expect("content divides");
        }
    }
    let m = r.monomial_content();
    r = r.div_monomial(&m).expect("monomial content divides");
    r.integer_primitive()
}

fn solve_scheme(
    family: &CoefficientFamily,
    scheme: &GRScheme,
) -> std::result::Result<(ConstraintSystem, crate::algebra::Solution), (GrsError, Option<MPoly>)> {
    let cs = generate_constraints(family, scheme).map_err(|e| (e, None))?;
    let opts = solve_options(family, cs.nonvanishing.clone());
    let remaining: Vec<Var> = family.unknowns.iter().copied().filter(|u| !cs.presolved.contains_key(u)).collect();
    match solve_triangular_with(&cs.equations, &remaining, &opts) {
        Ok(sol) => Ok((cs, sol)),
        Err(SolveFailure::Relation(r)) => {
            let e = GrsError::RelationRequired(r.to_string());
            Err((e, Some(r)))
        }
        Err(f) => Err((f.into(), None)),
    }
}

fn is_overall_scale(vf: &PlaneVectorField, v: Var) -> bool {
    let s = MRat::var(v);
    vf.components().iter().all(|c| (*c / &s).vars().iter().all(|w| *w != v))
}

/// Solve the constraints of `scheme` on the generic family, eliminating an
/// eigenvalue through a forced relation when needed, and re-verify.
pub fn recover(scheme: &GRScheme) -> Result<RecoveredSystem> {
    scheme.validate()?;
    let family = generic_family(&scheme.model);
    let mut current = scheme.clone();
    let mut relation: Option<(Var, MRat)> = None;
    let mut relation_poly = None;
    let (cs, sol) = loop {
        match solve_scheme(&family, &current) {
            Ok(ok) => break ok,
            Err((_, Some(r))) if relation.is_none() => {
                let norm = normalize_relation(&r, &scheme.eigenvalues);
                let (v, value) = eliminate(&norm, &scheme.eigenvalues).ok_or_else(|| GrsError::RelationRequired(norm.to_string()))?;
                let m = HashMap::from([(v, value.clone())]);
                current.specs = current.specs.iter().map(|s| s.subst(&m)).collect();
                relation = Some((v, value));
                relation_poly = Some(norm);
            }
            Err((e, _)) => return Err(e),
        }
    };
    let mut full = cs.presolved.clone();
    let solved = sol.as_map();
    for v in full.values_mut() {
        *v = v.subst(&solved);
    }
    full.extend(solved);
    let vf = family.vf.subst(&full);
    let free: Vec<Var> = sol.free.clone();
    if free.len() > 1 || free.iter().any(|&v| !is_overall_scale(&vf, v)) {
        return Err(GrsError::Underdetermined(free.iter().map(|v| v.to_string()).collect()));
    }
    let mut trace = cs.presolve_trace;
    trace.extend(sol.trace);
    let rec = RecoveredSystem { vf, free, solution: full.into_iter().collect(), trace, relation, relation_poly };
    verify_recovered(&rec, &current)?;
    Ok(rec)
}

/// The eigenvalue of highest index occurring linearly, solved from `r = 0`.
fn eliminate(r: &MPoly, eigen: &[Var]) -> Option<(Var, MRat)> {
    let mut cands: Vec<Var> = eigen.iter().copied().filter(|&v| r.degree_in(v) == 1).collect();
    cands.sort();
    let v = *cands.last()?;
    let value = MRat::new(-r.coeff_in(v, 0), r.coeff_in(v, 1)).ok()?;
    Some((v, value))
}

/// The relation among eigenvalues forced by the scheme.
pub fn eigenvalue_relation(scheme: &GRScheme) -> Result<MPoly> {
    scheme.validate()?;
    let family = generic_family(&scheme.model);
    match solve_scheme(&family, scheme) {
        Ok(_) => Err(GrsError::NoRelation),
        Err((_, Some(r))) => Ok(normalize_relation(&r, &scheme.eigenvalues)),
        Err((e, None)) => Err(e),
    }
}

/// Feed the recovered system back through point detection, resolution and
/// linearization; everything must match the scheme.
pub fn verify_recovered(rec: &RecoveredSystem, scheme: &GRScheme) -> Result<()> {
    let vf = &rec.vf;
    let extra: Vec<MRat> = scheme
        .specs
        .iter()
        .filter_map(|s| match &s.location {
            Location::Finite(c) => Some(c.clone()),
            Location::Infinity => None,
        })
        .collect();
    let pts = accessible_points(vf, &extra).map_err(|e| GrsError::VerificationMismatch(e.to_string()))?;
    let mismatch = |msg: String| GrsError::VerificationMismatch(msg);
    if pts.len() != scheme.specs.len() {
        return Err(mismatch(format!("found {} accessible points, scheme lists {}", pts.len(), scheme.specs.len())));
    }
    for spec in &scheme.specs {
        let want = spec.location.point(spec.multiplicity);
        let p = pts
            .iter()
            .find(|p| p.chart == want.chart && p.point == want.point)
            .ok_or_else(|| mismatch(format!("X={} is not accessible", spec.location.label())))?;
        if p.multiplicity != spec.multiplicity {
            return Err(mismatch(format!(
                "X={} has multiplicity {}, expected {}",
                spec.location.label(),
                p.multiplicity,
                spec.multiplicity
            )));
        }
        let j = if spec.multiplicity == 1 {
            linearization(vf, p)?.matrix
        } else {
            let (trace, li) = resolve_multiplicity(vf, p).map_err(|e| mismatch(e.to_string()))?;
            let want_pt = &spec.resolved.as_ref().expect("validated").point;
            if &trace.point != want_pt {
                return Err(mismatch(format!(
                    "X={} resolves to ({}, {}), expected ({}, {})",
                    spec.location.label(),
                    trace.point[0],
                    trace.point[1],
                    want_pt[0],
                    want_pt[1]
                )));
            }
            li.matrix
        };
        let (eqs, scale) = matrix_equations(&j, &spec.matrix, spec.pole());
        if eqs.iter().any(|e| !e.is_zero()) || scale.as_ref().is_some_and(|s| s.is_zero()) {
            return Err(mismatch(format!("X={}: matrix {j} is not a nonzero multiple of the scheme matrix", spec.location.label())));
        }
    }
    let _ = jacobian_at_origin;
    Ok(())
}

impl fmt::Display for RecoveredSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.vf)?;
        if !self.free.is_empty() {
            write!(f, "\nfree: {}", self.free.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "))?;
        }
        if let Some((v, e)) = &self.relation {
            write!(f, "\nrelation: {v} = {e}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn reduced(e: &catalog::SystemEntry, vf: &PlaneVectorField) -> PlaneVectorField {
        vf.map(|c| e.reduce(c))
    }

    #[test]
    fn recovers_sixth() {
        let rec = recover(&catalog::scheme("pvi").unwrap()).unwrap();
        let want = catalog::system("pvi").unwrap();
        assert_ne!(rec.vf, want.vf);
        assert_eq!(reduced(&want, &rec.vf), reduced(&want, &want.vf));
        let step = |u: &str| rec.trace.iter().find(|s| s.unknown == Var::new(u)).unwrap().value.to_string();
        assert_eq!(step("a7"), "0");
        assert_eq!(step("a5"), "-2*a10");
        assert_eq!(step("a8"), "a10*alpha4");
    }

    #[test]
    fn recovers_generalizations() {
        for (id, rel) in [
            ("gen-pvi", "2*n1*n2*n3*n4 - n1*n2*n3 - n1*n2*n4 - n1*n3*n4 - n2*n3*n4"),
            ("gen-pv", "2*n1*n2*n3 - n1*n3 - n2*n3 - 2*n1 - 2*n2"),
            ("gen-piv", "2*n1*n2 - 3*n1 - n2 - 3"),
            ("gen-piii", "n1*n2 - 4"),
        ] {
            let want = catalog::system(id).unwrap();
            let mut rec = recover(&catalog::scheme(id).unwrap()).unwrap();
            if !rec.free.is_empty() {
                rec = rec.with_scale(&MRat::sym("a"));
            }
            assert_eq!(reduced(&want, &rec.vf), reduced(&want, &want.vf), "{id}");
            assert_eq!(rec.relation_poly.unwrap().to_string(), crate::algebra::parse_poly(rel).unwrap().to_string(), "{id}");
        }
    }

    #[test]
    fn sixth_needs_no_relation() {
        assert_eq!(eigenvalue_relation(&catalog::scheme("pvi").unwrap()), Err(GrsError::NoRelation));
    }
}
