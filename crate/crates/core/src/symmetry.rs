//! Birational transformations of (x, y, t) with parameter images: push-forward
//! of systems, invariance checks (exact symbolic or at exact random probes)
//! and involution checks.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{parse_rat, t_var, MRat, Var};
use crate::catalog::SystemEntry;
use crate::charts::{ChartId, PlaneVectorField};
use crate::error::{GrsError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BirationalMap {
    pub name: String,
    pub x: MRat,
    pub y: MRat,
    pub t: MRat,
    /// Images of parameters and eigenvalues; unlisted ones are fixed.
    pub params: BTreeMap<Var, MRat>,
}

impl BirationalMap {
    pub fn parse(name: &str, x: &str, y: &str, t: &str, params: &[(&str, &str)]) -> Result<BirationalMap> {
        Ok(BirationalMap {
            name: name.into(),
            x: parse_rat(x)?,
            y: parse_rat(y)?,
            t: parse_rat(t)?,
            params: params.iter().map(|(k, v)| Ok((Var::new(k), parse_rat(v)?))).collect::<Result<_>>()?,
        })
    }

    /// Simultaneous substitution realizing the map.
    pub fn substitution(&self) -> HashMap<Var, MRat> {
        let [x, y] = ChartId::U0.coords();
        let mut m: HashMap<Var, MRat> = self.params.iter().map(|(k, v)| (*k, v.clone())).collect();
        m.insert(x, self.x.clone());
        m.insert(y, self.y.clone());
        m.insert(t_var(), self.t.clone());
        m
    }

    /// The same map with parameters evaluated at `values`.
    fn at(&self, values: &HashMap<Var, MRat>) -> Result<BirationalMap> {
        Ok(BirationalMap {
            name: self.name.clone(),
            x: self.x.try_subst(values)?,
            y: self.y.try_subst(values)?,
            t: self.t.try_subst(values)?,
            params: self.params.iter().map(|(k, v)| Ok((*k, v.try_subst(values)?))).collect::<Result<_>>()?,
        })
    }
}

impl fmt::Display for BirationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: (x, y, t) -> ({}, {}, {})", self.name, self.x, self.y, self.t)?;
        for (k, v) in &self.params {
            write!(f, "\n  {k} -> {v}")?;
        }
        Ok(())
    }
}

/// `(φ_x f + φ_y g + φ_t)/τ'` for each image coordinate, in the old variables.
fn transported(vf: &PlaneVectorField, map: &BirationalMap) -> Result<[MRat; 2]> {
    let [x, y] = vf.coords;
    let t = t_var();
    let tau = map.t.derivative(t);
    if tau.is_zero() {
        return Err(GrsError::SingularJacobian);
    }
    let jac = &(&map.x.derivative(x) * &map.y.derivative(y)) - &(&map.x.derivative(y) * &map.y.derivative(x));
    if jac.is_zero() {
        return Err(GrsError::SingularJacobian);
    }
    let [f, g] = vf.components();
    let push = |phi: &MRat| -> Result<MRat> {
        let d = &(&(&phi.derivative(x) * f) + &(&phi.derivative(y) * g)) + &phi.derivative(t);
        d.checked_div(&tau)
    };
    Ok([push(&map.x)?, push(&map.y)?])
}

/// `dx/dt = f(x,y,t;p)` minus the transported field, both at the image point.
pub fn residual(vf: &PlaneVectorField, map: &BirationalMap) -> Result<[MRat; 2]> {
    let [gx, gy] = transported(vf, map)?;
    let sub = map.substitution();
    let [f, g] = vf.components();
    Ok([&gx - &f.try_subst(&sub)?, &gy - &g.try_subst(&sub)?])
}

/// The system in the new variables, for an involutive map (which is then its
/// own inverse).
pub fn push_forward(vf: &PlaneVectorField, map: &BirationalMap, relation: Option<&(Var, MRat)>) -> Result<PlaneVectorField> {
    if !verify_involution(map, relation)?.involutive {
        return Err(GrsError::Invalid(format!("{} is not an involution; its inverse is needed", map.name)));
    }
    let [gx, gy] = transported(vf, map)?;
    let sub = map.substitution();
    Ok(PlaneVectorField::new(vf.model.clone(), vf.chart, gx.try_subst(&sub)?, gy.try_subst(&sub)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvolutionReport {
    pub involutive: bool,
    /// Images of `x, y, t` and each parameter under the map applied twice.
    pub square: BTreeMap<Var, MRat>,
}

pub fn verify_involution(map: &BirationalMap, relation: Option<&(Var, MRat)>) -> Result<InvolutionReport> {
    let sub = map.substitution();
    let reduce = |e: MRat| match relation {
        Some((v, val)) => e.subst1(*v, val),
        None => e,
    };
    let mut square = BTreeMap::new();
    let mut involutive = true;
    for (v, img) in &sub {
        let twice = reduce(img.try_subst(&sub)?);
        if twice != reduce(MRat::var(*v)) {
            involutive = false;
        }
        square.insert(*v, twice);
    }
    Ok(InvolutionReport { involutive, square })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CheckMode {
    /// Exact rational-function identity in all symbols.
    Symbolic,
    /// Exact identity in (x, y, t) at seeded random rational parameters.
    Probes { count: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeFailure {
    pub assignment: BTreeMap<Var, MRat>,
    pub residual: [MRat; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymmetryReport {
    pub system: String,
    pub map: String,
    pub invariant: bool,
    /// Invariance holds only once the parameter relation is imposed.
    pub relation_used: bool,
    /// Parameters with an image that do not occur in the system.
    pub absent: Vec<Var>,
    pub probes: usize,
    pub failures: Vec<ProbeFailure>,
    /// Symbolic residual when not invariant.
    pub residual: Option<[MRat; 2]>,
}

impl fmt::Display for SymmetryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.invariant { "invariant" } else { "NOT invariant" };
        write!(f, "{} under {}: {verdict}", self.system, self.map)?;
        if self.relation_used {
            write!(f, " (using the parameter relation)")?;
        }
        if self.probes > 0 {
            write!(f, ", {} probes, {} failing", self.probes, self.failures.len())?;
        }
        for v in &self.absent {
            write!(f, "\n{v} does not occur in the system; its image is irrelevant")?;
        }
        if let Some([rx, ry]) = &self.residual {
            write!(f, "\nresidual dx: {rx}\nresidual dy: {ry}")?;
        }
        if let Some(p) = self.failures.first() {
            let a: Vec<String> = p.assignment.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, "\nfirst failing probe: {}\nresidual dx: {}\nresidual dy: {}", a.join(", "), p.residual[0], p.residual[1])?;
        }
        Ok(())
    }
}

fn draw(rng: &mut ChaCha8Rng) -> MRat {
    MRat::frac(rng.gen_range(-30..=30), rng.gen_range(1..=9))
}

/// Independent parameters of a system: all parameters and eigenvalues except
/// the one fixed by the relation.
pub fn independent_params(entry: &SystemEntry) -> Vec<Var> {
    let dep = entry.relation.as_ref().map(|(v, _)| *v);
    entry.params.iter().chain(&entry.eigenvalues).copied().filter(|v| Some(*v) != dep).collect()
}

/// A seeded random assignment of all parameters satisfying the relation and
/// keeping the system's denominators nonzero.
pub fn draw_assignment(entry: &SystemEntry, rng: &mut ChaCha8Rng) -> Result<HashMap<Var, MRat>> {
    for _ in 0..1000 {
        let mut a: HashMap<Var, MRat> = independent_params(entry).into_iter().map(|v| (v, draw(rng))).collect();
        if let Some((v, val)) = &entry.relation {
            match val.try_subst(&a) {
                Ok(x) => a.insert(*v, x),
                Err(_) => continue,
            };
        }
        if entry.vf.components().iter().all(|c| c.try_subst(&a).is_ok()) {
            return Ok(a);
        }
    }
    Err(GrsError::DegenerateDenominator(format!("no admissible probe for {}", entry.id)))
}

pub fn verify_symmetry(entry: &SystemEntry, map: &BirationalMap, mode: CheckMode) -> Result<SymmetryReport> {
    let absent: Vec<Var> = map
        .params
        .keys()
        .copied()
        .filter(|v| entry.relation.as_ref().map(|(d, _)| d) != Some(v))
        .filter(|v| !entry.vf.components().iter().any(|c| c.contains_var(*v)))
        .collect();
    let mut report = SymmetryReport {
        system: entry.id.clone(),
        map: map.name.clone(),
        invariant: true,
        relation_used: false,
        absent,
        probes: 0,
        failures: vec![],
        residual: None,
    };
    match mode {
        CheckMode::Symbolic => {
            let r = residual(&entry.vf, map)?;
            if r.iter().all(|e| e.is_zero()) {
                return Ok(report);
            }
            let reduced = r.map(|e| entry.reduce(&e));
            if entry.relation.is_some() && reduced.iter().all(|e| e.is_zero()) {
                report.relation_used = true;
                return Ok(report);
            }
            report.invariant = false;
            report.residual = Some(reduced);
        }
        CheckMode::Probes { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            report.relation_used = entry.relation.is_some();
            while report.probes < count {
                let a = draw_assignment(entry, &mut rng)?;
                let Ok(m) = map.at(&a) else { continue };
                let vf = entry.vf.subst(&a);
                let r = match residual_against(&vf, &entry.vf, &m, &a) {
                    Ok(r) => r,
                    Err(GrsError::DivisionByZero) => continue,
                    Err(e) => return Err(e),
                };
                report.probes += 1;
                if r.iter().any(|e| !e.is_zero()) {
                    report.invariant = false;
                    report.failures.push(ProbeFailure { assignment: a.into_iter().collect(), residual: r });
                }
            }
        }
    }
    Ok(report)
}

/// Residual with the source field already evaluated and the target field
/// still symbolic in the parameters.
fn residual_against(
    source: &PlaneVectorField,
    target: &PlaneVectorField,
    map: &BirationalMap,
    probe: &HashMap<Var, MRat>,
) -> Result<[MRat; 2]> {
    let [gx, gy] = transported(source, map)?;
    let mut sub = probe.clone();
    sub.extend(map.substitution());
    let [f, g] = target.components();
    Ok([&gx - &f.try_subst(&sub)?, &gy - &g.try_subst(&sub)?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn sixth_symmetries() {
        let e = catalog::system("pvi").unwrap();
        for m in catalog::maps("pvi").unwrap() {
            let r = verify_symmetry(&e, &m, CheckMode::Symbolic).unwrap();
            let expect = m.name != "s-specialized";
            assert_eq!(r.invariant, expect, "{r}");
        }
    }

    #[test]
    fn identity_is_trivial() {
        let e = catalog::system("gen-piii").unwrap();
        let id = BirationalMap::parse("id", "x", "y", "t", &[]).unwrap();
        assert!(verify_symmetry(&e, &id, CheckMode::Symbolic).unwrap().invariant);
        assert_eq!(push_forward(&e.vf, &id, None).unwrap(), e.vf);
    }

    #[test]
    fn singular_map_rejected() {
        let e = catalog::system("gen-piii").unwrap();
        let m = BirationalMap::parse("flat", "x + y", "2*x + 2*y", "t", &[]).unwrap();
        assert_eq!(residual(&e.vf, &m), Err(GrsError::SingularJacobian));
    }

    #[test]
    fn generalized_symmetries() {
        for sys in ["gen-pvi", "gen-pv", "gen-piv", "gen-piii"] {
            let e = catalog::system(sys).unwrap();
            for m in catalog::maps(sys).unwrap() {
                let expect = m.name != "pi3";
                let p = verify_symmetry(&e, &m, CheckMode::Probes { count: 20, seed: 7 }).unwrap();
                assert_eq!(p.probes, 20);
                assert_eq!(p.invariant, expect, "{sys} {}", m.name);
                assert_eq!(verify_symmetry(&e, &m, CheckMode::Symbolic).unwrap().invariant, expect, "{sys} {}", m.name);
                assert_eq!(verify_involution(&m, e.relation.as_ref()).unwrap().involutive, expect, "{sys} {}", m.name);
            }
        }
        let e = catalog::system("gen-piv").unwrap();
        let r = verify_symmetry(&e, &catalog::map("gen-piv", "s").unwrap(), CheckMode::Symbolic).unwrap();
        assert_eq!(r.absent, vec![Var::new("alpha0")]);
    }

    #[test]
    fn push_forward_of_invariant_system_is_itself() {
        let e = catalog::system("gen-piii").unwrap();
        let m = catalog::map("gen-piii", "s").unwrap();
        let pushed = push_forward(&e.vf, &m, e.relation.as_ref()).unwrap();
        assert_eq!(pushed.map(|c| e.reduce(c)), e.vf.map(|c| e.reduce(c)));
    }
}
