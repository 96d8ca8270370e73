//! Built-in systems, schemes and their parameter relations.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{parse_rat, MRat, Var};
use crate::charts::{PlaneVectorField, SurfaceModel};
use crate::error::{GrsError, Result};
use crate::scheme::{GRScheme, Location, SingularSpec};
use crate::symmetry::BirationalMap;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemEntry {
    pub id: String,
    pub description: String,
    pub vf: PlaneVectorField,
    pub params: Vec<Var>,
    pub eigenvalues: Vec<Var>,
    /// A parameter fixed by the others: a forced eigenvalue relation or a
    /// normalization.
    pub relation: Option<(Var, MRat)>,
}

impl SystemEntry {
    /// Substitute the dependent parameter.
    pub fn reduce(&self, e: &MRat) -> MRat {
        match &self.relation {
            Some((v, value)) => e.subst1(*v, value),
            None => e.clone(),
        }
    }

    /// The field with the dependent parameter substituted.
    pub fn reduced_vf(&self) -> PlaneVectorField {
        self.vf.map(|c| self.reduce(c))
    }

    /// Fix some parameters or eigenvalues. A dependent eigenvalue follows from
    /// the relation; if it is given too, the relation must hold.
    pub fn specialize(&self, values: &HashMap<Var, MRat>) -> Result<SystemEntry> {
        let mut m = values.clone();
        let mut relation = self.relation.clone();
        if let Some((v, val)) = &self.relation {
            let implied = val.subst(&m);
            match m.get(v) {
                Some(given) => {
                    let determined = implied.vars().iter().all(|u| !self.eigenvalues.contains(u));
                    if self.eigenvalues.contains(v) && determined && *given != implied {
                        return Err(GrsError::RelationViolated(format!("{v} = {given}, the relation gives {implied}")));
                    }
                    relation = None;
                }
                None if self.eigenvalues.contains(v) => {
                    m.insert(*v, implied);
                    relation = None;
                }
                None => relation = Some((*v, implied)),
            }
        }
        Ok(SystemEntry {
            id: self.id.clone(),
            description: self.description.clone(),
            vf: self.vf.subst(&m),
            params: self.params.iter().copied().filter(|p| !m.contains_key(p)).collect(),
            eigenvalues: self.eigenvalues.iter().copied().filter(|p| !m.contains_key(p)).collect(),
            relation,
        })
    }
}

pub const SYSTEM_IDS: [&str; 6] = ["pvi", "hvi", "gen-pvi", "gen-pv", "gen-piv", "gen-piii"];
pub const SCHEME_IDS: [&str; 5] = ["pvi", "gen-pvi", "gen-pv", "gen-piv", "gen-piii"];

fn vars(names: &[&str]) -> Vec<Var> {
    names.iter().map(|n| Var::new(n)).collect()
}

fn r(s: &str) -> MRat {
    parse_rat(s).expect("builtin expression")
}

const GEN_PVI_K: &str = "(2*n1*n2*n3 - n1*n2 - n1*n3 - n2*n3)";

fn expand_k(s: &str) -> String {
    s.replace('K', GEN_PVI_K)
}

pub fn pvi_hamiltonian() -> MRat {
    r("(y^2*(x - t)*(x - 1)*x - ((alpha0 - 1)*(x - 1)*x + alpha3*(x - t)*x + alpha4*(x - t)*(x - 1))*y + alpha2*(alpha1 + alpha2)*x)/(t*(t - 1))")
}

/// `dx/dt = ∂H/∂y`, `dy/dt = −∂H/∂x` on the Painlevé surface.
pub fn hamiltonian_system(h: &MRat) -> PlaneVectorField {
    let [x, y] = crate::charts::ChartId::U0.coords();
    PlaneVectorField::new(SurfaceModel::painleve(), crate::charts::ChartId::U0, h.derivative(y), -h.derivative(x))
}

pub fn system(id: &str) -> Result<SystemEntry> {
    let model = SurfaceModel::painleve();
    let alphas = |k: usize| (0..k).map(|i| Var::new(&format!("alpha{i}"))).collect::<Vec<_>>();
    let entry = match id {
        "pvi" | "hvi" => {
            let vf = if id == "pvi" {
                PlaneVectorField::parse(
                    model,
                    "(2*y*(x - t)*(x - 1)*x - (alpha0 - 1)*(x - 1)*x - alpha3*(x - t)*x - alpha4*(x - t)*(x - 1))/(t*(t - 1))",
                    "(-((x - t)*(x - 1) + (x - t)*x + (x - 1)*x)*y^2 + ((alpha0 - 1)*(2*x - 1) + alpha3*(2*x - t) + alpha4*(2*x - t - 1))*y - alpha2*(alpha1 + alpha2))/(t*(t - 1))",
                )?
            } else {
                hamiltonian_system(&pvi_hamiltonian())
            };
            SystemEntry {
                id: id.to_string(),
                description: "sixth Painlevé system".into(),
                vf,
                params: alphas(5),
                eigenvalues: vec![],
                relation: Some((Var::new("alpha0"), r("1 - alpha1 - 2*alpha2 - alpha3 - alpha4"))),
            }
        }
        "gen-pvi" => {
            let d = expand_k("(n1*n2*alpha0 + K*alpha1 - n1*n2*n3*alpha2 + n1*n3*alpha3 + n2*n3*alpha4)*t*(t - 1)");
            let dx = expand_k(&format!(
                "(n1*n2*n3*x*(x - 1)*(t - x)*y + (K*alpha1 - n1*n2*n3*alpha2)*x^2 + (-K*alpha1 + n1*n2*n3*alpha2 + n1*n3*alpha3*(t - 1) + n2*n3*alpha4*t)*x - n2*n3*alpha4*t)/({d})"
            ));
            let dy = expand_k(&format!(
                "(((n1*n2 + n2*n3 + n1*n3)*x^2 - (n1*n2 + n2*n3 + (n1 + n2)*n3*t)*x + n2*n3*t)*y^2 + (-(2*K*alpha1 + (-2*n1*n2 - 2*n1*n3 - 2*n2*n3 + n1*n2*n3)*alpha2)*x + K*alpha1 + ((n1*n2 - n1 - n2)*n3*t - n1*n2 - n2*n3)*alpha2 - n1*n3*alpha3*(t - 1) - n2*n3*alpha4*t)*y - alpha2*(K*alpha1 + (-n1*n2 - n1*n3 - n2*n3 + n1*n2*n3)*alpha2))/({d})"
            ));
            SystemEntry {
                id: "gen-pvi".into(),
                description: "four simple accessible points".into(),
                vf: PlaneVectorField::parse(model, &dx, &dy)?,
                params: alphas(5),
                eigenvalues: vars(&["n1", "n2", "n3", "n4"]),
                relation: Some((Var::new("n4"), r(&expand_k("n1*n2*n3/K")))),
            }
        }
        "gen-pv" => {
            let d = "t*(2*n2*alpha0 + 2*n1*alpha1 - 2*(n1 + n2)*alpha2 + 2*(2*n1*n2 - n1 - n2)*alpha3 - (n1 - n2)*t)";
            SystemEntry {
                id: "gen-pv".into(),
                description: "two simple points and one double point".into(),
                vf: PlaneVectorField::parse(
                    model,
                    &format!("(2*n1*n2*x^3*y - 2*n1*n2*x^2*y - 2*n1*(alpha1 - n2*alpha2)*x^2 + (2*n2*alpha0 + 2*n1*alpha1 - 2*n1*n2*alpha2 + (n1 + n2)*t)*x - (n1 + n2)*t)/({d})"),
                    &format!("(-2*n1*(2*n2 - 1)*x^2*y^2 + 2*(2*n1*n2 - n1 - n2)*x*y^2 + 2*n1*(2*alpha1 - (3*n2 - 2)*alpha2)*x*y - (2*n2*alpha0 + 2*n1*alpha1 - 2*(2*n1*n2 - n1 - n2)*alpha2 + (n1 + n2)*t)*y + 2*n1*alpha2*(alpha1 + alpha2 - n2*alpha2))/({d})"),
                )?,
                params: alphas(4),
                eigenvalues: vars(&["n1", "n2", "n3"]),
                relation: Some((Var::new("n3"), r("2*(n1 + n2)/(2*n1*n2 - n1 - n2)"))),
            }
        }
        "gen-piv" => SystemEntry {
            id: "gen-piv".into(),
            description: "one simple point and one triple point".into(),
            vf: PlaneVectorField::parse(
                model,
                "a*(x^3*y + (n1*alpha2 - alpha1)*x^2/n1 + (2*n1 - 1)*t*x/(3*n1) + (n1 + 1)/(6*n1))",
                "a*(-(2*n1 - 1)*x^2*y^2/n1 + (2*alpha1 - (3*n1 - 2)*alpha2)*x*y/n1 - (2*n1 - 1)*t*y/(3*n1) + alpha2*(alpha1 - (n1 - 1)*alpha2)/n1)",
            )?,
            params: vars(&["alpha1", "alpha2", "a"]),
            eigenvalues: vars(&["n1", "n2"]),
            relation: Some((Var::new("n2"), r("(3*n1 + 3)/(2*n1 - 1)"))),
        },
        "gen-piii" => {
            let d = "(4*alpha0 + 2*n1*alpha1 - (n1 + 2)*alpha2)*t";
            SystemEntry {
                id: "gen-piii".into(),
                description: "two double points".into(),
                vf: PlaneVectorField::parse(
                    model,
                    &format!("(-(n1 + 2)*x^2*y + 2*x^2 + 2*(n1*alpha1 - 2*alpha2)*x - n1*t)/({d})"),
                    &format!("(4*x*y^2 - 4*x*y - (2*n1*alpha1 + (n1 - 6)*alpha2)*y - 2*alpha2)/({d})"),
                )?,
                params: alphas(3),
                eigenvalues: vars(&["n1", "n2"]),
                relation: Some((Var::new("n2"), r("4/n1"))),
            }
        }
        other => return Err(GrsError::Invalid(format!("unknown system `{other}`; known: {}", SYSTEM_IDS.join(", ")))),
    };
    Ok(entry)
}

pub fn scheme(id: &str) -> Result<GRScheme> {
    let model = SurfaceModel::painleve();
    let fin = |s: &str| Location::Finite(r(s));
    let (specs, params, eigen) = match id {
        "pvi" => (
            vec![
                SingularSpec::simple(fin("0"), [["2", "-alpha4"], ["0", "1"]]),
                SingularSpec::simple(fin("1"), [["2", "-alpha3"], ["0", "1"]]),
                SingularSpec::simple(fin("t"), [["2", "-alpha0"], ["0", "1"]]),
                SingularSpec::simple(Location::Infinity, [["2", "-alpha1"], ["0", "1"]]),
            ],
            vars(&["alpha0", "alpha1", "alpha2", "alpha3", "alpha4"]),
            vec![],
        ),
        "gen-pvi" => (
            vec![
                SingularSpec::simple(fin("0"), [["n1", "alpha4"], ["0", "1"]]),
                SingularSpec::simple(fin("1"), [["n2", "alpha3"], ["0", "1"]]),
                SingularSpec::simple(fin("t"), [["n3", "alpha0"], ["0", "1"]]),
                SingularSpec::simple(Location::Infinity, [["n4", "alpha1"], ["0", "1"]]),
            ],
            vars(&["alpha0", "alpha1", "alpha2", "alpha3", "alpha4"]),
            vars(&["n1", "n2", "n3", "n4"]),
        ),
        "gen-pv" => (
            vec![
                SingularSpec::multiple(fin("0"), 2, "(x, x^2*y)", ["0", "-t"], [["1", "0"], ["2*alpha3", "n3"]]),
                SingularSpec::simple(fin("1"), [["n1", "alpha0"], ["0", "1"]]),
                SingularSpec::simple(Location::Infinity, [["n2", "alpha1"], ["0", "1"]]),
            ],
            vars(&["alpha0", "alpha1", "alpha2", "alpha3"]),
            vars(&["n1", "n2", "n3"]),
        ),
        "gen-piv" => (
            vec![
                SingularSpec::multiple(fin("0"), 3, "(x, x^3*y)", ["0", "-1/2"], [["1", "0"], ["2*t", "n2"]]),
                SingularSpec::simple(Location::Infinity, [["n1", "alpha1"], ["0", "1"]]),
            ],
            vars(&["alpha1", "alpha2"]),
            vars(&["n1", "n2"]),
        ),
        "gen-piii" => (
            vec![
                SingularSpec::multiple(fin("0"), 2, "(x, x^2*y)", ["0", "-t"], [["1", "0"], ["2*alpha0", "n1"]]),
                SingularSpec::multiple(Location::Infinity, 2, "(1/x, -(x*y + alpha2)/x)", ["0", "-1"], [["1", "0"], ["2*alpha1", "n2"]]),
            ],
            vars(&["alpha0", "alpha1", "alpha2"]),
            vars(&["n1", "n2"]),
        ),
        other => return Err(GrsError::Invalid(format!("unknown scheme `{other}`; known: {}", SCHEME_IDS.join(", ")))),
    };
    Ok(GRScheme { name: id.into(), model, specs, params, eigenvalues: eigen })
}

/// Map ids per system.
pub fn map_ids(system_id: &str) -> Result<Vec<&'static str>> {
    Ok(match system_id {
        "pvi" | "hvi" => vec!["s", "pi1", "pi2", "pi3-swap", "s-specialized"],
        "gen-pvi" => vec!["s", "pi1", "pi2", "pi3", "pi3-swap"],
        "gen-pv" => vec!["s", "pi"],
        "gen-piv" => vec!["s"],
        "gen-piii" => vec!["s", "pi"],
        other => return Err(GrsError::Invalid(format!("unknown system `{other}`"))),
    })
}

pub fn maps(system_id: &str) -> Result<Vec<BirationalMap>> {
    map_ids(system_id)?.into_iter().map(|m| map(system_id, m)).collect()
}

/// A built-in transformation of a built-in system.
pub fn map(system_id: &str, name: &str) -> Result<BirationalMap> {
    const S: [&str; 3] = ["x + alpha2/y", "y", "t"];
    const PI1: [&str; 3] = ["1 - x", "-y", "1 - t"];
    const PI2: [&str; 3] = ["(t - x)/(t - 1)", "-(t - 1)*y", "t/(t - 1)"];
    const PI3: [&str; 3] = ["1/x", "-(y*x + alpha2)*x", "1/t"];
    let build = |xyt: [&str; 3], params: &[(&str, &str)]| BirationalMap::parse(name, xyt[0], xyt[1], xyt[2], params);
    let k = GEN_PVI_K;
    let sys = if system_id == "hvi" { "pvi" } else { system_id };
    match (sys, name) {
        ("pvi", "s") => build(
            S,
            &[
                ("alpha0", "alpha0 + alpha2"),
                ("alpha1", "alpha1 + alpha2"),
                ("alpha2", "-alpha2"),
                ("alpha3", "alpha3 + alpha2"),
                ("alpha4", "alpha4 + alpha2"),
            ],
        ),
        ("pvi", "s-specialized") => build(
            S,
            &[
                ("alpha0", "alpha0 - alpha2"),
                ("alpha1", "alpha1 - alpha2"),
                ("alpha2", "-alpha2"),
                ("alpha3", "alpha3 - alpha2"),
                ("alpha4", "alpha4 - alpha2"),
            ],
        ),
        ("pvi", "pi1") => build(PI1, &[("alpha3", "alpha4"), ("alpha4", "alpha3")]),
        ("pvi", "pi2") => build(PI2, &[("alpha0", "alpha4"), ("alpha4", "alpha0")]),
        ("pvi", "pi3-swap") => build(PI3, &[("alpha1", "alpha4"), ("alpha4", "alpha1")]),
        ("gen-pvi", "s") => build(
            S,
            &[
                ("alpha0", "alpha0 + alpha2 - n3*alpha2"),
                ("alpha1", &format!("({k}*alpha1 + (n1*n2*n3 - n1*n2 - n1*n3 - n2*n3)*alpha2)/{k}")),
                ("alpha2", "-alpha2"),
                ("alpha3", "alpha3 + alpha2 - n2*alpha2"),
                ("alpha4", "alpha4 + alpha2 - n1*alpha2"),
            ],
        ),
        ("gen-pvi", "pi1") => build(PI1, &[("n1", "n2"), ("n2", "n1"), ("alpha3", "alpha4"), ("alpha4", "alpha3")]),
        ("gen-pvi", "pi2") => build(PI2, &[("n1", "n3"), ("n3", "n1"), ("alpha0", "alpha4"), ("alpha4", "alpha0")]),
        ("gen-pvi", "pi3") => build(
            PI3,
            &[("n1", "n4"), ("n4", "n1"), ("alpha1", &format!("alpha4*n2*n3*n4/(n1*{k})")), ("alpha4", &format!("alpha1*{k}/(n1*n2*n3)"))],
        ),
        ("gen-pvi", "pi3-swap") => build(PI3, &[("n1", "n4"), ("n4", "n1"), ("alpha1", "alpha4"), ("alpha4", "alpha1")]),
        ("gen-pv", "s") => build(
            S,
            &[
                ("alpha0", "alpha0 + alpha2 - n1*alpha2"),
                ("alpha1", "alpha1 + alpha2 - n2*alpha2"),
                ("alpha2", "-alpha2"),
                ("alpha3", "(2*(alpha2 + alpha3)*n1*n2 - (3*alpha2 + alpha3)*n1 - (3*alpha2 + alpha3)*n2)/(2*n1*n2 - n1 - n2)"),
            ],
        ),
        ("gen-pv", "pi") => build(
            ["x/(x - 1)", "-(x - 1)*((x - 1)*y + alpha2)", "-t"],
            &[("n1", "n2"), ("n2", "n1"), ("alpha0", "alpha1"), ("alpha1", "alpha0")],
        ),
        ("gen-piv", "s") => build(S, &[("alpha0", "alpha0"), ("alpha1", "alpha1 + alpha2 - n1*alpha2"), ("alpha2", "-alpha2")]),
        ("gen-piii", "s") => {
            build(S, &[("alpha0", "alpha0 + alpha2 - n1*alpha2"), ("alpha1", "alpha1 + alpha2 - n2*alpha2"), ("alpha2", "-alpha2")])
        }
        ("gen-piii", "pi") => {
            build(["t/x", "-x*(x*y + alpha2)/t", "t"], &[("n1", "n2"), ("n2", "n1"), ("alpha0", "alpha1"), ("alpha1", "alpha0")])
        }
        _ => Err(GrsError::Invalid(format!("unknown map `{name}` for system `{system_id}`"))),
    }
}

/// Exact parameter values for probes.
pub type Assignment = HashMap<Var, MRat>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pvi_is_hamiltonian() {
        assert_eq!(system("pvi").unwrap().vf, system("hvi").unwrap().vf);
    }

    #[test]
    fn all_parse() {
        for id in SYSTEM_IDS {
            system(id).unwrap();
        }
        for id in SCHEME_IDS {
            scheme(id).unwrap().validate().unwrap();
        }
    }
}
