//! Affine parameter correspondences between a specialized system and a
//! reference system, found by coefficient matching.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::algebra::{rational_roots, solve_triangular_with, t_var, MPoly, MRat, SolveFailure, SolveOptions, Var};
use crate::charts::{chart_transform, ChartId, PlaneVectorField, SurfaceModel};
use crate::error::{GrsError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Correspondence {
    /// Each general parameter as an affine expression in the reference ones.
    pub images: BTreeMap<Var, MRat>,
    /// Constant `s` with `general = s · reference`.
    pub scale: MRat,
    /// Coefficients the matching left undetermined (set to zero).
    pub free: Vec<Var>,
}

impl fmt::Display for Correspondence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.images {
            writeln!(f, "{k} = {v}")?;
        }
        write!(f, "scale = {}", self.scale)
    }
}

fn coefficient(i: Var, j: usize) -> Var {
    Var::new(&format!("c_{}_{j}", i.name()))
}

fn tagged(v: Var) -> Var {
    Var::new(&format!("ref_{}", v.name()))
}

/// Find `α_i = c_i0 + Σ_j c_ij κ_j` and a constant `s` with
/// `general = s · reference` identically, after rewriting `general` in the
/// reference's chart.
pub fn match_specialization(
    general: &PlaneVectorField,
    general_params: &[Var],
    reference: &PlaneVectorField,
    reference_params: &[Var],
) -> Result<Correspondence> {
    let rename: HashMap<Var, Var> = reference_params.iter().map(|v| (*v, tagged(*v))).collect();
    let kappa: Vec<Var> = reference_params.iter().map(|v| tagged(*v)).collect();
    let reference = reference.map(|c| c.rename(&rename));
    let general = if general.chart == reference.chart { general.clone() } else { chart_transform(general, reference.chart) };
    let general = general.rename_coords(reference.chart, reference.coords);

    let mut unknowns = Vec::new();
    let mut images: HashMap<Var, MRat> = HashMap::new();
    for &p in general_params {
        let c0 = coefficient(p, 0);
        unknowns.push(c0);
        let mut e = MRat::var(c0);
        for (j, k) in kappa.iter().enumerate() {
            let c = coefficient(p, j + 1);
            unknowns.push(c);
            e = &e + &(&MRat::var(c) * &MRat::var(*k));
        }
        images.insert(p, e);
    }
    let s = Var::new("s");
    let g = general.subst(&images);

    let mut over: Vec<Var> = vec![reference.coords[0], reference.coords[1], t_var()];
    over.extend(&kappa);
    let mut eqs: Vec<MPoly> = Vec::new();
    for (gc, rc) in g.components().into_iter().zip(reference.components()) {
        let lhs = gc.num() * rc.den();
        let rhs = &(gc.den() * rc.num()) * &MPoly::var(s);
        for e in (&lhs - &rhs).coefficients_over(&over).into_values() {
            // s ≠ 0
            let m = e.monomial_content();
            let sm = crate::algebra::Monomial::power(s, m.exp(s));
            eqs.push(e.div_monomial(&sm).expect("monomial content divides"));
        }
    }
    let sol = solve_scaled(&eqs, &unknowns, s)?;
    let mut sub = sol.as_map();
    let zeros: HashMap<Var, MRat> = sol.free.iter().map(|v| (*v, MRat::zero())).collect();
    for v in sub.values_mut() {
        *v = v.subst(&zeros);
    }
    sub.extend(zeros);
    let back: HashMap<Var, Var> = rename.iter().map(|(a, b)| (*b, *a)).collect();
    let images: BTreeMap<Var, MRat> = images.into_iter().map(|(k, v)| (k, v.subst(&sub).rename(&back))).collect();
    let scale = sub.remove(&s).unwrap_or_else(MRat::one);

    let check = general.subst(&images.iter().map(|(k, v)| (*k, v.rename(&rename))).collect());
    for (gc, rc) in check.components().into_iter().zip(reference.components()) {
        let r = gc - &(rc * &scale);
        if !r.is_zero() {
            return Err(GrsError::NoCorrespondence(format!("residual {}", r.rename(&back))));
        }
    }
    Ok(Correspondence { images, scale, free: sol.free })
}

fn no_match(f: SolveFailure) -> GrsError {
    match f {
        SolveFailure::Stuck(rest) => GrsError::NoCorrespondence(format!(
            "matching equations not triangular: {}",
            rest.iter().map(|e| format!("{e} = 0")).collect::<Vec<_>>().join("; ")
        )),
        SolveFailure::Inconsistent(e) | SolveFailure::Relation(e) => {
            GrsError::NoCorrespondence(format!("coefficient matching forces {e} = 0"))
        }
    }
}

/// Solve with the scale `s` as a parameter. When elimination stops at an
/// equation in a single symbol (a condition on `s`, or a nonlinear equation
/// in one coefficient), branch over its rational roots (nonzero for `s`).
/// The returned values include `s`, set to 1 if it stays free.
fn solve_scaled(eqs: &[MPoly], unknowns: &[Var], s: Var) -> Result<crate::algebra::Solution> {
    solve_branching(eqs, unknowns, s, &mut Vec::new(), 0).map_err(no_match)
}

fn solve_branching(
    eqs: &[MPoly],
    unknowns: &[Var],
    s: Var,
    fixed: &mut Vec<(Var, MRat)>,
    depth: usize,
) -> std::result::Result<crate::algebra::Solution, SolveFailure> {
    let sub: HashMap<Var, MRat> = fixed.iter().cloned().collect();
    let current: Vec<MPoly> = eqs.iter().map(|e| MRat::from_poly(e.clone()).subst(&sub).num().clone()).collect();
    let open: Vec<Var> = unknowns.iter().copied().filter(|u| !sub.contains_key(u)).collect();
    let failure = match solve_triangular_with(&current, &open, &SolveOptions::default()) {
        Ok(mut sol) => {
            let scale = sub.get(&s).cloned().unwrap_or_else(MRat::one);
            for v in sol.values.values_mut() {
                *v = v.subst1(s, &scale);
            }
            sol.values.extend(fixed.iter().cloned());
            sol.values.insert(s, scale);
            return Ok(sol);
        }
        Err(f) => f,
    };
    if depth >= 12 {
        return Err(failure);
    }
    let univariate = |e: &MPoly| {
        let vs = e.vars();
        (vs.len() == 1).then(|| *vs.iter().next().expect("one variable"))
    };
    let candidates: Vec<MPoly> = match &failure {
        SolveFailure::Relation(r) => vec![r.clone()],
        SolveFailure::Stuck(rest) => rest.clone(),
        SolveFailure::Inconsistent(_) => vec![],
    };
    let Some((v, e)) = candidates.iter().find_map(|e| univariate(e).map(|v| (v, e))) else {
        return Err(failure);
    };
    let roots = rational_roots(e, v).unwrap_or_default();
    let mut last = failure;
    for root in roots {
        if v == s && num_traits::Zero::is_zero(&root) {
            continue;
        }
        fixed.push((v, MRat::constant(root)));
        match solve_branching(eqs, unknowns, s, fixed, depth + 1) {
            Ok(sol) => return Ok(sol),
            Err(f) => last = f,
        }
        fixed.pop();
    }
    Err(last)
}

/// `dq/dt = ∂H/∂p`, `dp/dt = −∂H/∂q` with `(q, p)` the coordinates of `chart`.
pub fn hamiltonian_field(model: SurfaceModel, chart: ChartId, h: &MRat) -> PlaneVectorField {
    let [q, p] = chart.coords();
    PlaneVectorField::new(model, chart, h.derivative(p), -h.derivative(q))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reference {
    pub id: &'static str,
    pub vf: PlaneVectorField,
    pub params: Vec<Var>,
}

pub const REFERENCE_IDS: [&str; 4] = ["pvi", "piv", "pv", "piii"];

/// Hamiltonian field of `h(q, p)` after the canonical change `q = q(x, y)`,
/// `p = p(x, y)` on `chart`, the Hamiltonian rescaled by the (constant)
/// Jacobian of the change.
fn changed_hamiltonian(model: SurfaceModel, chart: ChartId, h: &str, q: &str, p: &str) -> Result<PlaneVectorField> {
    let [xv, yv] = chart.coords();
    let rename = |e: &str| e.replace('x', xv.name()).replace('y', yv.name());
    let (qr, pr) = (crate::algebra::parse_rat(&rename(q))?, crate::algebra::parse_rat(&rename(p))?);
    let jac = &(&qr.derivative(xv) * &pr.derivative(yv)) - &(&qr.derivative(yv) * &pr.derivative(xv));
    let h = crate::algebra::parse_rat(h)?.subst(&HashMap::from([(Var::new("q"), qr), (Var::new("p"), pr)]));
    Ok(hamiltonian_field(model, chart, &h.checked_div(&jac)?))
}

/// Standard Hamiltonian forms of the fourth, fifth and third systems and the
/// normalized sixth system, placed on the model surface.
pub fn reference(id: &str) -> Result<Reference> {
    let model = SurfaceModel::painleve();
    let vars = |ns: &[&str]| ns.iter().map(|n| Var::new(n)).collect::<Vec<_>>();
    Ok(match id {
        "pvi" => {
            let e = crate::catalog::system("pvi")?;
            Reference { id: "pvi", vf: e.vf.map(|c| e.reduce(c)), params: vars(&["alpha1", "alpha2", "alpha3", "alpha4"]) }
        }
        "piv" => Reference {
            id: "piv",
            vf: changed_hamiltonian(model, ChartId::U1, "2*q*p^2 - (q^2 + 2*t*q + 2*k0)*p + ki*q", "x", "y")?,
            params: vars(&["k0", "ki"]),
        },
        "pv" => Reference {
            id: "pv",
            vf: changed_hamiltonian(
                model,
                ChartId::U0,
                "(q*(q - 1)^2*p^2 - (k0*(q - 1)^2 + th*q*(q - 1) - t*q)*p + ((k0 + th)^2 - ki^2)/4*(q - 1))/t",
                "1 - x",
                "y",
            )?,
            params: vars(&["k0", "th", "ki"]),
        },
        "piii" => Reference {
            id: "piii",
            vf: changed_hamiltonian(model, ChartId::U0, "(q^2*p^2 - (q^2 + th*q - t)*p + ka*q)/t", "x", "y")?,
            params: vars(&["th", "ka"]),
        },
        other => return Err(GrsError::Invalid(format!("unknown reference `{other}`; known: {}", REFERENCE_IDS.join(", ")))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_rat;
    use crate::catalog;

    fn specialize(id: &str, values: &[(&str, &str)]) -> (PlaneVectorField, Vec<Var>) {
        let m: HashMap<Var, MRat> = values.iter().map(|(k, v)| (Var::new(k), parse_rat(v).unwrap())).collect();
        let e = catalog::system(id).unwrap().specialize(&m).unwrap();
        (e.vf, e.params)
    }

    #[test]
    fn fourth_is_piv() {
        let (g, ps) = specialize("gen-piv", &[("n1", "2"), ("a", "4")]);
        let r = reference("piv").unwrap();
        let c = match_specialization(&g, &ps, &r.vf, &r.params).unwrap();
        assert_eq!(c.images[&Var::new("alpha1")], parse_rat("-k0").unwrap());
        assert_eq!(c.images[&Var::new("alpha2")], parse_rat("-ki").unwrap());
        assert_eq!(c.scale, MRat::one());
    }

    #[test]
    fn self_match_is_identity() {
        let (g, ps) = specialize("gen-piii", &[("n1", "2")]);
        let c = match_specialization(&g, &ps, &g, &ps).unwrap();
        for p in &ps {
            assert_eq!(c.images[p], MRat::var(*p));
        }
        assert_eq!(c.scale, MRat::one());
    }

    fn check(id: &str, vals: &[(&str, &str)], rid: &str, want: &[(&str, &str)]) {
        let (g, ps) = specialize(id, vals);
        let r = reference(rid).unwrap();
        let c = match_specialization(&g, &ps, &r.vf, &r.params).unwrap();
        for (k, v) in want {
            assert_eq!(c.images[&Var::new(k)], parse_rat(v).unwrap(), "{id} {k}");
        }
        assert_eq!(c.scale, MRat::one());
    }

    #[test]
    fn sixth_with_sign_flips() {
        check(
            "gen-pvi",
            &[("n1", "2"), ("n2", "2"), ("n3", "2")],
            "pvi",
            &[
                ("alpha0", "alpha1 + 2*alpha2 + alpha3 + alpha4 - 1"),
                ("alpha1", "-alpha1"),
                ("alpha2", "alpha2"),
                ("alpha3", "-alpha3"),
                ("alpha4", "-alpha4"),
            ],
        );
    }

    #[test]
    fn fifth_and_third() {
        check(
            "gen-pv",
            &[("n1", "2"), ("n2", "2")],
            "pv",
            &[("alpha0", "k0"), ("alpha1", "-ki"), ("alpha2", "(th + k0 - ki)/2"), ("alpha3", "(th + 1)/2")],
        );
        check("gen-piii", &[("n1", "2")], "piii", &[("alpha0", "-(th + 1)/2"), ("alpha1", "th/2 - ka"), ("alpha2", "-ka")]);
    }

    #[test]
    fn no_correspondence_elsewhere() {
        let (g, ps) = specialize("gen-piii", &[("n1", "4")]);
        let r = reference("pv").unwrap();
        assert!(matches!(match_specialization(&g, &ps, &r.vf, &r.params), Err(GrsError::NoCorrespondence(_))));
    }
}
