//! The Hirzebruch surface Σn as four affine charts, push-forward of vector
//! fields between them, the logarithmic pole condition and the generic
//! coefficient family.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{parse_rat, solve_triangular_with, t_var, MPoly, MRat, SolveOptions, Var};
use crate::error::{GrsError, Result};

/// Σn with gluing `w1 = −(xⁿy + g_{n−1}x^{n−1} + ⋯ + g_1x)`; `twist = [g_1, …, g_{n−1}]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceModel {
    pub n: u32,
    pub twist: Vec<MRat>,
}

impl SurfaceModel {
    pub fn new(n: u32, twist: Vec<MRat>) -> Result<SurfaceModel> {
        if n < 1 {
            return Err(GrsError::InvalidN(n as i64));
        }
        if twist.len() != (n - 1) as usize {
            return Err(GrsError::Invalid(format!("Σ{n} needs {} twist coefficients, got {}", n - 1, twist.len())));
        }
        Ok(SurfaceModel { n, twist })
    }

    /// Σn with twist `(α, 0, …, 0)`.
    pub fn with_alpha(n: u32, alpha: MRat) -> Result<SurfaceModel> {
        if n < 1 {
            return Err(GrsError::InvalidN(n as i64));
        }
        let mut twist = vec![MRat::zero(); (n - 1) as usize];
        if let Some(first) = twist.first_mut() {
            *first = alpha;
        }
        SurfaceModel::new(n, twist)
    }

    /// The Σ2 model of the Painlevé systems, twisted by `alpha2`.
    pub fn painleve() -> SurfaceModel {
        SurfaceModel { n: 2, twist: vec![MRat::sym("alpha2")] }
    }

    /// Self-intersection of the section at `y = ∞`.
    pub fn self_intersection(&self) -> i64 {
        self.n as i64
    }

    /// `w1` as a function of `(x, y)`.
    pub fn w1(&self, x: &MRat, y: &MRat) -> MRat {
        let mut acc = &x.pow(self.n as i32).expect("positive power") * y;
        for (k, g) in self.twist.iter().enumerate() {
            acc = &acc + &(g * &x.pow(k as i32 + 1).expect("positive power"));
        }
        -acc
    }

    /// `y` recovered from `z1 = 1/x` and `w1`.
    pub fn y_from(&self, z: &MRat, w: &MRat) -> MRat {
        let n = self.n as i32;
        let mut acc = w * &z.pow(n).expect("positive power");
        for (k, g) in self.twist.iter().enumerate() {
            acc = &acc + &(g * &z.pow(n - 1 - k as i32).expect("nonnegative power"));
        }
        -acc
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChartId {
    U0,
    U1,
    U2,
    U3,
    /// Coordinates produced by blow-ups, inversions and translations.
    Local,
}

impl ChartId {
    pub fn coords(self) -> [Var; 2] {
        let names = match self {
            ChartId::U0 => ["x", "y"],
            ChartId::U1 => ["z1", "w1"],
            ChartId::U2 => ["X", "Y"],
            ChartId::U3 => ["z3", "w3"],
            ChartId::Local => ["u", "v"],
        };
        [Var::new(names[0]), Var::new(names[1])]
    }

    pub fn parse(s: &str) -> Option<ChartId> {
        Some(match s {
            "U0" => ChartId::U0,
            "U1" => ChartId::U1,
            "U2" => ChartId::U2,
            "U3" => ChartId::U3,
            _ => return None,
        })
    }
}

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// `d/dt (coords) = (dxdt, dydt)` on one chart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneVectorField {
    pub chart: ChartId,
    pub model: SurfaceModel,
    pub coords: [Var; 2],
    pub dxdt: MRat,
    pub dydt: MRat,
}

impl PlaneVectorField {
    pub fn new(model: SurfaceModel, chart: ChartId, dxdt: MRat, dydt: MRat) -> PlaneVectorField {
        PlaneVectorField { chart, model, coords: chart.coords(), dxdt, dydt }
    }

    /// A field on U0 from two expressions in `x`, `y`, `t` and parameters.
    pub fn parse(model: SurfaceModel, dxdt: &str, dydt: &str) -> Result<PlaneVectorField> {
        Ok(PlaneVectorField::new(model, ChartId::U0, parse_rat(dxdt)?, parse_rat(dydt)?))
    }

    pub fn components(&self) -> [&MRat; 2] {
        [&self.dxdt, &self.dydt]
    }

    pub fn map(&self, f: impl Fn(&MRat) -> MRat) -> PlaneVectorField {
        PlaneVectorField { dxdt: f(&self.dxdt), dydt: f(&self.dydt), ..self.clone() }
    }

    pub fn subst(&self, m: &HashMap<Var, MRat>) -> PlaneVectorField {
        let mut out = self.map(|e| e.subst(m));
        out.model.twist = out.model.twist.iter().map(|g| g.subst(m)).collect();
        out
    }

    pub fn is_zero(&self) -> bool {
        self.dxdt.is_zero() && self.dydt.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.dxdt.is_polynomial_in(&self.coords) && self.dydt.is_polynomial_in(&self.coords)
    }

    /// Same field written with new coordinate names.
    pub fn rename_coords(&self, chart: ChartId, coords: [Var; 2]) -> PlaneVectorField {
        let m = HashMap::from([(self.coords[0], coords[0]), (self.coords[1], coords[1])]);
        PlaneVectorField { chart, coords, dxdt: self.dxdt.rename(&m), dydt: self.dydt.rename(&m), model: self.model.clone() }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }
}

impl fmt::Display for PlaneVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y] = self.coords;
        writeln!(f, "d{x}/dt = {}", self.dxdt)?;
        write!(f, "d{y}/dt = {}", self.dydt)
    }
}

/// Push `(f, g)` in coordinates `src` forward along `φ` (expressed in `src`),
/// writing the result in the new coordinates through the inverse `ψ`
/// (`src` expressed in the new coordinates). Time may appear in `φ`.
pub fn change_coordinates(fg: [&MRat; 2], src: [Var; 2], phi: &[MRat; 2], psi: &[MRat; 2]) -> [MRat; 2] {
    let t = t_var();
    let back: HashMap<Var, MRat> = HashMap::from([(src[0], psi[0].clone()), (src[1], psi[1].clone())]);
    let comp = |p: &MRat| {
        let d = &(&(&p.derivative(src[0]) * fg[0]) + &(&p.derivative(src[1]) * fg[1])) + &p.derivative(t);
        d.subst(&back)
    };
    [comp(&phi[0]), comp(&phi[1])]
}

/// Forward map from U0 to `chart` and its inverse.
fn chart_maps(model: &SurfaceModel, chart: ChartId) -> ([MRat; 2], [MRat; 2]) {
    let [x, y] = ChartId::U0.coords().map(MRat::var);
    let [u, v] = chart.coords().map(MRat::var);
    let one = MRat::one();
    match chart {
        ChartId::U0 => ([x, y], [u, v]),
        ChartId::U1 => ([&one / &x, model.w1(&x, &y)], [&one / &u, model.y_from(&u, &v)]),
        ChartId::U2 => ([x, &one / &y], [u, &one / &v]),
        ChartId::U3 => ([&one / &x, &one / &model.w1(&x, &y)], [&one / &u, model.y_from(&u, &(&one / &v))]),
        ChartId::Local => panic!("local coordinates have no fixed chart map"),
    }
}

pub fn chart_transform(vf: &PlaneVectorField, target: ChartId) -> PlaneVectorField {
    if vf.chart == target {
        return vf.clone();
    }
    assert!(vf.chart != ChartId::Local && target != ChartId::Local, "local coordinates cannot be re-charted");
    let u0 = if vf.chart == ChartId::U0 {
        vf.clone()
    } else {
        let (phi, psi) = chart_maps(&vf.model, vf.chart);
        // From the source chart back to U0: forward is ψ, inverse is φ.
        let [dx, dy] = change_coordinates(vf.components(), vf.coords, &psi, &phi);
        PlaneVectorField::new(vf.model.clone(), ChartId::U0, dx, dy)
    };
    if target == ChartId::U0 {
        return u0;
    }
    let (phi, psi) = chart_maps(&vf.model, target);
    let [a, b] = change_coordinates(u0.components(), u0.coords, &phi, &psi);
    PlaneVectorField::new(vf.model.clone(), target, a, b)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogConditionReport {
    pub holds: bool,
    pub witnesses: Vec<String>,
}

/// (1) the U1 rewrite is polynomial; (2) on U2, `Y·dX/dt` and `dY/dt` are
/// polynomial.
pub fn check_log_condition(vf: &PlaneVectorField) -> LogConditionReport {
    let u0 = chart_transform(vf, ChartId::U0);
    let mut witnesses = Vec::new();
    let u1 = chart_transform(&u0, ChartId::U1);
    for (name, c) in [("dz1/dt", &u1.dxdt), ("dw1/dt", &u1.dydt)] {
        if !c.is_polynomial_in(&u1.coords) {
            witnesses.push(format!("U1: {name} = {c} is not polynomial"));
        }
    }
    let u2 = chart_transform(&u0, ChartId::U2);
    let y = MRat::var(u2.coords[1]);
    let f1 = &y * &u2.dxdt;
    if !f1.is_polynomial_in(&u2.coords) {
        witnesses.push(format!("U2: dX/dt = {} has a pole of order > 1 along Y = 0", u2.dxdt));
    }
    if !u2.dydt.is_polynomial_in(&u2.coords) {
        witnesses.push(format!("U2: dY/dt = {} is not polynomial", u2.dydt));
    }
    LogConditionReport { holds: witnesses.is_empty(), witnesses }
}

/// Degree bounds of `(b1, …, b5)` in `dx/dt = b1 + b2·y`,
/// `dy/dt = b3 + b4·y + b5·y²` forced by holomorphy on U1.
pub fn degree_bounds(n: i64) -> Result<[u32; 5]> {
    if n < 1 {
        return Err(GrsError::InvalidN(n));
    }
    let n = n as u32;
    Ok([n + 1, n + 2, n - 1, n, n + 1])
}

/// A vector field whose coefficients contain unknowns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoefficientFamily {
    pub vf: PlaneVectorField,
    pub unknowns: Vec<Var>,
}

const SIGMA2_DX: &str = "a1*x^3*y + a2*x^2*y + 1/2*((3*a1 + 2*a3)*g - a4)*x^2 + a5*x*y + ((a2 + a9)*g - a6)*x + a7*y + a8";
const SIGMA2_DY: &str = "a3*x^2*y^2 + a9*x*y^2 + a10*y^2 + a4*x*y + a6*y + 1/2*(a1*g + a4)*g";

/// The ten-coefficient Σ2 family.
pub fn sigma2_family(model: &SurfaceModel) -> CoefficientFamily {
    assert_eq!(model.n, 2, "the ten-coefficient family lives on Σ2");
    let m = HashMap::from([(Var::new("g"), model.twist[0].clone())]);
    let dx = parse_rat(SIGMA2_DX).expect("family text").subst(&m);
    let dy = parse_rat(SIGMA2_DY).expect("family text").subst(&m);
    let unknowns = (1..=10).map(|i| Var::new(&format!("a{i}"))).collect();
    CoefficientFamily { vf: PlaneVectorField::new(model.clone(), ChartId::U0, dx, dy), unknowns }
}

fn b_name(i: usize, k: u32) -> Var {
    Var::new(&format!("b{i}_{k}"))
}

/// Family with coefficient unknowns `b{i}_{k}` (coefficient of `x^k` in `b_i`)
/// satisfying holomorphy on U1 and accessibility of the point over `x = ∞`.
/// With `normalize_infinity = false` only holomorphy is imposed.
pub fn b_family(model: &SurfaceModel, normalize_infinity: bool) -> CoefficientFamily {
    let n = model.n;
    let bounds = degree_bounds(n as i64).expect("n ≥ 1");
    let x = MRat::var(Var::new("x"));
    let y = MRat::var(Var::new("y"));
    let mut b: Vec<MRat> = Vec::new();
    let mut unknowns = Vec::new();
    for (i, &d) in bounds.iter().enumerate() {
        let mut acc = MRat::zero();
        for k in 0..=d {
            let v = b_name(i + 1, k);
            unknowns.push(v);
            acc = &acc + &(&MRat::var(v) * &x.pow(k as i32).expect("power"));
        }
        b.push(acc);
    }
    let dx = &b[0] + &(&b[1] * &y);
    let dy = &(&b[2] + &(&b[3] * &y)) + &(&b[4] * &(&y * &y));
    let vf = PlaneVectorField::new(model.clone(), ChartId::U0, dx, dy);

    let u1 = chart_transform(&vf, ChartId::U1);
    let mut eqs: Vec<MPoly> = Vec::new();
    for c in u1.components() {
        eqs.extend(non_polynomial_coefficients(c, &u1.coords));
    }
    if normalize_infinity {
        eqs.push(MPoly::var(b_name(2, bounds[1])));
    }
    let mut priority = vec![b_name(2, bounds[1]), b_name(5, bounds[4]), b_name(4, bounds[3])];
    for i in [1usize, 3] {
        for k in (0..=bounds[i - 1]).rev() {
            priority.push(b_name(i, k));
        }
    }
    let opts = SolveOptions { priority, nonvanishing: vec![] };
    let sol = solve_triangular_with(&eqs, &unknowns, &opts).expect("holomorphy conditions are linear and consistent");
    let sub = sol.as_map();
    CoefficientFamily { vf: vf.subst(&sub), unknowns: sol.free }
}

/// Coefficients (over the other symbols) of the terms of `r` that make it
/// non-polynomial in `coords`, when its denominator is a monomial in `coords`.
fn non_polynomial_coefficients(r: &MRat, coords: &[Var; 2]) -> Vec<MPoly> {
    if r.is_polynomial_in(coords) {
        return vec![];
    }
    let den = r.den();
    assert!(den.is_monomial(), "chart denominators are coordinate monomials");
    let dm = den.lm().clone();
    r.num().coefficients_over(coords).into_iter().filter(|(m, _)| !dm.divides(m)).map(|(_, c)| c).collect()
}

/// The generic family for a model: the ten-coefficient family on Σ2, the
/// `b`-coefficient family otherwise.
pub fn generic_family(model: &SurfaceModel) -> CoefficientFamily {
    if model.n == 2 {
        sigma2_family(model)
    } else {
        b_family(model, true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> MRat {
        parse_rat(s).unwrap()
    }

    #[test]
    fn transition_round_trip() {
        let m = SurfaceModel::with_alpha(3, r("alpha")).unwrap();
        let x = r("x");
        let y = r("y");
        let w = m.w1(&x, &y);
        assert_eq!(m.y_from(&(&MRat::one() / &x), &w), y);
    }

    #[test]
    fn hyperbolic_field_to_u1() {
        let vf = PlaneVectorField::parse(SurfaceModel::painleve(), "x", "-y").unwrap();
        let u1 = chart_transform(&vf, ChartId::U1);
        assert_eq!(u1.dxdt, r("-z1"));
        assert_eq!(u1.dydt, r("w1"));
        assert_eq!(chart_transform(&u1, ChartId::U0), vf);
    }

    #[test]
    fn zero_field() {
        let vf = PlaneVectorField::parse(SurfaceModel::painleve(), "0", "0").unwrap();
        assert!(chart_transform(&vf, ChartId::U3).is_zero());
    }

    #[test]
    fn log_condition() {
        let bad = PlaneVectorField::parse(SurfaceModel::painleve(), "y^2", "0").unwrap();
        let rep = check_log_condition(&bad);
        assert!(!rep.holds);
        assert!(rep.witnesses.iter().any(|w| w.starts_with("U2: dX/dt")));
        let fam = sigma2_family(&SurfaceModel::painleve());
        assert!(check_log_condition(&fam.vf).holds);
    }

    #[test]
    fn sigma2_family_in_u1() {
        let fam = sigma2_family(&SurfaceModel::painleve());
        let u1 = chart_transform(&fam.vf, ChartId::U1);
        let dz = "a7*z1^4*w1 + a5*z1^3*w1 + a2*z1^2*w1 + a1*z1*w1 + alpha2*a7*z1^3 + (alpha2*a5 - a8)*z1^2 \
                  + (a6 - alpha2*a9)*z1 - 1/2*alpha2*(a1 + 2*a3) + a4/2";
        let dw = "-2*a7*z1^3*w1^2 - (2*a5 + a10)*z1^2*w1^2 - 3*alpha2*a7*z1^2*w1 - (2*a2 + a9)*z1*w1^2 \
                  - (2*a1 + a3)*w1^2 - (alpha2*(3*a5 + 2*a10) - 2*a8)*z1*w1 - alpha2^2*a7*z1 - (alpha2*a2 + a6)*w1 \
                  - alpha2*(alpha2*(a5 + a10) - a8)";
        assert_eq!(u1.dxdt, r(dz));
        assert_eq!(u1.dydt, r(dw));
    }

    #[test]
    fn degree_bound_values() {
        assert_eq!(degree_bounds(2).unwrap(), [3, 4, 1, 2, 3]);
        assert_eq!(degree_bounds(1).unwrap(), [2, 3, 0, 1, 2]);
        assert_eq!(degree_bounds(0), Err(GrsError::InvalidN(0)));
    }

    #[test]
    fn b_family_matches_sigma2() {
        let model = SurfaceModel::painleve();
        let fam = b_family(&model, true);
        let names = [
            ("b2_3", "a1"),
            ("b2_2", "a2"),
            ("b2_1", "a5"),
            ("b2_0", "a7"),
            ("b1_0", "a8"),
            ("b5_2", "a3"),
            ("b5_1", "a9"),
            ("b5_0", "a10"),
            ("b4_1", "a4"),
            ("b4_0", "a6"),
        ];
        let m: HashMap<Var, Var> = names.iter().map(|(a, b)| (Var::new(a), Var::new(b))).collect();
        let mut got: Vec<Var> = fam.unknowns.iter().map(|v| m[v]).collect();
        got.sort();
        assert_eq!(got.len(), 10);
        let renamed = PlaneVectorField { dxdt: fam.vf.dxdt.rename(&m), dydt: fam.vf.dydt.rename(&m), ..fam.vf.clone() };
        assert_eq!(renamed, sigma2_family(&model).vf);
    }

    #[test]
    fn b_family_general_n_is_holomorphic() {
        for n in [1, 3] {
            let model = SurfaceModel::with_alpha(n, r("alpha")).unwrap();
            let fam = b_family(&model, true);
            assert!(check_log_condition(&fam.vf).holds, "n = {n}");
        }
    }
}
