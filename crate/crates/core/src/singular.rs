//! Accessible singular points on the boundary divisor, their linear
//! approximation matrices and local indices, and the α-test.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::algebra::{t_var, MPoly, MRat, Mat2, Var};
use crate::charts::{change_coordinates, chart_transform, ChartId, PlaneVectorField};
use crate::error::{GrsError, Result};

/// A point on the pole divisor of a chart. `pole` is the index of the
/// coordinate whose vanishing defines the divisor locally.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AccessiblePoint {
    pub label: String,
    pub chart: ChartId,
    pub point: [MRat; 2],
    pub pole: usize,
    pub multiplicity: u32,
}

impl fmt::Display for AccessiblePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X={} in {} at ({}, {}), multiplicity {}", self.label, self.chart, self.point[0], self.point[1], self.multiplicity)
    }
}

/// Shift coordinates so that `p` becomes the origin; `p` may depend on `t`.
pub fn translate(vf: &PlaneVectorField, p: &[MRat; 2]) -> PlaneVectorField {
    if p[0].is_zero() && p[1].is_zero() {
        return vf.clone();
    }
    let [u, v] = vf.coords.map(MRat::var);
    let phi = [&u - &p[0], &v - &p[1]];
    let psi = [&u + &p[0], &v + &p[1]];
    let [a, b] = change_coordinates(vf.components(), vf.coords, &phi, &psi);
    PlaneVectorField { dxdt: a, dydt: b, ..vf.clone() }
}

fn origin(coords: &[Var; 2]) -> HashMap<Var, MRat> {
    HashMap::from([(coords[0], MRat::zero()), (coords[1], MRat::zero())])
}

/// `h·F` with `h` the pole coordinate.
fn pole_cleared(vf: &PlaneVectorField, pole: usize) -> [MRat; 2] {
    let h = MRat::var(vf.coords[pole]);
    [&h * &vf.dxdt, &h * &vf.dydt]
}

/// Order of vanishing of the univariate `p` (in `v`) at `v = c`, and the
/// cofactor.
fn vanishing_order(p: &MPoly, v: Var, c: &MRat) -> (u32, MPoly) {
    let lin = {
        let (cn, cd) = c.clone().into_parts();
        &(&cd * &MPoly::var(v)) - &cn
    };
    let mut q = p.clone();
    let mut k = 0;
    while !q.is_zero() {
        match q.div_exact(&lin) {
            Some(r) => {
                q = r;
                k += 1;
            }
            None => break,
        }
    }
    (k, q)
}

fn label_of(c: &MRat) -> String {
    c.to_string()
}

/// Extra root candidates from `GRS_CANDIDATE_ROOTS` (comma separated).
pub fn env_candidates() -> Vec<MRat> {
    std::env::var("GRS_CANDIDATE_ROOTS")
        .ok()
        .map(|s| s.split(',').filter(|p| !p.trim().is_empty()).filter_map(|p| crate::algebra::parse_rat(p).ok()).collect())
        .unwrap_or_default()
}

/// All accessible points on the divisor: finite ones in U2, the one over
/// `x = ∞` at the origin of U3.
pub fn accessible_points(vf: &PlaneVectorField, extra: &[MRat]) -> Result<Vec<AccessiblePoint>> {
    let u2 = chart_transform(vf, ChartId::U2);
    let [xv, yv] = u2.coords;
    let f1 = (&MRat::var(yv) * &u2.dxdt).try_subst(&HashMap::from([(yv, MRat::zero())]))?;
    if !f1.is_polynomial_in(&[xv]) {
        return Err(GrsError::NotAccessible(format!("pole numerator {f1} is not polynomial on the divisor")));
    }
    let num = f1.num().clone();
    if num.is_zero() {
        return Err(GrsError::NotAccessible("the whole divisor is singular".into()));
    }
    let mut out = Vec::new();
    let mut rest = num;
    let mut candidates = vec![MRat::zero(), MRat::one(), MRat::var(t_var())];
    candidates.extend(extra.iter().cloned());
    candidates.extend(env_candidates());
    for c in candidates {
        if out.iter().any(|p: &AccessiblePoint| p.point[0] == c) {
            continue;
        }
        let (k, q) = vanishing_order(&rest, xv, &c);
        if k > 0 {
            out.push(AccessiblePoint { label: label_of(&c), chart: ChartId::U2, point: [c, MRat::zero()], pole: 1, multiplicity: k });
            rest = q;
        }
    }
    loop {
        let d = rest.degree_in(xv);
        if d == 0 {
            break;
        }
        if d >= 2 {
            return Err(GrsError::UnresolvedFactor(rest.to_string()));
        }
        let c = MRat::new(-rest.coeff_in(xv, 0), rest.coeff_in(xv, 1)).expect("degree one");
        let (k, q) = vanishing_order(&rest, xv, &c);
        out.push(AccessiblePoint { label: label_of(&c), chart: ChartId::U2, point: [c, MRat::zero()], pole: 1, multiplicity: k });
        rest = q;
    }

    let u3 = chart_transform(vf, ChartId::U3);
    let [zv, wv] = u3.coords;
    let g = (&MRat::var(wv) * &u3.dxdt).try_subst(&HashMap::from([(wv, MRat::zero())]))?;
    if g.is_polynomial_in(&[zv]) {
        let (k, _) = vanishing_order(g.num(), zv, &MRat::zero());
        if k > 0 && !g.is_zero() {
            out.push(AccessiblePoint {
                label: "∞".into(),
                chart: ChartId::U3,
                point: [MRat::zero(), MRat::zero()],
                pole: 1,
                multiplicity: k,
            });
        }
    }
    Ok(out)
}

/// Ordered eigenvalue data at an accessible point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalIndex {
    /// Jacobian of `h·F` at the point, in chart coordinate order.
    pub matrix: Mat2,
    pub pole: usize,
    /// Diagonal entry in the pole direction.
    pub a11: MRat,
    /// Diagonal entry along the divisor.
    pub a22: MRat,
    /// Entry coupling the divisor direction to the pole direction.
    pub a21: MRat,
    /// `a22 / a11`, when `a11 ≠ 0`.
    pub ratio: Option<MRat>,
}

impl LocalIndex {
    pub fn from_matrix(matrix: Mat2, pole: usize) -> Result<LocalIndex> {
        let o = 1 - pole;
        if !matrix.get(pole, o).is_zero() {
            return Err(GrsError::NotTriangular(matrix.to_string()));
        }
        let a11 = matrix.get(pole, pole).clone();
        let a22 = matrix.get(o, o).clone();
        let a21 = matrix.get(o, pole).clone();
        let ratio = if a11.is_zero() { None } else { Some(&a22 / &a11) };
        Ok(LocalIndex { matrix, pole, a11, a22, a21, ratio })
    }

    /// `(scale, matrix / scale)` with the scale taken from the pole entry.
    pub fn factored(&self) -> (MRat, Mat2) {
        if self.a11.is_zero() {
            return (MRat::one(), self.matrix.clone());
        }
        let inv = self.a11.recip().expect("nonzero");
        (self.a11.clone(), self.matrix.scale(&inv))
    }
}

impl fmt::Display for LocalIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (s, m) = self.factored();
        if s.is_one() {
            write!(f, "{m}")
        } else {
            write!(f, "{s} * {m}")
        }
    }
}

/// Move `p` to the origin and return the field there.
pub fn centered(vf: &PlaneVectorField, p: &AccessiblePoint) -> PlaneVectorField {
    let base = if vf.chart == p.chart || p.chart == ChartId::Local { vf.clone() } else { chart_transform(vf, p.chart) };
    translate(&base, &p.point)
}

/// Jacobian of `h·F` at the origin of an already centered field, after
/// checking accessibility there.
pub fn jacobian_at_origin(vf: &PlaneVectorField, pole: usize) -> Result<Mat2> {
    let g = pole_cleared(vf, pole);
    let o = origin(&vf.coords);
    for (i, gi) in g.iter().enumerate() {
        let v =
            gi.try_subst(&o).map_err(|_| GrsError::NotAccessible(format!("component {i} is not holomorphic after clearing the pole")))?;
        if !v.is_zero() {
            return Err(GrsError::NotAccessible(format!("component {i} of the pole-cleared field is {v} at the point")));
        }
    }
    let e = |i: usize, j: usize| -> Result<MRat> {
        g[i].derivative(vf.coords[j]).try_subst(&o).map_err(|_| GrsError::NotAccessible("singular Jacobian entry".into()))
    };
    Ok(Mat2::new(e(0, 0)?, e(0, 1)?, e(1, 0)?, e(1, 1)?))
}

pub fn linearization(vf: &PlaneVectorField, p: &AccessiblePoint) -> Result<LocalIndex> {
    let c = centered(vf, p);
    LocalIndex::from_matrix(jacobian_at_origin(&c, p.pole)?, p.pole)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaReason {
    IntegerRatio,
    ResonantRequiresZero,
    Branching,
    SymbolicRatio,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlphaTestResult {
    /// Constant-coefficient matrix of the reduced system at `t = t0`.
    pub reduced: Mat2,
    pub pole: usize,
    /// Pole coordinate solution `a11·T + C1`.
    pub pole_solution: MRat,
    /// The other coordinate, as text in terms of `W`.
    pub closed_form: String,
    /// Exact form when the exponent is an integer.
    pub closed_form_exact: Option<MRat>,
    pub single_valued: bool,
    pub reason: AlphaReason,
}

fn as_integer(r: &MRat) -> Option<Option<i64>> {
    let q = r.constant_value()?;
    Some(if q.is_integer() { i64::try_from(q.to_integer()).ok() } else { None })
}

/// α-test from the linear part of the system at a point: with
/// `W = a11·T + C1`, the other coordinate is `C2·W^{a22/a11} + a21·W/(a11 − a22)`
/// or, in the resonant case, `C2·W + (a21/a11)·W·Log W`.
pub fn alpha_test_matrix(index: &LocalIndex, t0: Var) -> Result<AlphaTestResult> {
    let at = HashMap::from([(t_var(), MRat::var(t0))]);
    let m = index.matrix.subst(&at);
    let li = LocalIndex::from_matrix(m.clone(), index.pole)?;
    if li.a11.is_zero() {
        return Err(GrsError::ZeroLeadingEigenvalue);
    }
    let (tt, c1, c2) = (MRat::sym("T"), MRat::sym("C1"), MRat::sym("C2"));
    let w = &(&li.a11 * &tt) + &c1;
    let ratio = li.ratio.clone().expect("a11 ≠ 0");
    let ws = format!("({w})");
    let (closed_form, exact, single_valued, reason) = if ratio.is_one() {
        let coef = &li.a21 / &li.a11;
        let text = format!("C2*{ws} + ({coef})*{ws}*Log{ws}");
        if li.a21.is_zero() {
            (text, Some(&c2 * &w), true, AlphaReason::ResonantRequiresZero)
        } else {
            (text, None, false, AlphaReason::ResonantRequiresZero)
        }
    } else {
        let lin = &(&li.a21 * &w) / &(&li.a11 - &li.a22);
        match as_integer(&ratio) {
            Some(Some(k)) => {
                let z = &(&c2 * &w.pow(k as i32)?) + &lin;
                (format!("C2*{ws}^{k} + {}", paren(&lin)), Some(z), true, AlphaReason::IntegerRatio)
            }
            Some(None) => (format!("C2*{ws}^({ratio}) + {}", paren(&lin)), None, false, AlphaReason::Branching),
            None => (format!("C2*{ws}^({ratio}) + {}", paren(&lin)), None, false, AlphaReason::SymbolicRatio),
        }
    };
    Ok(AlphaTestResult { reduced: m, pole: index.pole, pole_solution: w, closed_form, closed_form_exact: exact, single_valued, reason })
}

fn paren(r: &MRat) -> String {
    format!("({r})")
}

pub fn alpha_test(vf: &PlaneVectorField, p: &AccessiblePoint, t0: Var) -> Result<AlphaTestResult> {
    if p.multiplicity != 1 {
        return Err(GrsError::NotAccessible(format!("the α-test needs a simple point; X={} has multiplicity {}", p.label, p.multiplicity)));
    }
    alpha_test_matrix(&linearization(vf, p)?, t0)
}

/// The κ → 0 limit of the system under `coords = κ·(Z, W)`, `t = t0 + κT`,
/// returned as the matrix `M` of `d/dT (Z, W) = (1/h)·M·(Z, W)`.
pub fn reduced_by_scaling(vf: &PlaneVectorField, p: &AccessiblePoint, t0: Var) -> Result<Mat2> {
    let c = centered(vf, p);
    let kappa = Var::new("kappa");
    let k = MRat::var(kappa);
    let (zn, wn) = (Var::new("Z"), Var::new("W"));
    let sub = HashMap::from([
        (c.coords[0], &k * &MRat::var(zn)),
        (c.coords[1], &k * &MRat::var(wn)),
        (t_var(), &MRat::var(t0) + &(&k * &MRat::sym("T"))),
    ]);
    let g = pole_cleared(&c, p.pole);
    let mut rows = Vec::new();
    for gi in &g {
        // dZ/dT = G(κZ, κW, t0 + κT)/(κ·h); the κ → 0 limit of G/κ is linear.
        let scaled = (&gi.subst(&sub) / &k).try_subst(&HashMap::from([(kappa, MRat::zero())]))?;
        let row = [
            scaled.derivative(zn).try_subst(&HashMap::from([(zn, MRat::zero()), (wn, MRat::zero())]))?,
            scaled.derivative(wn).try_subst(&HashMap::from([(zn, MRat::zero()), (wn, MRat::zero())]))?,
        ];
        let rebuilt = &(&row[0] * &MRat::var(zn)) + &(&row[1] * &MRat::var(wn));
        if rebuilt != scaled {
            return Err(GrsError::VerificationMismatch(format!("reduced system is not linear: {scaled}")));
        }
        rows.push(row);
    }
    let [r0, r1]: [[MRat; 2]; 2] = rows.try_into().expect("two rows");
    Ok(Mat2([r0, r1]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatioVerdict {
    Integer,
    NonInteger,
    Symbolic,
    Undefined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScreenReport {
    pub verdicts: Vec<(String, Option<MRat>, RatioVerdict)>,
    /// Every ratio is an integer.
    pub passes: bool,
    /// Some ratio is a non-integer constant: the α-test solution branches.
    pub branching: bool,
}

pub fn ratio_verdict(r: Option<&MRat>) -> RatioVerdict {
    match r {
        None => RatioVerdict::Undefined,
        Some(r) => match as_integer(r) {
            Some(Some(_)) => RatioVerdict::Integer,
            Some(None) => {
                // Large integers that overflow i64 still count as integers.
                let q = r.constant_value().expect("constant");
                if q.is_integer() {
                    RatioVerdict::Integer
                } else {
                    RatioVerdict::NonInteger
                }
            }
            None => RatioVerdict::Symbolic,
        },
    }
}

/// Necessary condition for single-valuedness: every local-index ratio is an
/// integer.
pub fn branch_point_screen(indices: &[(String, LocalIndex)]) -> ScreenReport {
    let verdicts: Vec<_> = indices.iter().map(|(l, li)| (l.clone(), li.ratio.clone(), ratio_verdict(li.ratio.as_ref()))).collect();
    let passes = verdicts.iter().all(|v| v.2 == RatioVerdict::Integer);
    let branching = verdicts.iter().any(|v| v.2 == RatioVerdict::NonInteger);
    ScreenReport { verdicts, passes, branching }
}

/// Local indices at every simple accessible point.
pub fn local_indices(vf: &PlaneVectorField, extra: &[MRat]) -> Result<Vec<(String, LocalIndex)>> {
    let mut out = Vec::new();
    for p in accessible_points(vf, extra)? {
        if p.multiplicity == 1 {
            out.push((p.label.clone(), linearization(vf, &p)?));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_rat;
    use crate::charts::SurfaceModel;

    fn r(s: &str) -> MRat {
        parse_rat(s).unwrap()
    }

    #[test]
    fn linear_system_reads_its_matrix() {
        let vf = PlaneVectorField::new(SurfaceModel::painleve(), ChartId::U2, r("(2*X - alpha*Y)/Y"), r("1"));
        let p = AccessiblePoint { label: "0".into(), chart: ChartId::U2, point: [MRat::zero(), MRat::zero()], pole: 1, multiplicity: 1 };
        let li = linearization(&vf, &p).unwrap();
        assert_eq!(li.matrix, Mat2::new(r("2"), r("-alpha"), r("0"), r("1")));
        assert_eq!(li.ratio, Some(r("2")));
    }

    #[test]
    fn non_accessible_origin() {
        let vf = PlaneVectorField::new(SurfaceModel::painleve(), ChartId::U2, r("(1 + X)/Y"), r("1"));
        let p = AccessiblePoint { label: "0".into(), chart: ChartId::U2, point: [MRat::zero(), MRat::zero()], pole: 1, multiplicity: 1 };
        assert!(matches!(linearization(&vf, &p), Err(GrsError::NotAccessible(_))));
    }

    #[test]
    fn alpha_test_cases() {
        let resonant = LocalIndex::from_matrix(Mat2::new(r("1"), r("5"), r("0"), r("1")), 1).unwrap();
        let a = alpha_test_matrix(&resonant, Var::new("t0")).unwrap();
        assert!(!a.single_valued);
        assert_eq!(a.reason, AlphaReason::ResonantRequiresZero);

        let half = LocalIndex::from_matrix(Mat2::new(r("1/2"), r("0"), r("0"), r("1")), 1).unwrap();
        let b = alpha_test_matrix(&half, Var::new("t0")).unwrap();
        assert!(!b.single_valued);
        assert_eq!(b.reason, AlphaReason::Branching);

        let zero = LocalIndex::from_matrix(Mat2::new(r("1"), r("0"), r("0"), r("0")), 1).unwrap();
        assert_eq!(alpha_test_matrix(&zero, Var::new("t0")), Err(GrsError::ZeroLeadingEigenvalue));
    }

    #[test]
    fn screen() {
        let li = |a: &str| LocalIndex::from_matrix(Mat2::new(r(a), r("0"), r("0"), r("1")), 1).unwrap();
        let rep = branch_point_screen(&[("0".into(), li("2")), ("1".into(), li("3/2"))]);
        assert!(!rep.passes && rep.branching);
        let rep = branch_point_screen(&[("0".into(), li("2")), ("1".into(), li("-1"))]);
        assert!(rep.passes);
    }
}
