use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::gcd::gcd;
use super::monomial::Monomial;
use super::poly::MPoly;
use super::var::Var;
use super::{AlgebraError, Q};

/// Rational function `num / den` over ℚ, kept reduced with a monic
/// denominator; zero is `0/1`. Structural equality is field equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MRat {
    num: MPoly,
    den: MPoly,
}

impl MRat {
    pub fn zero() -> MRat {
        MRat { num: MPoly::zero(), den: MPoly::one() }
    }

    pub fn one() -> MRat {
        MRat::from_poly(MPoly::one())
    }

    pub fn int(n: i64) -> MRat {
        MRat::from_poly(MPoly::int(n))
    }

    pub fn frac(p: i64, q: i64) -> MRat {
        MRat::constant(Q::new(p.into(), q.into()))
    }

    pub fn constant(c: Q) -> MRat {
        MRat::from_poly(MPoly::constant(c))
    }

    pub fn var(v: Var) -> MRat {
        MRat::from_poly(MPoly::var(v))
    }

    pub fn sym(name: &str) -> MRat {
        MRat::var(Var::new(name))
    }

    pub fn from_poly(p: MPoly) -> MRat {
        MRat { num: p, den: MPoly::one() }
    }

    /// Normalize `num / den`.
    pub fn new(num: MPoly, den: MPoly) -> Result<MRat, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(MRat::reduce(num, den))
    }

    fn reduce(num: MPoly, den: MPoly) -> MRat {
        if num.is_zero() {
            return MRat::zero();
        }
        if let Some(c) = den.constant_value() {
            return MRat { num: num.scale(&c.recip()), den: MPoly::one() };
        }
        let g = gcd(&num, &den);
        let (num, den) =
            if g.is_one() { (num, den) } else { (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides")) };
        MRat::with_coprime(num, den)
    }

    /// Normalize when `num` and `den` are already known coprime.
    fn with_coprime(num: MPoly, den: MPoly) -> MRat {
        let lc = den.lc().clone();
        if lc.is_one() {
            MRat { num, den }
        } else {
            let inv = lc.recip();
            MRat { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn num(&self) -> &MPoly {
        &self.num
    }

    pub fn den(&self) -> &MPoly {
        &self.den
    }

    pub fn into_parts(self) -> (MPoly, MPoly) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Option<&MPoly> {
        self.den.is_one().then_some(&self.num)
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut s = self.num.vars();
        s.extend(self.den.vars());
        s
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.num.contains_var(v) || self.den.contains_var(v)
    }

    pub fn contains_any(&self, vs: &[Var]) -> bool {
        self.num.contains_any(vs) || self.den.contains_any(vs)
    }

    /// True when the denominator does not involve any of `vs`, i.e. the value
    /// is a polynomial in `vs` over the field of the other symbols.
    pub fn is_polynomial_in(&self, vs: &[Var]) -> bool {
        !self.den.contains_any(vs)
    }

    pub fn recip(&self) -> Result<MRat, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(MRat::with_coprime(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, o: &MRat) -> Result<MRat, AlgebraError> {
        Ok(self * &o.recip()?)
    }

    pub fn scale(&self, c: &Q) -> MRat {
        if c.is_zero() {
            return MRat::zero();
        }
        MRat { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn mul_poly(&self, p: &MPoly) -> MRat {
        self * &MRat::from_poly(p.clone())
    }

    pub fn pow(&self, e: i32) -> Result<MRat, AlgebraError> {
        if e < 0 {
            return self.recip()?.pow(-e);
        }
        let e = e as u32;
        Ok(MRat { num: self.num.pow(e), den: self.den.pow(e) })
    }

    pub fn derivative(&self, v: Var) -> MRat {
        let dn = self.num.derivative(v);
        if self.den.is_one() {
            return MRat::from_poly(dn);
        }
        let dd = self.den.derivative(v);
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        MRat::reduce(num, &self.den * &self.den)
    }

    /// Substitute rational functions for variables (simultaneously).
    pub fn subst(&self, map: &HashMap<Var, MRat>) -> MRat {
        if map.is_empty() || !map.keys().any(|&v| self.contains_var(v)) {
            return self.clone();
        }
        let (nn, nd) = subst_poly_parts(&self.num, map);
        let (dn, dd) = subst_poly_parts(&self.den, map);
        // (nn/nd) / (dn/dd)
        let num = &nn * &dd;
        let den = &nd * &dn;
        assert!(!den.is_zero(), "substitution makes a denominator vanish");
        MRat::reduce(num, den)
    }

    /// Substitution that reports a vanishing denominator instead of panicking.
    pub fn try_subst(&self, map: &HashMap<Var, MRat>) -> Result<MRat, AlgebraError> {
        if map.is_empty() || !map.keys().any(|&v| self.contains_var(v)) {
            return Ok(self.clone());
        }
        let (nn, nd) = subst_poly_parts(&self.num, map);
        let (dn, dd) = subst_poly_parts(&self.den, map);
        let den = &nd * &dn;
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(MRat::reduce(&nn * &dd, den))
    }

    pub fn subst1(&self, v: Var, value: &MRat) -> MRat {
        let mut m = HashMap::new();
        m.insert(v, value.clone());
        self.subst(&m)
    }

    pub fn eval_partial(&self, values: &HashMap<Var, Q>) -> Result<MRat, AlgebraError> {
        let den = self.den.eval_partial(values);
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        MRat::new(self.num.eval_partial(values), den)
    }

    pub fn rename(&self, map: &HashMap<Var, Var>) -> MRat {
        MRat::reduce(self.num.rename(map), self.den.rename(map))
    }

    /// Numerator and denominator as polynomials in `vs`; requires
    /// `is_polynomial_in(vs)`. Returns the coefficient (over the other symbols)
    /// of the power product `m` in `vs`.
    pub fn coeff_of(&self, vs: &[Var], m: &Monomial) -> MRat {
        assert!(self.is_polynomial_in(vs), "coefficient extraction needs a polynomial");
        let groups = self.num.coefficients_over(vs);
        match groups.get(m) {
            Some(c) => MRat::reduce(c.clone(), self.den.clone()),
            None => MRat::zero(),
        }
    }

    /// All coefficients over the power products in `vs`.
    pub fn coefficients_over(&self, vs: &[Var]) -> Vec<(Monomial, MRat)> {
        assert!(self.is_polynomial_in(vs), "coefficient extraction needs a polynomial");
        self.num.coefficients_over(vs).into_iter().rev().map(|(m, c)| (m, MRat::reduce(c, self.den.clone()))).collect()
    }

    /// Value at `v = 0` when the denominator does not vanish there.
    pub fn at_zero(&self, v: Var) -> Result<MRat, AlgebraError> {
        self.try_subst(&HashMap::from([(v, MRat::zero())]))
    }
}

/// `p(map)` as an unreduced pair `(N, D)` with one common denominator.
fn subst_poly_parts(p: &MPoly, map: &HashMap<Var, MRat>) -> (MPoly, MPoly) {
    let vars: Vec<Var> = p.vars().into_iter().filter(|v| map.contains_key(v)).collect();
    if vars.is_empty() {
        return (p.clone(), MPoly::one());
    }
    let mut degs: HashMap<Var, u32> = HashMap::new();
    for &v in &vars {
        degs.insert(v, p.degree_in(v));
    }
    // powers of numerators and denominators
    let mut npow: HashMap<Var, Vec<MPoly>> = HashMap::new();
    let mut dpow: HashMap<Var, Vec<MPoly>> = HashMap::new();
    for &v in &vars {
        let val = &map[&v];
        let d = degs[&v] as usize;
        let mut np = vec![MPoly::one()];
        let mut dp = vec![MPoly::one()];
        for k in 1..=d {
            np.push(&np[k - 1] * &val.num);
            dp.push(&dp[k - 1] * &val.den);
        }
        npow.insert(v, np);
        dpow.insert(v, dp);
    }
    let mut acc = MPoly::zero();
    // Group terms by the exponent vector over substituted variables.
    let groups = p.coefficients_over(&vars);
    for (m, coeff) in groups {
        let mut term = coeff;
        for &v in &vars {
            let e = m.exp(v) as usize;
            let d = degs[&v] as usize;
            if e > 0 {
                term = &term * &npow[&v][e];
            }
            if d > e && !map[&v].den.is_one() {
                term = &term * &dpow[&v][d - e];
            }
        }
        acc = &acc + &term;
    }
    let mut den = MPoly::one();
    for &v in &vars {
        if !map[&v].den.is_one() {
            den = &den * &dpow[&v][degs[&v] as usize];
        }
    }
    (acc, den)
}

impl<'a> Add<&'a MRat> for &'a MRat {
    type Output = MRat;
    fn add(self, o: &MRat) -> MRat {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            let num = &self.num + &o.num;
            if self.den.is_one() {
                return MRat::from_poly(num);
            }
            return MRat::reduce(num, self.den.clone());
        }
        if self.den.is_one() {
            return MRat::with_coprime(&(&self.num * &o.den) + &o.num, o.den.clone());
        }
        if o.den.is_one() {
            return MRat::with_coprime(&self.num + &(&o.num * &self.den), self.den.clone());
        }
        let g = gcd(&self.den, &o.den);
        if g.is_one() {
            let num = &(&self.num * &o.den) + &(&o.num * &self.den);
            return MRat::with_coprime(num, &self.den * &o.den);
        }
        let b1 = self.den.div_exact(&g).expect("gcd divides");
        let d1 = o.den.div_exact(&g).expect("gcd divides");
        let num = &(&self.num * &d1) + &(&o.num * &b1);
        let den = &b1 * &o.den;
        if num.is_zero() {
            return MRat::zero();
        }
        let h = gcd(&num, &g);
        if h.is_one() {
            MRat::with_coprime(num, den)
        } else {
            MRat::with_coprime(num.div_exact(&h).expect("gcd divides"), den.div_exact(&h).expect("gcd divides"))
        }
    }
}

impl<'a> Sub<&'a MRat> for &'a MRat {
    type Output = MRat;
    fn sub(self, o: &MRat) -> MRat {
        self + &(-o)
    }
}

impl<'a> Mul<&'a MRat> for &'a MRat {
    type Output = MRat;
    fn mul(self, o: &MRat) -> MRat {
        if self.is_zero() || o.is_zero() {
            return MRat::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return MRat::from_poly(&self.num * &o.num);
        }
        let g1 = gcd(&self.num, &o.den);
        let g2 = gcd(&o.num, &self.den);
        let a = if g1.is_one() { self.num.clone() } else { self.num.div_exact(&g1).expect("gcd divides") };
        let d = if g1.is_one() { o.den.clone() } else { o.den.div_exact(&g1).expect("gcd divides") };
        let c = if g2.is_one() { o.num.clone() } else { o.num.div_exact(&g2).expect("gcd divides") };
        let b = if g2.is_one() { self.den.clone() } else { self.den.div_exact(&g2).expect("gcd divides") };
        MRat::with_coprime(&a * &c, &b * &d)
    }
}

impl<'a> Div<&'a MRat> for &'a MRat {
    type Output = MRat;
    /// Panics on division by zero; use `checked_div` where that can happen.
    fn div(self, o: &MRat) -> MRat {
        self.checked_div(o).expect("division by zero rational function")
    }
}

impl Neg for &MRat {
    type Output = MRat;
    fn neg(self) -> MRat {
        MRat { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for MRat {
    type Output = MRat;
    fn neg(self) -> MRat {
        MRat { num: -self.num, den: self.den }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr<MRat> for MRat {
            type Output = MRat;
            fn $f(self, o: MRat) -> MRat {
                (&self).$f(&o)
            }
        }
        impl<'a> $tr<&'a MRat> for MRat {
            type Output = MRat;
            fn $f(self, o: &MRat) -> MRat {
                (&self).$f(o)
            }
        }
        impl<'a> $tr<MRat> for &'a MRat {
            type Output = MRat;
            fn $f(self, o: MRat) -> MRat {
                self.$f(&o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);
owned_ops!(Div, div);

impl From<MPoly> for MRat {
    fn from(p: MPoly) -> MRat {
        MRat::from_poly(p)
    }
}

impl From<i64> for MRat {
    fn from(n: i64) -> MRat {
        MRat::int(n)
    }
}

impl Zero for MRat {
    fn zero() -> MRat {
        MRat::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for MRat {
    fn one() -> MRat {
        MRat::one()
    }
}

fn wrap_num(p: &MPoly) -> String {
    if p.len() > 1 {
        format!("({p})")
    } else {
        p.to_string()
    }
}

fn wrap_den(p: &MPoly) -> String {
    let bare = p.len() == 1 && p.lc().is_one() && p.lm().pairs().len() == 1;
    if bare {
        p.to_string()
    } else {
        format!("({p})")
    }
}

impl fmt::Display for MRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", wrap_num(&self.num), wrap_den(&self.den))
        }
    }
}

impl fmt::Debug for MRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl serde::Serialize for MRat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for MRat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<MRat, D::Error> {
        let s = String::deserialize(d)?;
        super::parse::parse_rat(&s).map_err(serde::de::Error::custom)
    }
}
