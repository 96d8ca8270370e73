use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::monomial::Monomial;
use super::var::Var;
use super::Q;

/// Sparse polynomial over ℚ. Terms are kept sorted in descending graded-lex
/// order with no zero coefficients, so structural equality is mathematical
/// equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MPoly {
    terms: Vec<(Monomial, Q)>,
}

impl MPoly {
    pub fn zero() -> MPoly {
        MPoly { terms: Vec::new() }
    }

    pub fn one() -> MPoly {
        MPoly::constant(Q::one())
    }

    pub fn constant(c: Q) -> MPoly {
        if c.is_zero() {
            MPoly::zero()
        } else {
            MPoly { terms: vec![(Monomial::one(), c)] }
        }
    }

    pub fn int(n: i64) -> MPoly {
        MPoly::constant(Q::from_integer(BigInt::from(n)))
    }

    pub fn var(v: Var) -> MPoly {
        MPoly { terms: vec![(Monomial::var(v), Q::one())] }
    }

    pub fn monomial(m: Monomial, c: Q) -> MPoly {
        if c.is_zero() {
            MPoly::zero()
        } else {
            MPoly { terms: vec![(m, c)] }
        }
    }

    /// Build from arbitrary terms: sorts, merges duplicates, drops zeros.
    pub fn from_terms(mut terms: Vec<(Monomial, Q)>) -> MPoly {
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Monomial, Q)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 += c,
                _ => {
                    if let Some(last) = out.last() {
                        if last.1.is_zero() {
                            out.pop();
                        }
                    }
                    out.push((m, c));
                }
            }
        }
        if let Some(last) = out.last() {
            if last.1.is_zero() {
                out.pop();
            }
        }
        MPoly { terms: out }
    }

    /// Terms already strictly descending and nonzero.
    fn from_sorted(terms: Vec<(Monomial, Q)>) -> MPoly {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        debug_assert!(terms.iter().all(|t| !t.1.is_zero()));
        MPoly { terms }
    }

    pub fn terms(&self) -> &[(Monomial, Q)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, Q)> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn constant_value(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 if self.terms[0].0.is_one() => Some(self.terms[0].1.clone()),
            _ => None,
        }
    }

    /// Constant term (coefficient of the empty monomial).
    pub fn constant_term(&self) -> Q {
        match self.terms.last() {
            Some((m, c)) if m.is_one() => c.clone(),
            _ => Q::zero(),
        }
    }

    pub fn lm(&self) -> &Monomial {
        &self.terms[0].0
    }

    pub fn lc(&self) -> &Q {
        &self.terms[0].1
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map_or(0, |t| t.0.degree())
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.iter().flat_map(|t| t.0.vars()).collect()
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.iter().any(|t| t.0.exp(v) > 0)
    }

    pub fn contains_any(&self, vs: &[Var]) -> bool {
        self.terms.iter().any(|t| t.0.vars().any(|v| vs.contains(&v)))
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.iter().map(|t| t.0.exp(v)).max().unwrap_or(0)
    }

    /// Lowest exponent of `v` over all terms.
    pub fn order_in(&self, v: Var) -> u32 {
        self.terms.iter().map(|t| t.0.exp(v)).min().unwrap_or(0)
    }

    pub fn scale(&self, c: &Q) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly::from_sorted(self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect())
    }

    pub fn mul_monomial(&self, m: &Monomial) -> MPoly {
        MPoly::from_sorted(self.terms.iter().map(|(n, c)| (n.mul(m), c.clone())).collect())
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut result = MPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Coefficients as a polynomial in `v`, index = degree.
    pub fn to_univariate(&self, v: Var) -> Vec<MPoly> {
        let d = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Monomial, Q)>> = vec![Vec::new(); d + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.split(v);
            buckets[e as usize].push((rest, c.clone()));
        }
        buckets.into_iter().map(MPoly::from_terms).collect()
    }

    pub fn from_univariate(v: Var, coeffs: &[MPoly]) -> MPoly {
        let mut terms = Vec::new();
        for (k, c) in coeffs.iter().enumerate() {
            let vk = Monomial::power(v, k as u32);
            for (m, q) in &c.terms {
                terms.push((m.mul(&vk), q.clone()));
            }
        }
        MPoly::from_terms(terms)
    }

    pub fn coeff_in(&self, v: Var, k: u32) -> MPoly {
        MPoly::from_terms(
            self.terms
                .iter()
                .filter_map(|(m, c)| {
                    let (e, rest) = m.split(v);
                    (e == k).then(|| (rest, c.clone()))
                })
                .collect(),
        )
    }

    /// Group by the power product over `vars`; values are coefficients in the
    /// remaining variables.
    pub fn coefficients_over(&self, vars: &[Var]) -> BTreeMap<Monomial, MPoly> {
        let mut groups: BTreeMap<Monomial, Vec<(Monomial, Q)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (inside, outside) = m.split_set(vars);
            groups.entry(inside).or_default().push((outside, c.clone()));
        }
        groups.into_iter().map(|(k, v)| (k, MPoly::from_terms(v))).collect()
    }

    pub fn derivative(&self, v: Var) -> MPoly {
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split(v);
            if e > 0 {
                let m2 = rest.mul(&Monomial::power(v, e - 1));
                terms.push((m2, c * Q::from_integer(BigInt::from(e))));
            }
        }
        MPoly::from_terms(terms)
    }

    /// Substitute a polynomial for `v` (Horner in `v`).
    pub fn subst_poly(&self, v: Var, value: &MPoly) -> MPoly {
        if !self.contains_var(v) {
            return self.clone();
        }
        let coeffs = self.to_univariate(v);
        let mut acc = MPoly::zero();
        for c in coeffs.iter().rev() {
            acc = &(&acc * value) + c;
        }
        acc
    }

    /// Substitute rational constants for some variables.
    pub fn eval_partial(&self, values: &HashMap<Var, Q>) -> MPoly {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut rest = Vec::new();
            for &(v, e) in m.pairs() {
                match values.get(&v) {
                    Some(q) => coef *= num_traits::pow(q.clone(), e as usize),
                    None => rest.push((v, e)),
                }
            }
            if !coef.is_zero() {
                terms.push((Monomial::from_pairs(rest), coef));
            }
        }
        MPoly::from_terms(terms)
    }

    /// Rename variables.
    pub fn rename(&self, map: &HashMap<Var, Var>) -> MPoly {
        MPoly::from_terms(
            self.terms
                .iter()
                .map(|(m, c)| (Monomial::from_pairs(m.pairs().iter().map(|&(v, e)| (*map.get(&v).unwrap_or(&v), e))), c.clone()))
                .collect(),
        )
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &MPoly) -> Option<MPoly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(MPoly::zero());
        }
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        if d.len() == 1 {
            let (dm, dc) = &d.terms[0];
            let inv = dc.recip();
            let mut terms = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                terms.push((m.div(dm)?, c * &inv));
            }
            return Some(MPoly::from_sorted(terms));
        }
        if self.total_degree() < d.total_degree() {
            return None;
        }
        let (dm, dc) = (&d.terms[0].0, d.terms[0].1.clone());
        let inv = dc.recip();
        let mut rem = self.clone();
        let mut quot: Vec<(Monomial, Q)> = Vec::new();
        while !rem.is_zero() {
            let (rm, rc) = &rem.terms[0];
            let qm = rm.div(dm)?;
            let qc = rc * &inv;
            rem = rem.sub_scaled_shifted(d, &qc, &qm);
            quot.push((qm, qc));
        }
        Some(MPoly::from_sorted(quot))
    }

    /// `self - c * m * d`, by merge.
    fn sub_scaled_shifted(&self, d: &MPoly, c: &Q, m: &Monomial) -> MPoly {
        let other: Vec<(Monomial, Q)> = d.terms.iter().map(|(n, q)| (n.mul(m), -(q * c))).collect();
        merge_add(&self.terms, &other)
    }

    /// Positive rational `c` with `self / c` integral and primitive, sign
    /// chosen so the leading coefficient of the quotient is positive.
    pub fn rational_content(&self) -> Q {
        if self.is_zero() {
            return Q::one();
        }
        let mut g = BigInt::zero();
        let mut l = BigInt::one();
        for (_, c) in &self.terms {
            g = g.gcd(c.numer());
            l = l.lcm(c.denom());
        }
        let mut q = Q::new(g, l);
        if self.lc().is_negative() {
            q = -q;
        }
        q
    }

    /// Integral, primitive, positive leading coefficient.
    pub fn integer_primitive(&self) -> MPoly {
        if self.is_zero() {
            return MPoly::zero();
        }
        self.scale(&self.rational_content().recip())
    }

    pub fn monic(&self) -> MPoly {
        if self.is_zero() {
            return MPoly::zero();
        }
        self.scale(&self.lc().recip())
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let first = match it.next() {
            Some(t) => t.0.clone(),
            None => return Monomial::one(),
        };
        it.fold(first, |acc, t| if acc.is_one() { acc } else { acc.gcd(&t.0) })
    }

    pub fn div_monomial(&self, m: &Monomial) -> Option<MPoly> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (n, c) in &self.terms {
            terms.push((n.div(m)?, c.clone()));
        }
        Some(MPoly::from_sorted(terms))
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }
}

fn merge_add(a: &[(Monomial, Q)], b: &[(Monomial, Q)]) -> MPoly {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Greater => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Less => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let s = &a[i].1 + &b[j].1;
                if !s.is_zero() {
                    out.push((a[i].0.clone(), s));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    MPoly::from_sorted(out)
}

impl<'a> Add<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn add(self, o: &MPoly) -> MPoly {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        merge_add(&self.terms, &o.terms)
    }
}

impl<'a> Sub<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn sub(self, o: &MPoly) -> MPoly {
        if o.is_zero() {
            return self.clone();
        }
        let neg: Vec<(Monomial, Q)> = o.terms.iter().map(|(m, c)| (m.clone(), -c)).collect();
        merge_add(&self.terms, &neg)
    }
}

impl<'a> Mul<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn mul(self, o: &MPoly) -> MPoly {
        if self.is_zero() || o.is_zero() {
            return MPoly::zero();
        }
        if let Some(c) = self.constant_value() {
            return o.scale(&c);
        }
        if let Some(c) = o.constant_value() {
            return self.scale(&c);
        }
        if o.len() == 1 {
            return self.mul_monomial(&o.terms[0].0).scale(&o.terms[0].1);
        }
        if self.len() == 1 {
            return o.mul_monomial(&self.terms[0].0).scale(&self.terms[0].1);
        }
        let mut acc: HashMap<Monomial, Q> = HashMap::with_capacity(self.len() * o.len());
        for (m, c) in &self.terms {
            for (n, d) in &o.terms {
                let k = m.mul(n);
                let v = c * d;
                match acc.get_mut(&k) {
                    Some(e) => *e += v,
                    None => {
                        acc.insert(k, v);
                    }
                }
            }
        }
        let mut terms: Vec<(Monomial, Q)> = acc.into_iter().filter(|t| !t.1.is_zero()).collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        MPoly::from_sorted(terms)
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly::from_sorted(self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect())
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr<MPoly> for MPoly {
            type Output = MPoly;
            fn $f(self, o: MPoly) -> MPoly {
                (&self).$f(&o)
            }
        }
        impl<'a> $tr<&'a MPoly> for MPoly {
            type Output = MPoly;
            fn $f(self, o: &MPoly) -> MPoly {
                (&self).$f(o)
            }
        }
        impl<'a> $tr<MPoly> for &'a MPoly {
            type Output = MPoly;
            fn $f(self, o: MPoly) -> MPoly {
                self.$f(&o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        -(&self)
    }
}

pub(crate) fn fmt_q(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else if neg {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if m.is_one() {
                f.write_str(&fmt_q(&a))?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_q(&a))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl serde::Serialize for MPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for MPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<MPoly, D::Error> {
        let s = <String as serde::Deserialize>::deserialize(d)?;
        super::parse::parse_poly(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> MPoly {
        MPoly::var(Var::new("x"))
    }
    fn y() -> MPoly {
        MPoly::var(Var::new("y"))
    }

    #[test]
    fn arithmetic_and_display() {
        let p = &(&x() + &y()) * &(&x() - &y());
        assert_eq!(p.to_string(), "x^2 - y^2");
        let q = &p.scale(&Q::new(3.into(), 2.into())) - &MPoly::int(1);
        assert_eq!(q.to_string(), "3/2*x^2 - 3/2*y^2 - 1");
    }

    #[test]
    fn exact_division() {
        let a = &x() + &y();
        let b = &x() - &MPoly::int(2);
        let p = &a * &b;
        assert_eq!(p.div_exact(&a), Some(b.clone()));
        assert_eq!(p.div_exact(&(&x() + &MPoly::int(1))), None);
    }

    #[test]
    fn univariate_roundtrip() {
        let p = &(&x().pow(3) * &y()) + &(&x() + &y().pow(2));
        let u = p.to_univariate(Var::new("x"));
        assert_eq!(u.len(), 4);
        assert_eq!(MPoly::from_univariate(Var::new("x"), &u), p);
    }

    #[test]
    fn derivative_and_subst() {
        let p = &x().pow(3) + &(&x() * &y());
        assert_eq!(p.derivative(Var::new("x")).to_string(), "3*x^2 + y");
        let s = p.subst_poly(Var::new("x"), &(&y() + &MPoly::int(1)));
        assert_eq!(s, &(&y() + &MPoly::int(1)).pow(3) + &(&(&y() + &MPoly::int(1)) * &y()));
    }
}
