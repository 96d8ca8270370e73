//! Rational roots of univariate polynomials with rational coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::MPoly;
use super::var::Var;
use super::Q;

/// Positive divisors of `n`; `None` when `n` is too large to factor by trial
/// division.
fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64().filter(|&n| n <= 1 << 40)?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Some(out)
}

/// Distinct rational roots of `p`, which must involve no variable but `v`.
/// Returns `None` if `p` has other variables or coefficients too large to
/// search.
pub fn rational_roots(p: &MPoly, v: Var) -> Option<Vec<Q>> {
    if p.vars().iter().any(|&w| w != v) {
        return None;
    }
    if p.is_zero() {
        return None;
    }
    let p = p.integer_primitive();
    let k = p.order_in(v);
    let coeffs: Vec<Q> = p.to_univariate(v).iter().map(|c| c.constant_value().unwrap_or_else(Q::zero)).collect();
    let trimmed: Vec<BigInt> = coeffs[k as usize..].iter().map(|c| c.to_integer()).collect();
    let mut roots: Vec<Q> = if k > 0 { vec![Q::zero()] } else { vec![] };
    if trimmed.len() > 1 {
        let a0 = &trimmed[0];
        let an = trimmed.last().expect("nonempty");
        for p in divisors(a0)? {
            for q in divisors(an)? {
                if !p.gcd(&q).is_one() {
                    continue;
                }
                for sign in [1, -1] {
                    let r = Q::new(&p * sign, q.clone());
                    let val = trimmed.iter().rev().fold(Q::zero(), |acc, c| acc * &r + Q::from_integer(c.clone()));
                    if val.is_zero() && !roots.contains(&r) {
                        roots.push(r);
                    }
                }
            }
        }
    }
    roots.sort();
    Some(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_poly;

    #[test]
    fn finds_rational_roots() {
        let s = Var::new("s");
        let r = rational_roots(&parse_poly("s^3 - s/4").unwrap(), s).unwrap();
        assert_eq!(r, vec![Q::new((-1).into(), 2.into()), Q::zero(), Q::new(1.into(), 2.into())]);
        assert_eq!(rational_roots(&parse_poly("s^2 - 2").unwrap(), s).unwrap(), vec![]);
        assert!(rational_roots(&parse_poly("s - u").unwrap(), s).is_none());
    }
}
