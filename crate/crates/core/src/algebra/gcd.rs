//! Multivariate gcd over ℚ: monomial and single-variable shortcuts, an
//! evaluation-image coprimality test, and a primitive PRS in a main variable
//! with recursive contents.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly::MPoly;
use super::var::Var;
use super::Q;

/// Monic gcd (leading coefficient 1); `gcd(0, 0) = 0`.
pub fn gcd(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return MPoly::one();
    }
    if a == b {
        return a.monic();
    }
    if a.is_monomial() || b.is_monomial() {
        let g = a.monomial_content().gcd(&b.monomial_content());
        return MPoly::monomial(g, Q::one());
    }
    let (ma, mb) = (a.monomial_content(), b.monomial_content());
    let mg = ma.gcd(&mb);
    let a1 = a.div_monomial(&ma).expect("monomial content divides");
    let b1 = b.div_monomial(&mb).expect("monomial content divides");
    let g = gcd_no_monomial(&a1, &b1);
    g.mul_monomial(&mg).monic()
}

/// gcd of a list, short-circuiting at 1.
pub fn gcd_many<'a, I: IntoIterator<Item = &'a MPoly>>(items: I) -> MPoly {
    let mut v: Vec<&MPoly> = items.into_iter().filter(|p| !p.is_zero()).collect();
    v.sort_by_key(|p| (p.total_degree(), p.len()));
    let mut g = MPoly::zero();
    for p in v {
        g = gcd(&g, p);
        if g.is_one() {
            break;
        }
    }
    g
}

fn gcd_no_monomial(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_constant() || b.is_constant() {
        return MPoly::one();
    }
    if a.total_degree() >= b.total_degree() {
        if a.div_exact(b).is_some() {
            return b.monic();
        }
    } else if b.div_exact(a).is_some() {
        return a.monic();
    }
    let va = a.vars();
    let vb = b.vars();
    let only_a: Vec<Var> = va.difference(&vb).copied().collect();
    let only_b: Vec<Var> = vb.difference(&va).copied().collect();
    if !only_a.is_empty() || !only_b.is_empty() {
        // The gcd cannot involve a variable missing from either argument.
        let mut parts: Vec<MPoly> = Vec::new();
        if only_a.is_empty() {
            parts.push(a.clone());
        } else {
            parts.extend(a.coefficients_over(&only_a).into_values());
        }
        if only_b.is_empty() {
            parts.push(b.clone());
        } else {
            parts.extend(b.coefficients_over(&only_b).into_values());
        }
        return gcd_many(parts.iter());
    }
    let common: BTreeSet<Var> = va;
    let v = *common.iter().min_by_key(|&&v| (a.degree_in(v).max(b.degree_in(v)), v)).expect("non-constant polynomials have variables");
    let ca = content_wrt(a, v);
    let cb = content_wrt(b, v);
    let c = gcd(&ca, &cb);
    if images_coprime(a, b, v) {
        return c;
    }
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let g = prs(&pa, &pb, v);
    (&c * &g).monic()
}

/// gcd of the coefficients of `p` viewed as a polynomial in `v`.
pub fn content_wrt(p: &MPoly, v: Var) -> MPoly {
    let coeffs = p.to_univariate(v);
    gcd_many(coeffs.iter())
}

/// `p` divided by its content in `v`.
pub fn primitive_wrt(p: &MPoly, v: Var) -> MPoly {
    let c = content_wrt(p, v);
    p.div_exact(&c).expect("content divides")
}

fn prs(a: &MPoly, b: &MPoly, v: Var) -> MPoly {
    let (mut f, mut g) = if a.degree_in(v) >= b.degree_in(v) { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    loop {
        if g.degree_in(v) == 0 {
            return MPoly::one();
        }
        let r = prem(&f, &g, v);
        if r.is_zero() {
            return primitive_wrt(&g, v).monic();
        }
        if r.degree_in(v) == 0 {
            return MPoly::one();
        }
        let r = primitive_wrt(&r, v).integer_primitive();
        f = g;
        g = r;
    }
}

/// Pseudo-remainder of `f` by `g` in `v` (up to a nonzero factor).
pub fn prem(f: &MPoly, g: &MPoly, v: Var) -> MPoly {
    let mut r = f.to_univariate(v);
    let gg = g.to_univariate(v);
    let dg = gg.len() - 1;
    let lg = gg[dg].clone();
    while r.len() > dg {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        if lr.is_zero() {
            r.pop();
            continue;
        }
        for c in r.iter_mut() {
            *c = &*c * &lg;
        }
        for (j, gj) in gg.iter().enumerate() {
            let idx = j + dr - dg;
            r[idx] = &r[idx] - &(&lr * gj);
        }
        r.pop();
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
        let joined = MPoly::from_univariate(v, &r);
        let joined = joined.integer_primitive();
        r = joined.to_univariate(v);
        if joined.is_zero() {
            r.clear();
        }
    }
    MPoly::from_univariate(v, &r)
}

/// Evaluate every variable except `v` at fixed integers; if the univariate
/// images are coprime while the leading coefficient of `a` survives, the true
/// gcd has degree 0 in `v`.
fn images_coprime(a: &MPoly, b: &MPoly, v: Var) -> bool {
    let others: Vec<Var> = a.vars().union(&b.vars()).copied().filter(|&w| w != v).collect();
    let lca = a.to_univariate(v).pop().expect("nonzero");
    for attempt in 0..3u64 {
        let point: HashMap<Var, Q> = others
            .iter()
            .enumerate()
            .map(|(i, &w)| {
                let k = (i as u64 * 7919 + attempt * 104_729 + 17) % 1009;
                (w, Q::from_integer(BigInt::from(k as i64 + 3)))
            })
            .collect();
        if lca.eval_partial(&point).is_zero() {
            continue;
        }
        let ua = univariate_image(a, v, &point);
        let ub = univariate_image(b, v, &point);
        return uni_gcd_degree(ua, ub) == 0;
    }
    false
}

fn univariate_image(p: &MPoly, v: Var, point: &HashMap<Var, Q>) -> Vec<Q> {
    let e = p.eval_partial(point);
    let d = e.degree_in(v) as usize;
    let mut out = vec![Q::zero(); d + 1];
    for (m, c) in e.terms() {
        out[m.exp(v) as usize] += c;
    }
    while out.last().is_some_and(|c| c.is_zero()) {
        out.pop();
    }
    out
}

fn uni_gcd_degree(mut a: Vec<Q>, mut b: Vec<Q>) -> usize {
    if a.is_empty() {
        return b.len().saturating_sub(1);
    }
    while !b.is_empty() {
        // a mod b
        let lb = b.last().expect("nonempty").clone();
        while a.len() >= b.len() {
            let la = a.last().expect("nonempty").clone();
            let q = la / &lb;
            let shift = a.len() - b.len();
            for (j, bj) in b.iter().enumerate() {
                a[j + shift] -= &q * bj;
            }
            a.pop();
            while a.last().is_some_and(|c| c.is_zero()) {
                a.pop();
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Least common multiple, monic.
pub fn lcm(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() || b.is_zero() {
        return MPoly::zero();
    }
    let g = gcd(a, b);
    (a * &b.div_exact(&g).expect("gcd divides")).monic()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_poly;

    fn p(s: &str) -> MPoly {
        parse_poly(s).unwrap()
    }

    #[test]
    fn simple_gcds() {
        assert_eq!(gcd(&p("t^2 - 1"), &p("t - 1")), p("t - 1"));
        assert_eq!(gcd(&p("x*y + x"), &p("x^2")), p("x"));
        assert_eq!(gcd(&p("(x + y)*(x - t)"), &p("(x + y)*(x + t)")), p("x + y"));
        assert!(gcd(&p("x + 1"), &p("x + 2")).is_one());
    }

    #[test]
    fn multivariate_common_factor() {
        let g = p("a*t - b*x + 3");
        let u = p("x^2*t + a - 1");
        let w = p("b^2 - x*a*t + 5*t");
        let r = gcd(&(&g * &u), &(&g * &w));
        assert_eq!(r, g.monic());
    }

    #[test]
    fn gcd_with_parameters_only_in_one() {
        let a = p("(t - 1)*(n1*x + 2)");
        let b = p("(t - 1)*x^2");
        assert_eq!(gcd(&a, &b), p("t - 1"));
    }
}
