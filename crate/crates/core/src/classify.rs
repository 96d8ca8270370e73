//! Natural-number solutions of the eigenvalue relations, exploratory integer
//! search, and the Fuchs relation for linear equations.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::Q;
use crate::error::{GrsError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum RelationId {
    /// `Σ 1/n_i = 2` over four entries.
    GenVI,
    /// `2n1n2n3 − (n1+n2)n3 − 2(n1+n2) = 0`.
    GenV,
    /// `2n1n2 − 3n1 − n2 − 3 = 0`.
    GenIV,
    /// `n1n2 = 4`.
    GenIII,
    /// `Σ 1/m_i = n` over n+2 entries.
    Existence(u32),
}

impl RelationId {
    pub fn arity(self) -> usize {
        match self {
            RelationId::GenVI => 4,
            RelationId::GenV => 3,
            RelationId::GenIV | RelationId::GenIII => 2,
            RelationId::Existence(n) => n as usize + 2,
        }
    }

    fn unit_fraction_target(self) -> Option<u32> {
        match self {
            RelationId::GenVI => Some(2),
            RelationId::Existence(n) => Some(n),
            _ => None,
        }
    }

    /// The last entry as a function of the others, where defined.
    pub fn solve_last(self, head: &[Q]) -> Option<Q> {
        match self {
            RelationId::GenVI | RelationId::Existence(_) => {
                let target = Q::from_integer(self.unit_fraction_target().expect("unit-fraction relation").into());
                let mut rest = target;
                for h in head {
                    if h.is_zero() {
                        return None;
                    }
                    rest -= h.recip();
                }
                (!rest.is_zero()).then(|| rest.recip())
            }
            RelationId::GenV => {
                let (a, b) = (&head[0], &head[1]);
                let den = Q::from_integer(2.into()) * a * b - a - b;
                (!den.is_zero()).then(|| Q::from_integer(2.into()) * (a + b) / den)
            }
            RelationId::GenIV => {
                let a = &head[0];
                let den = Q::from_integer(2.into()) * a - Q::one();
                (!den.is_zero()).then(|| (Q::from_integer(3.into()) * a + Q::from_integer(3.into())) / den)
            }
            RelationId::GenIII => (!head[0].is_zero()).then(|| Q::from_integer(4.into()) / &head[0]),
        }
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationId::GenVI => f.write_str("genVI"),
            RelationId::GenV => f.write_str("genV"),
            RelationId::GenIV => f.write_str("genIV"),
            RelationId::GenIII => f.write_str("genIII"),
            RelationId::Existence(n) => write!(f, "existence({n})"),
        }
    }
}

impl FromStr for RelationId {
    type Err = GrsError;

    fn from_str(s: &str) -> Result<RelationId> {
        match s {
            "genVI" => Ok(RelationId::GenVI),
            "genV" => Ok(RelationId::GenV),
            "genIV" => Ok(RelationId::GenIV),
            "genIII" => Ok(RelationId::GenIII),
            other => {
                let n = other
                    .strip_prefix("existence(")
                    .and_then(|r| r.strip_suffix(')'))
                    .or_else(|| other.strip_prefix("existence:"))
                    .and_then(|n| n.parse::<u32>().ok())
                    .filter(|&n| n >= 1);
                n.map(RelationId::Existence).ok_or_else(|| GrsError::Invalid(format!("unknown relation `{other}`")))
            }
        }
    }
}

/// Which orderings of a solution are listed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Convention {
    /// One representative per symmetry class: ascending for the unit-fraction
    /// relations, `n1 ≥ n2` for genV and genIII.
    #[default]
    Canonical,
    /// Every tuple.
    Unordered,
}

pub fn check_relation(rel: RelationId, tuple: &[Q]) -> Result<bool> {
    if tuple.len() != rel.arity() {
        return Err(GrsError::ShapeMismatch(format!("{rel} takes {} entries, got {}", rel.arity(), tuple.len())));
    }
    if rel.unit_fraction_target().is_some() {
        if let Some(i) = tuple.iter().position(|q| q.is_zero()) {
            return Err(GrsError::ZeroEntry(i));
        }
    }
    let two = Q::from_integer(2.into());
    let three = Q::from_integer(3.into());
    Ok(match rel {
        RelationId::GenVI | RelationId::Existence(_) => {
            let target = Q::from_integer(rel.unit_fraction_target().expect("unit-fraction relation").into());
            tuple.iter().map(|q| q.recip()).fold(Q::zero(), |a, b| a + b) == target
        }
        RelationId::GenV => {
            let (a, b, c) = (&tuple[0], &tuple[1], &tuple[2]);
            (&two * a * b * c - (a + b) * c - &two * (a + b)).is_zero()
        }
        RelationId::GenIV => {
            let (a, b) = (&tuple[0], &tuple[1]);
            (&two * a * b - &three * a - b - &three).is_zero()
        }
        RelationId::GenIII => (&tuple[0] * &tuple[1] - Q::from_integer(4.into())).is_zero(),
    })
}

fn natural(q: &Q) -> Option<u64> {
    (q.is_integer() && q.is_positive()).then(|| q.to_integer().to_u64()).flatten()
}

/// Ascending natural tuples with `Σ 1/m_i = target`: with `k` terms left and
/// remainder `r`, the next (smallest) entry `m` satisfies `1/m ≤ r ≤ k/m`.
fn unit_fractions(k: usize, r: Q, min: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if k == 1 {
        if !r.is_zero() {
            if let Some(m) = natural(&r.recip()) {
                if m >= min {
                    let mut t = prefix.clone();
                    t.push(m);
                    out.push(t);
                }
            }
        }
        return;
    }
    if !r.is_positive() {
        return;
    }
    let lo = (r.recip().ceil().to_integer().to_u64().unwrap_or(u64::MAX)).max(min).max(1);
    let hi = (Q::from_integer((k as u64).into()) / &r).floor().to_integer().to_u64().unwrap_or(0);
    for m in lo..=hi {
        prefix.push(m);
        unit_fractions(k - 1, &r - Q::new(1.into(), m.into()), m, prefix, out);
        prefix.pop();
    }
}

fn permutations(t: &[u64]) -> Vec<Vec<u64>> {
    let mut cur = t.to_vec();
    cur.sort();
    let mut out = vec![cur.clone()];
    // next lexicographic permutation
    while let Some(i) = (0..cur.len().saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) {
        let j = (i + 1..cur.len()).rev().find(|&j| cur[j] > cur[i]).expect("successor exists");
        cur.swap(i, j);
        cur[i + 1..].reverse();
        out.push(cur.clone());
    }
    out
}

/// All natural-number solutions, complete by the bounds noted per relation.
pub fn enumerate_natural(rel: RelationId, convention: Convention) -> Vec<Vec<u64>> {
    let q = |n: u64| Q::from_integer(n.into());
    let mut out: Vec<Vec<u64>> = match rel {
        RelationId::GenVI | RelationId::Existence(_) => {
            let mut sorted = Vec::new();
            let target = q(rel.unit_fraction_target().expect("unit-fraction relation").into());
            unit_fractions(rel.arity(), target, 1, &mut Vec::new(), &mut sorted);
            match convention {
                Convention::Canonical => sorted,
                Convention::Unordered => sorted.iter().flat_map(|t| permutations(t)).collect(),
            }
        }
        RelationId::GenV => {
            // n3 ≥ 1 forces 3(n1+n2) ≥ 2n1n2, so min(n1,n2) ≤ 3 and then max ≤ 6.
            let mut v = Vec::new();
            for n1 in 1..=6u64 {
                for n2 in 1..=6u64 {
                    if convention == Convention::Canonical && n1 < n2 {
                        continue;
                    }
                    if let Some(n3) = rel.solve_last(&[q(n1), q(n2)]).as_ref().and_then(natural) {
                        v.push(vec![n1, n2, n3]);
                    }
                }
            }
            v
        }
        RelationId::GenIV => {
            // n1 = (n2+3)/(2n2−3) ≥ 1 forces n2 ≤ 6; solve for n1 instead.
            (1..=6u64)
                .filter_map(|n2| {
                    let den = 2 * n2 as i64 - 3;
                    (den > 0 && (n2 as i64 + 3) % den == 0).then(|| vec![(n2 as i64 + 3) as u64 / den as u64, n2])
                })
                .collect()
        }
        RelationId::GenIII => (1..=4u64)
            .filter(|n1| 4 % n1 == 0)
            .map(|n1| vec![n1, 4 / n1])
            .filter(|t| convention == Convention::Unordered || t[0] >= t[1])
            .collect(),
    };
    out.sort();
    out.dedup();
    out
}

/// Every natural solution with all entries in `[1, bound]`, by running over
/// the first k−1 entries and solving exactly for the last; independent of the
/// bounds used by `enumerate_natural`.
pub fn brute_force_natural(rel: RelationId, bound: u64) -> Vec<Vec<u64>> {
    let k = rel.arity();
    let mut out = Vec::new();
    let mut head = vec![1u64; k - 1];
    if bound == 0 {
        return out;
    }
    loop {
        let hq: Vec<Q> = head.iter().map(|&n| Q::from_integer(n.into())).collect();
        if let Some(last) = rel.solve_last(&hq).as_ref().and_then(natural) {
            if last <= bound {
                let mut t = head.clone();
                t.push(last);
                out.push(t);
            }
        }
        let Some(i) = (0..k - 1).rev().find(|&i| head[i] < bound) else { break };
        head[i] += 1;
        for h in head.iter_mut().skip(i + 1) {
            *h = 1;
        }
    }
    out
}

/// Integer tuples with `0 < |entry| ≤ bound` satisfying the relation. Not a
/// classification: only the box is searched.
pub fn bounded_integer_search(rel: RelationId, bound: i64) -> Vec<Vec<i64>> {
    let k = rel.arity();
    let mut out = Vec::new();
    if bound < 1 {
        return out;
    }
    let values: Vec<i64> = (-bound..=bound).filter(|&v| v != 0).collect();
    let mut idx = vec![0usize; k - 1];
    loop {
        let head: Vec<Q> = idx.iter().map(|&i| Q::from_integer(values[i].into())).collect();
        if let Some(last) = rel.solve_last(&head) {
            if last.is_integer() && !last.is_zero() && last.abs() <= Q::from_integer(bound.into()) {
                let mut t: Vec<i64> = idx.iter().map(|&i| values[i]).collect();
                t.push(last.to_integer().to_i64().expect("bounded"));
                out.push(t);
            }
        }
        let Some(i) = (0..k - 1).rev().find(|&i| idx[i] + 1 < values.len()) else { break };
        idx[i] += 1;
        for j in idx.iter_mut().skip(i + 1) {
            *j = 0;
        }
    }
    out.sort();
    out
}

/// `Σ ρ_jl = (m−1)·n(n−1)/2` for an `(m+1) × n` exponent matrix.
pub fn fuchs_relation(exponents: &[Vec<Q>], m: usize, n: usize) -> Result<bool> {
    if exponents.len() != m + 1 || exponents.iter().any(|row| row.len() != n) {
        return Err(GrsError::ShapeMismatch(format!("expected {} rows of {n} exponents", m + 1)));
    }
    let sum = exponents.iter().flatten().fold(Q::zero(), |a, b| a + b);
    let want = Q::new(((m as i64 - 1) * (n * (n.saturating_sub(1))) as i64).into(), 2.into());
    Ok(sum == want)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Q {
        crate::algebra::parse_q(s).unwrap()
    }

    #[test]
    fn lists() {
        assert_eq!(
            enumerate_natural(RelationId::GenVI, Convention::Canonical),
            vec![vec![1, 2, 3, 6], vec![1, 2, 4, 4], vec![1, 3, 3, 3], vec![2, 2, 2, 2]]
        );
        assert_eq!(
            enumerate_natural(RelationId::GenV, Convention::Canonical),
            vec![vec![2, 1, 6], vec![2, 2, 2], vec![3, 1, 4], vec![3, 3, 1], vec![5, 1, 3], vec![6, 2, 1]]
        );
        assert_eq!(enumerate_natural(RelationId::GenIV, Convention::Canonical), vec![vec![1, 6], vec![2, 3], vec![5, 2]]);
        assert_eq!(enumerate_natural(RelationId::GenIII, Convention::Canonical), vec![vec![2, 2], vec![4, 1]]);
        assert_eq!(enumerate_natural(RelationId::GenIII, Convention::Unordered), vec![vec![1, 4], vec![2, 2], vec![4, 1]]);
    }

    #[test]
    fn complete_against_brute_force() {
        for rel in [RelationId::GenVI, RelationId::GenV, RelationId::GenIV, RelationId::GenIII] {
            assert_eq!(enumerate_natural(rel, Convention::Unordered), brute_force_natural(rel, 40), "{rel}");
        }
    }

    #[test]
    fn relation_checks() {
        assert!(check_relation(RelationId::GenVI, &[q("2"), q("2"), q("2"), q("2")]).unwrap());
        assert!(check_relation(RelationId::GenV, &[q("2"), q("2"), q("2")]).unwrap());
        assert!(!check_relation(RelationId::GenVI, &[q("3"), q("3"), q("3"), q("3")]).unwrap());
        assert_eq!(check_relation(RelationId::GenVI, &[q("0"), q("2"), q("2"), q("2")]), Err(GrsError::ZeroEntry(0)));
        assert!(matches!(check_relation(RelationId::GenIII, &[q("2")]), Err(GrsError::ShapeMismatch(_))));
    }

    #[test]
    fn integer_search() {
        let r = bounded_integer_search(RelationId::GenIII, 10);
        for t in [[-2, -2], [-1, -4], [-4, -1], [1, 4], [4, 1], [2, 2]] {
            assert!(r.contains(&t.to_vec()));
        }
        assert!(bounded_integer_search(RelationId::GenVI, 0).is_empty());
        assert!(bounded_integer_search(RelationId::GenVI, 2).contains(&vec![2, 2, 2, 2]));
    }

    #[test]
    fn fuchs() {
        let hyper = vec![vec![q("0"), q("1") - q("7/3")], vec![q("0"), q("7/3") - q("1/2") - q("1/5")], vec![q("1/2"), q("1/5")]];
        assert!(fuchs_relation(&hyper, 2, 2).unwrap());
        assert!(fuchs_relation(&[vec![q("0"); 3], vec![q("0"); 3]], 1, 3).unwrap());
        assert!(matches!(fuchs_relation(&[vec![q("0")]], 2, 2), Err(GrsError::ShapeMismatch(_))));
    }

    #[test]
    fn existence_relation_lists() {
        assert_eq!(
            enumerate_natural(RelationId::Existence(2), Convention::Canonical),
            enumerate_natural(RelationId::GenVI, Convention::Canonical)
        );
        assert!(enumerate_natural(RelationId::Existence(3), Convention::Canonical).contains(&vec![1, 2, 2, 2, 2]));
    }
}
