//! Triangular elimination: repeatedly solve an equation that is linear in one
//! unsolved unknown, substitute, and continue.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::gcd::gcd_many;
use super::poly::MPoly;
use super::rat::MRat;
use super::var::Var;
use super::AlgebraError;

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    /// Preferred elimination order; unknowns not listed come after, by name.
    pub priority: Vec<Var>,
    /// Expressions assumed generically nonzero. Solving `c·u = 0` as `u = 0`
    /// when that would make one of these vanish yields a relation `c = 0`
    /// instead.
    pub nonvanishing: Vec<MRat>,
}

/// One elimination step, with the value as it was when solved.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub unknown: Var,
    pub value: MRat,
    pub equation: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Solution {
    /// Fully back-substituted values, in terms of parameters and `free`.
    pub values: BTreeMap<Var, MRat>,
    pub trace: Vec<TraceStep>,
    /// Unknowns left undetermined.
    pub free: Vec<Var>,
}

impl Solution {
    pub fn as_map(&self) -> HashMap<Var, MRat> {
        self.values.iter().map(|(k, v)| (*k, v.clone())).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveFailure {
    Stuck(Vec<MPoly>),
    Inconsistent(MPoly),
    /// A condition on the parameters alone is needed for consistency.
    Relation(MPoly),
}

impl From<SolveFailure> for AlgebraError {
    fn from(f: SolveFailure) -> AlgebraError {
        match f {
            SolveFailure::Stuck(eqs) => AlgebraError::StuckSystem(eqs.iter().map(|e| format!("{e} = 0")).collect()),
            SolveFailure::Inconsistent(e) => AlgebraError::InconsistentSystem(e.to_string()),
            SolveFailure::Relation(e) => AlgebraError::RelationRequired(e.to_string()),
        }
    }
}

pub fn solve_triangular(eqs: &[MPoly], unknowns: &[Var]) -> Result<Solution, AlgebraError> {
    solve_triangular_with(eqs, unknowns, &SolveOptions::default()).map_err(Into::into)
}

pub fn solve_triangular_with(eqs: &[MPoly], unknowns: &[Var], opts: &SolveOptions) -> Result<Solution, SolveFailure> {
    let rank = |v: Var| -> (usize, Var) {
        let r = opts.priority.iter().position(|&p| p == v).unwrap_or(usize::MAX);
        (r, v)
    };
    let mut unsolved: Vec<Var> = unknowns.to_vec();
    unsolved.sort_by_key(|&v| rank(v));
    let mut pending: Vec<MPoly> = Vec::new();
    for e in eqs {
        push_normalized(&mut pending, e.clone(), &unsolved)?;
    }
    let mut values: Vec<(Var, MRat)> = Vec::new();
    let mut trace = Vec::new();

    while !pending.is_empty() {
        let Some((idx, u)) = pick(&pending, &unsolved, &rank) else {
            return Err(SolveFailure::Stuck(pending));
        };
        let eq = pending.remove(idx);
        let c = eq.coeff_in(u, 1);
        let rest = eq.coeff_in(u, 0);
        let value = MRat::new(-rest.clone(), c.clone()).expect("linear coefficient is nonzero");

        if rest.is_zero() && !opts.nonvanishing.is_empty() {
            let mut trial: HashMap<Var, MRat> = values.iter().map(|(k, v)| (*k, v.subst1(u, &value))).collect();
            trial.insert(u, value.clone());
            if opts.nonvanishing.iter().any(|f| f.try_subst(&trial).map_or(true, |r| r.is_zero())) {
                return Err(SolveFailure::Relation(c.integer_primitive()));
            }
        }

        trace.push(TraceStep { unknown: u, value: value.clone(), equation: format!("{eq} = 0") });
        for (_, v) in values.iter_mut() {
            if v.contains_var(u) {
                *v = v.subst1(u, &value);
            }
        }
        values.push((u, value.clone()));
        unsolved.retain(|&w| w != u);

        let old = std::mem::take(&mut pending);
        for e in old {
            if !e.contains_var(u) {
                pending.push(e);
                continue;
            }
            let r = MRat::from_poly(e).subst1(u, &value);
            push_normalized(&mut pending, r.into_parts().0, &unsolved)?;
        }
    }
    Ok(Solution { values: values.into_iter().collect(), trace, free: unsolved })
}

fn push_normalized(out: &mut Vec<MPoly>, e: MPoly, unknowns: &[Var]) -> Result<(), SolveFailure> {
    if e.is_zero() {
        return Ok(());
    }
    if !e.contains_any(unknowns) {
        return Err(if e.is_constant() { SolveFailure::Inconsistent(e) } else { SolveFailure::Relation(e.integer_primitive()) });
    }
    let groups = e.coefficients_over(unknowns);
    let e = if groups.len() >= 2 {
        let g = gcd_many(groups.values());
        if g.is_constant() {
            e
        } else {
            e.div_exact(&g).expect("content divides")
        }
    } else {
        e
    };
    let e = e.integer_primitive();
    if !out.contains(&e) {
        out.push(e);
    }
    Ok(())
}

fn unknowns_in(e: &MPoly, unsolved: &[Var]) -> Vec<Var> {
    unsolved.iter().copied().filter(|&v| e.contains_var(v)).collect()
}

fn is_homogeneous(e: &MPoly, unsolved: &[Var]) -> bool {
    e.terms().iter().all(|(m, _)| m.vars().any(|v| unsolved.contains(&v)))
}

/// Choose the next equation and unknown: first an equation involving exactly
/// one unsolved unknown, to degree one; failing that, any equation linear in
/// some unknown whose coefficient is free of the other unsolved unknowns.
/// Homogeneous equations and higher-priority unknowns go first.
/// (inhomogeneous, rank of the unknown, equation index): smaller goes first.
type PickKey = (bool, (usize, Var), usize);

fn pick(pending: &[MPoly], unsolved: &[Var], rank: &dyn Fn(Var) -> (usize, Var)) -> Option<(usize, Var)> {
    let mut best: Option<(PickKey, usize, Var)> = None;
    for (i, e) in pending.iter().enumerate() {
        let us = unknowns_in(e, unsolved);
        if us.len() == 1 && e.degree_in(us[0]) == 1 {
            let key = (!is_homogeneous(e, unsolved), rank(us[0]), i);
            if best.as_ref().is_none_or(|b| key < b.0) {
                best = Some((key, i, us[0]));
            }
        }
    }
    if let Some((_, i, u)) = best {
        return Some((i, u));
    }
    for (i, e) in pending.iter().enumerate() {
        let us = unknowns_in(e, unsolved);
        let homog = is_homogeneous(e, unsolved);
        for &u in &us {
            if e.degree_in(u) != 1 {
                continue;
            }
            if e.coeff_in(u, 1).contains_any(unsolved) {
                continue;
            }
            let key = (!homog, rank(u), i);
            if best.as_ref().is_none_or(|b| key < b.0) {
                best = Some((key, i, u));
            }
        }
    }
    best.map(|(_, i, u)| (i, u))
}
