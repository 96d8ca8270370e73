pub mod gcd;
pub mod mat2;
pub mod monomial;
pub mod parse;
pub mod poly;
pub mod rat;
pub mod roots;
pub mod solve;
pub mod var;

pub use crate::error::GrsError as AlgebraError;
pub use gcd::gcd_many;
pub use mat2::Mat2;
pub use monomial::Monomial;
pub use parse::{parse_poly, parse_rat};
pub use poly::MPoly;
pub use rat::MRat;
pub use roots::rational_roots;
pub use solve::{solve_triangular, solve_triangular_with, Solution, SolveFailure, SolveOptions, TraceStep};
pub use var::{t_var, Sym, SymKind, Var};

/// Exact rational numbers.
pub type Q = num_rational::BigRational;

/// Parse an exact rational such as `-3/2`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: num_bigint::BigInt = n.trim().parse().ok()?;
            let d: num_bigint::BigInt = d.trim().parse().ok()?;
            if d == num_bigint::BigInt::from(0) {
                return None;
            }
            Some(Q::new(n, d))
        }
        None => Some(Q::from_integer(s.parse().ok()?)),
    }
}
