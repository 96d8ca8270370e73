use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::rat::MRat;
use super::var::Var;

/// A 2×2 matrix over ℚ(symbols), rows first.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Mat2(pub [[MRat; 2]; 2]);

impl Mat2 {
    pub fn new(a: MRat, b: MRat, c: MRat, d: MRat) -> Mat2 {
        Mat2([[a, b], [c, d]])
    }

    pub fn zero() -> Mat2 {
        Mat2::new(MRat::zero(), MRat::zero(), MRat::zero(), MRat::zero())
    }

    pub fn get(&self, i: usize, j: usize) -> &MRat {
        &self.0[i][j]
    }

    pub fn is_upper(&self) -> bool {
        self.0[1][0].is_zero()
    }

    pub fn is_lower(&self) -> bool {
        self.0[0][1].is_zero()
    }

    pub fn diagonal(&self) -> (MRat, MRat) {
        (self.0[0][0].clone(), self.0[1][1].clone())
    }

    pub fn det(&self) -> MRat {
        &(&self.0[0][0] * &self.0[1][1]) - &(&self.0[0][1] * &self.0[1][0])
    }

    pub fn trace(&self) -> MRat {
        &self.0[0][0] + &self.0[1][1]
    }

    pub fn scale(&self, c: &MRat) -> Mat2 {
        Mat2(self.0.clone().map(|row| row.map(|e| &e * c)))
    }

    pub fn map(&self, f: impl Fn(&MRat) -> MRat) -> Mat2 {
        Mat2([[f(&self.0[0][0]), f(&self.0[0][1])], [f(&self.0[1][0]), f(&self.0[1][1])]])
    }

    pub fn subst(&self, m: &HashMap<Var, MRat>) -> Mat2 {
        self.map(|e| e.subst(m))
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let e = |i: usize, j: usize| &(&self.0[i][0] * &o.0[0][j]) + &(&self.0[i][1] * &o.0[1][j]);
        Mat2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.0[0][0], self.0[0][1], self.0[1][0], self.0[1][1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_rat;

    #[test]
    fn triangular_eigen() {
        let m = Mat2::new(MRat::int(2), parse_rat("-alpha4").unwrap(), MRat::zero(), MRat::one());
        assert!(m.is_upper() && !m.is_lower());
        assert_eq!(m.det(), MRat::int(2));
        assert_eq!(m.to_string(), "[[2, -alpha4], [0, 1]]");
    }
}
