//! Recursive-descent reader for the canonical text form: `+ - * / ^`,
//! parentheses, integers and identifiers.

use num_bigint::BigInt;

use super::poly::MPoly;
use super::rat::MRat;
use super::var::Var;
use super::{AlgebraError, Q};

pub fn parse_rat(src: &str) -> Result<MRat, AlgebraError> {
    let mut p = Parser { s: src.as_bytes(), i: 0, src };
    let r = p.expr()?;
    p.skip_ws();
    if p.i != p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(r)
}

pub fn parse_poly(src: &str) -> Result<MPoly, AlgebraError> {
    let r = parse_rat(src)?;
    if !r.is_poly() {
        return Err(AlgebraError::Parse(format!("`{src}` is not a polynomial")));
    }
    Ok(r.into_parts().0)
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> AlgebraError {
        AlgebraError::Parse(format!("{msg} at offset {} in `{}`", self.i, self.src))
    }

    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.i).copied()
    }

    fn expr(&mut self) -> Result<MRat, AlgebraError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.i += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MRat, AlgebraError> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.i += 1;
            let rhs = self.unary()?;
            acc = if c == b'*' { &acc * &rhs } else { acc.checked_div(&rhs).map_err(|_| self.err("division by zero"))? };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MRat, AlgebraError> {
        match self.peek() {
            Some(b'-') => {
                self.i += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.i += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MRat, AlgebraError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.i += 1;
            let neg = if self.peek() == Some(b'-') {
                self.i += 1;
                true
            } else {
                false
            };
            let e = self.integer()?;
            let e: i32 = e.try_into().map_err(|_| self.err("exponent too large"))?;
            let e = if neg { -e } else { e };
            return base.pow(e).map_err(|_| self.err("negative power of zero"));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt, AlgebraError> {
        self.skip_ws();
        let start = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        if start == self.i {
            return Err(self.err("expected integer"));
        }
        Ok(self.src[start..self.i].parse().expect("digits"))
    }

    fn atom(&mut self) -> Result<MRat, AlgebraError> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let r = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.i += 1;
                Ok(r)
            }
            Some(c) if c.is_ascii_digit() => Ok(MRat::constant(Q::from_integer(self.integer()?))),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.i;
                while self.i < self.s.len() && (self.s[self.i].is_ascii_alphanumeric() || self.s[self.i] == b'_' || self.s[self.i] == b'\'')
                {
                    self.i += 1;
                }
                Ok(MRat::var(Var::new(&self.src[start..self.i])))
            }
            _ => Err(self.err("expected number, symbol or `(`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        assert_eq!(parse_rat("1 + 2*3^2").unwrap(), MRat::int(19));
        assert_eq!(parse_rat("-2^2").unwrap(), MRat::int(-4));
        assert_eq!(parse_rat("x^-1").unwrap(), parse_rat("1/x").unwrap());
        assert_eq!(parse_rat("3/2").unwrap(), MRat::frac(3, 2));
    }

    #[test]
    fn errors() {
        assert!(parse_rat("x +").is_err());
        assert!(parse_rat("(x").is_err());
        assert!(parse_rat("1/0").is_err());
        assert!(parse_poly("1/x").is_err());
    }
}
